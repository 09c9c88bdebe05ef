fn main() {
    std::process::exit(partner_harvest::cli::run(std::env::args_os()));
}
