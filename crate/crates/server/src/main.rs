fn main() {
    std::process::exit(evograd_server::cli::run(std::env::args_os()));
}
