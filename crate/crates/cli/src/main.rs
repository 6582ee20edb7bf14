fn main() {
    std::process::exit(kdio_cli::run(std::env::args_os()));
}
