fn main() {
    std::process::exit(nvqpt_cli::run(std::env::args_os()));
}
