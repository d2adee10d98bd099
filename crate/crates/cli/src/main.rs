fn main() {
    std::process::exit(llg_cli::run(std::env::args_os()));
}
