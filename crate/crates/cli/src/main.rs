fn main() {
    std::process::exit(superwav_cli::run_command(std::env::args_os()));
}
