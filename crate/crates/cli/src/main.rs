fn main() {
    std::process::exit(hullcore_cli::run(std::env::args_os()));
}
