fn main() {
    std::process::exit(wrinkle_fem::cli::run_cli(std::env::args_os()));
}
