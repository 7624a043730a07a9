fn main() {
    std::process::exit(piezo_cli::cli_main(std::env::args_os()));
}
