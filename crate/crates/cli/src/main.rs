fn main() {
    std::process::exit(dqaoa_cli::cli_main());
}
