fn main() {
    std::process::exit(toric_lab::cli::cli_main(std::env::args_os()));
}
