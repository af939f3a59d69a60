fn main() {
    std::process::exit(sdsim_cli::cli_main(std::env::args()));
}
