fn main() {
    std::process::exit(azpp_core::cli::main(std::env::args_os()));
}
