fn main() {
    std::process::exit(floquet_dtc::cli::main_with_args(std::env::args_os()));
}
