fn main() {
    std::process::exit(qcx::cli::main_with_args(std::env::args_os()));
}
