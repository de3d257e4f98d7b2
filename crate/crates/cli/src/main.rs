fn main() {
    std::process::exit(svd_mpe_cli::cli::main_with_args(std::env::args_os()));
}
