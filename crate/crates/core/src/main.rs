fn main() {
    std::process::exit(matroid_bandit::cli::main_with_args(std::env::args_os()));
}
