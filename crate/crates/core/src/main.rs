fn main() {
    std::process::exit(koszul_division::cli::run(std::env::args_os()));
}
