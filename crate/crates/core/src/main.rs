fn main() {
    std::process::exit(tandelbrot::cli::run(std::env::args_os()));
}
