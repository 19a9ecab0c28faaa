fn main() {
    std::process::exit(nnflock::cli::run(std::env::args_os()));
}
