fn main() {
    std::process::exit(ksnet::cli::run(std::env::args_os()));
}
