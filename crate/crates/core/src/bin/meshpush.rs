fn main() {
    std::process::exit(meshpush::cli::run(std::env::args_os()));
}
