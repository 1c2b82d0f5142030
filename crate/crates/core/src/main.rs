fn main() {
    std::process::exit(helix_sturm::cli::run(std::env::args_os()));
}
