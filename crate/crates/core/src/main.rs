fn main() {
    std::process::exit(sepvol::cli::run(std::env::args_os()));
}
