fn main() {
    std::process::exit(pencil_eig::cli::run(std::env::args_os()));
}
