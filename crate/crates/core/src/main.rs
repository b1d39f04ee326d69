fn main() {
    std::process::exit(open_dicke::cli::run(std::env::args_os()));
}
