fn main() {
    std::process::exit(curvecount::cli::run(std::env::args_os()));
}
