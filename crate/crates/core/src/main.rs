fn main() {
    std::process::exit(qslchan::cli::run(std::env::args_os()));
}
