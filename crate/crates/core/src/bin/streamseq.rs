fn main() {
    std::process::exit(streamseq::cli::run(std::env::args_os()));
}
