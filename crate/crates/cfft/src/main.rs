fn main() {
    std::process::exit(cfft::cli::dispatch(std::env::args_os()));
}
