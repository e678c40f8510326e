fn main() {
    std::process::exit(abkernel::cli::dispatch(std::env::args()));
}
