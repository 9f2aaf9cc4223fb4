fn main() {
    std::process::exit(tempnet_tradeoff::cli::run());
}
