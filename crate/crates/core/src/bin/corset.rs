fn main() {
    env_logger::init();
    corset::cli::main()
}
