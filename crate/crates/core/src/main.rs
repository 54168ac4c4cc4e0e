fn main() {
    env_logger::init();
    std::process::exit(askey_wilson::cli::run(std::env::args_os()));
}
