fn main() {
    std::process::exit(dirtree_cli::run(std::env::args_os()));
}
