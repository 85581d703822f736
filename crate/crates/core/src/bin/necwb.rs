fn main() {
    std::process::exit(necwb_core::cli::run(std::env::args_os()));
}
