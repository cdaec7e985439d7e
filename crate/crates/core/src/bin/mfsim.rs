fn main() {
    std::process::exit(monitored_fermions::cli::main_with_args(std::env::args_os()));
}
