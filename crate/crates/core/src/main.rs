fn main() {
    std::process::exit(soc_accel::cli::run(std::env::args_os()));
}
