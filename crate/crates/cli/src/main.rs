fn main() {
    std::process::exit(eos::run(std::env::args_os()));
}
