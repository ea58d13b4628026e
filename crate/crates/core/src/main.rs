fn main() {
    let (out, code) = shimura_vol::cli::main_with_args(std::env::args_os());
    if code == shimura_vol::cli::EXIT_INPUT && !out.trim_start().starts_with('{') {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    std::process::exit(code);
}
