use std::io;

fn main() {
    let settings = hq::cli::Settings::from_env();
    let code = hq::cli::main_with_args(std::env::args_os(), settings, &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
