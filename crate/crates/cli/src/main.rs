use std::io;

fn main() {
    let code = polymass_cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code as i32);
}
