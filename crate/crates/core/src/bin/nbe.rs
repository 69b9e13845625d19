use std::io;

fn main() {
    let code = delay_nbe::cli::main_with_args(
        std::env::args_os(),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
