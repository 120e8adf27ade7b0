use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = fewnomial_cli::run(std::env::args_os());
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code)
}
