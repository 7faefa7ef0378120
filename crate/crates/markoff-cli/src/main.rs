use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (code, out) = markoff_cli::run(&args);
    if code == 2 {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(code as u8)
}
