use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match qpefl::cli::run_from(std::env::args_os(), &mut stdout) {
        Err(usage) => {
            let code = usage.exit_code();
            let _ = usage.print();
            ExitCode::from(code as u8)
        }
        Ok(Err(e)) => {
            let _ = stdout.flush();
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Ok(Ok(())) => ExitCode::SUCCESS,
    }
}
