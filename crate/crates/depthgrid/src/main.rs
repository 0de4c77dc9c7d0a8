use std::io::Write;

fn main() {
    let outcome = depthgrid::cli::dispatch(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stderr.write_all(outcome.stderr.as_bytes());
    let _ = stdout.flush();
    std::process::exit(outcome.code);
}
