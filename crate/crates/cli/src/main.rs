use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = mfbm_asian_cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    if out.flush().is_err() && code == mfbm_asian_cli::EXIT_OK {
        std::process::exit(mfbm_asian_cli::EXIT_VIOLATION);
    }
    drop(out);
    std::process::exit(code);
}
