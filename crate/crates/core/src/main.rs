use std::io::Write;

fn main() {
    let result = star_order_lab::cli::run(std::env::args_os());
    if let Some(d) = &result.diagnostic {
        eprintln!("{}", d.trim_end());
    }
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(result.stdout().as_bytes());
    let _ = out.flush();
    std::process::exit(result.exit_code);
}
