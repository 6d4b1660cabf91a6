use std::io::Write;

fn main() {
    let out = catswarm_cli::execute(std::env::args_os(), &|k| std::env::var(k).ok());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
