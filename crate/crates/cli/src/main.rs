use clap::Parser;

use chaingf_cli::{run, Cli};

fn main() {
    // clap exits with 2 on usage errors and 0 on --help
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
