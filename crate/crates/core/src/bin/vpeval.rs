use clap::Parser;
use vpeval::cli::{error_line, execute, Cli};

fn main() {
    match execute(Cli::parse()) {
        Ok(out) => println!("{out}"),
        Err(e) => {
            eprintln!("{}", error_line(&e));
            std::process::exit(1);
        }
    }
}
