use std::process::ExitCode;

use clap::Parser;
use qkg_lab::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qkg: {e}");
            if let qkg_lab::LabError::Verification(failed) = &e {
                for f in failed {
                    eprintln!("  {f}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
