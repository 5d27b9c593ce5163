use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match gff::cli::run(std::env::args_os(), &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(gff::cli::CliError::Usage(e)) => {
            let code = e.exit_code() as u8;
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            if let gff::cli::CliError::Run(gff::GffError::VerifyFailed { report, .. }) = &e {
                print!("{report}");
            }
            eprintln!("gff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
