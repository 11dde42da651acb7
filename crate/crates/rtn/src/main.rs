use std::process::ExitCode;

use clap::Parser;
use rtn::cli::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version are not
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match rtn::run(cli) {
        Ok(report) => {
            if report.error_rows > 0 {
                eprintln!("rtn: {} of {} rows report errors", report.error_rows, report.rows);
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("rtn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
