use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = lslab_cli::parse_args(&argv).and_then(|cfg| lslab_cli::run(&cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(lslab_cli::CliError::Help(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
