use clap::Parser;
use fpda_cli::{dispatch, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fpda: {e}");
            e.code
        }
    };
    std::process::exit(code);
}
