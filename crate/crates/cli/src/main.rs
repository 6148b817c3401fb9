use clap::Parser;

fn main() {
    let cli = geoflow_cli::commands::Cli::parse();
    match geoflow_cli::commands::dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
