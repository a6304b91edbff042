use clap::Parser;
use serde_json::json;

fn main() {
    let cli = ionglow_cli::Cli::parse();
    if let Err(error) = ionglow_cli::run(&cli) {
        let record = json!({
            "error": {
                "kind": error.kind(),
                "message": error.to_string(),
            }
        });
        eprintln!("{record}");
        std::process::exit(1);
    }
}
