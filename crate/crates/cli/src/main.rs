use basa_cli::commands::run_cli;
use basa_cli::error::CliError;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run_cli(std::env::args_os()) {
        match &e {
            CliError::Usage(text, 0) => print!("{text}"),
            _ => eprintln!("{}", e.to_string().trim_end()),
        }
        std::process::exit(e.exit_code());
    }
}
