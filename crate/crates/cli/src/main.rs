use clap::Parser;

fn main() {
    let cli = mwpam_cli::commands::Cli::parse();
    std::process::exit(mwpam_cli::commands::run(cli));
}
