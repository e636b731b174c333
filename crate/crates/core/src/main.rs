use clap::Parser;

fn main() {
    let cli = bregman::cli::Cli::parse();
    std::process::exit(bregman::cli::run(cli));
}
