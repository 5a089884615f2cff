use clap::Parser;

fn main() {
    std::process::exit(eopgap::cli::main_with(eopgap::cli::Cli::parse()));
}
