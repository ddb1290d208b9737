use clap::Parser;

fn main() {
    let code = kronecker_cli::run(kronecker_cli::Cli::parse());
    std::process::exit(code);
}
