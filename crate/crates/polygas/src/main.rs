use clap::Parser;

fn main() {
    let cli = polygas::cli::Cli::parse();
    match polygas::cli::run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
