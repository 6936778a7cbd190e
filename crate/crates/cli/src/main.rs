fn main() {
    std::process::exit(dalembert_cli::run(std::env::args_os()));
}
