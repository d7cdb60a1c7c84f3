fn main() {
    std::process::exit(sem_matroid_cli::run(std::env::args_os()));
}
