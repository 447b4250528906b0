fn main() {
    std::process::exit(hems_core::cli::run());
}
