fn main() {
    std::process::exit(ortho2::cli_main());
}
