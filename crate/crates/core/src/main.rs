fn main() {
    std::process::exit(waveguide_hom::cli::run(std::env::args_os()));
}
