fn main() {
    std::process::exit(fusion_frames::cli::main());
}
