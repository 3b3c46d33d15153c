//! Regenerate constants/frozen.json: `cargo run --release -p parapam --example calibrate [--no-runs]`.
fn main() {
    let runs = !std::env::args().any(|a| a == "--no-runs");
    let file = parapam::calibration::calibrate_all(runs).expect("calibration");
    print!("{}", file.to_json().expect("serialise"));
}
