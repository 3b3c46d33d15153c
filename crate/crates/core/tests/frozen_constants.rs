use parapam::calibration::{calibrate_all, calibration_seeds, ConstantsFile, Inequality, RunConstant, INEQUALITY_SEEDS};

#[test]
fn shipped_file_is_complete() {
    let f = ConstantsFile::frozen();
    assert_eq!(f.margin, 2.0);
    for name in Inequality::ALL.iter().map(|i| i.name()).chain(RunConstant::ALL.iter().map(|c| c.name())) {
        let c = f.get(name).unwrap();
        assert!(c.value.is_finite(), "{name}");
        assert!(c.median <= c.value, "{name}");
        assert!(c.seeds.iter().all(|s| *s < 2000), "{name} fitted on validation seeds");
    }
}

#[test]
fn inequality_constants_refit_identically() {
    let frozen = ConstantsFile::frozen();
    let fresh = calibrate_all(false).unwrap();
    assert_eq!(fresh.constants.len(), Inequality::ALL.len());
    for (name, c) in &fresh.constants {
        let old = frozen.get(name).unwrap();
        assert_eq!(c.seeds, calibration_seeds(INEQUALITY_SEEDS));
        assert_eq!(c.value.to_bits(), old.value.to_bits(), "{name}: {} vs frozen {}", c.value, old.value);
        assert_eq!(c.samples, old.samples, "{name}");
    }
}

#[test]
fn file_round_trips() {
    let f = ConstantsFile::frozen();
    assert_eq!(ConstantsFile::from_json(&f.to_json().unwrap()).unwrap(), f);
}
