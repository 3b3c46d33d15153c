use parapam::besov::{localize, lp_blocks, CutoffProfile, DyadicPartition};
use parapam::calibration::random_field;
use parapam::noise::{mollify, sample_white_noise, Mollifier};
use parapam::paracalc::{bony, para_lo, para_res};
use parapam::spectral::{dealiased_product, forward_transform, SpectralField, TorusGrid};
use proptest::prelude::*;

fn partition(n: usize) -> DyadicPartition {
    DyadicPartition::build(TorusGrid::new(n).unwrap(), CutoffProfile::default()).unwrap()
}

fn field(seed: u64, n: usize, decay: f64) -> SpectralField {
    random_field(seed, TorusGrid::new(n).unwrap(), decay)
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.max_coeff_diff(b) / (1e-300 + b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max))
}

fn grid_size() -> impl Strategy<Value = usize> {
    prop_oneof![Just(16usize), Just(32), Just(64)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocks_reconstruct(seed in 0u64..1_000_000, n in grid_size(), decay in 0.0f64..3.0) {
        let p = partition(n);
        let u = field(seed, n, decay);
        let mut sum = SpectralField::zeros(p.grid());
        for b in lp_blocks(&p, &u).unwrap() {
            sum += &b;
        }
        prop_assert!(rel(&sum, &u) < 1e-12);
    }

    #[test]
    fn bony_is_exact(seed in 0u64..1_000_000, n in grid_size(), da in 0.0f64..3.0, db in 0.0f64..3.0) {
        let p = partition(n);
        let u = field(seed, n, da);
        let v = field(seed + 7, n, db);
        let [lo, res, hi] = bony(&p, &u, &v).unwrap();
        let sum = &(&lo + &res) + &hi;
        let uv = dealiased_product(&u, &v).unwrap();
        prop_assert!(rel(&sum, &uv) < 1e-12);
    }

    #[test]
    fn paraproducts_are_bilinear(seed in 0u64..1_000_000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = partition(32);
        let u1 = field(seed, 32, 1.0);
        let u2 = field(seed + 1, 32, 2.0);
        let v = field(seed + 2, 32, 0.5);
        let mix = &(&u1 * a) + &(&u2 * b);
        for op in [para_lo, para_res] {
            let lhs = op(&p, &mix, &v).unwrap();
            let rhs = &(&op(&p, &u1, &v).unwrap() * a) + &(&op(&p, &u2, &v).unwrap() * b);
            prop_assert!(rel(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn localizers_sum_to_identity(seed in 0u64..1_000_000, n_loc in -1.0f64..6.0, gamma in 0.1f64..3.0) {
        let p = partition(32);
        let u = field(seed, 32, 1.0);
        let (low, high) = localize(&p, &u, n_loc, gamma).unwrap();
        prop_assert!(rel(&(&low + &high), &u) < 1e-12);
    }

    #[test]
    fn transform_round_trip(seed in 0u64..1_000_000, n in grid_size()) {
        let u = field(seed, n, 1.0);
        let back = forward_transform(u.grid(), &u.to_values()).unwrap();
        prop_assert!(rel(&back, &u) < 1e-12);
    }

    #[test]
    fn white_noise_is_real_and_seeded(seed in 0u64..1_000_000) {
        let g = TorusGrid::new(16).unwrap();
        let a = sample_white_noise(seed, g);
        prop_assert_eq!(a.xi.hermitian_defect(), 0.0);
        prop_assert_eq!(&a, &sample_white_noise(seed, g));
    }

    #[test]
    fn mollifier_contracts(seed in 0u64..1_000_000, eps in 0.01f64..0.5) {
        let xi = sample_white_noise(seed, TorusGrid::new(32).unwrap()).xi;
        let m = mollify(&xi, eps, Mollifier::default()).unwrap();
        prop_assert!(m.l2_norm() <= xi.l2_norm() * (1.0 + 1e-12));
    }
}
