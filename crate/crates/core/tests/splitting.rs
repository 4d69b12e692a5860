mod common;

use amli_iga::geometry::{make_domain, Domain};
use amli_iga::linalg::dense::to_dmatrix;
use amli_iga::linalg::{CsrMatrix, DenseLu, LanczosOptions};
use amli_iga::splines::{Continuity, SplineSpace};
use amli_iga::splitting::{
    admissible_nu, cbs_gamma_sq, complement_1d, hb_blocks, hb_blocks_from_j, level_transfer,
    optimality_range, Choice, Form,
};
use common::{dot, stiffness};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> LanczosOptions {
    LanczosOptions {
        tol: 1e-8,
        ..LanczosOptions::default()
    }
}

fn supported() -> Vec<(usize, Continuity, Choice)> {
    let mut out = Vec::new();
    for p in 2..=4 {
        for r in [Continuity::C0, Continuity::Cpm1] {
            for c in [Choice::First, Choice::Second] {
                if !(p == 4 && r == Continuity::Cpm1 && c == Choice::Second) {
                    out.push((p, r, c));
                }
            }
        }
    }
    out
}

fn case() -> impl Strategy<Value = (usize, Continuity, Choice)> {
    proptest::sample::select(supported())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_is_invertible((p, r, c) in case(), k in 3usize..=4, annulus in any::<bool>()) {
        let domain = if annulus { Domain::QuarterAnnulus } else { Domain::Square };
        let tr = level_transfer(&make_domain(domain), p, r, k, c).unwrap();
        let t = &tr.transform;
        let n_fine: usize = (SplineSpace::new(p, r, k).unwrap().dim() - 2).pow(2);
        let n_coarse: usize = (SplineSpace::new(p, r, k - 1).unwrap().dim() - 2).pow(2);
        prop_assert_eq!(t.dim(), n_fine);
        prop_assert_eq!(t.coarse_count(), n_coarse);
        prop_assert!(t.sigma_min > 1e-8);
        let j = to_dmatrix(&t.j());
        prop_assert!(DenseLu::new(j.clone()).is_ok());
        let sv = j.singular_values();
        prop_assert!(sv.min() > 1e-8);
    }

    #[test]
    fn gamma_is_invariant_under_diagonal_rescaling((p, r, c) in case(), seed in any::<u64>()) {
        let k = 3;
        let patch = make_domain(Domain::Square);
        let a = stiffness(Domain::Square, p, r, k, p + 1);
        let tr = level_transfer(&patch, p, r, k, c).unwrap();
        let base = cbs_gamma_sq(&hb_blocks(&a, &tr.transform).unwrap(), None, opts()).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: Vec<f64> = (0..tr.transform.dim()).map(|_| rng.gen_range(0.2..5.0)).collect();
        let scaled = CsrMatrix::diagonal(&d).matmul(&tr.transform.j()).unwrap();
        let blocks = hb_blocks_from_j(&a, &scaled, tr.transform.coarse_count()).unwrap();
        let g = cbs_gamma_sq(&blocks, None, opts()).unwrap().value;
        prop_assert!((g - base).abs() < 1e-6 * (1.0 + base), "{} vs {}", g, base);
    }

    #[test]
    fn sampled_cosines_stay_below_gamma((p, r, c) in case(), seed in any::<u64>()) {
        let k = 3;
        let patch = make_domain(Domain::QuarterAnnulus);
        let a = stiffness(Domain::QuarterAnnulus, p, r, k, p + 1);
        let tr = level_transfer(&patch, p, r, k, c).unwrap();
        let blocks = hb_blocks(&a, &tr.transform).unwrap();
        let gamma = cbs_gamma_sq(&blocks, None, opts()).unwrap().value.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let v1: Vec<f64> = (0..blocks.n1()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v2: Vec<f64> = (0..blocks.n2()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let num = dot(&v1, &blocks.a12.mul_vec(&v2)).abs();
            let den = (dot(&v1, &blocks.a11.mul_vec(&v1)) * dot(&v2, &blocks.a22.mul_vec(&v2))).sqrt();
            prop_assert!(num / den <= gamma + 1e-6);
        }
    }

    #[test]
    fn optimal_range_is_consistent(g in 0.0f64..0.99, tau in 1.01f64..10.0) {
        match optimality_range(g, tau, Form::Multiplicative) {
            Ok((lo, hi)) => {
                prop_assert!((lo - 1.0 / (1.0 - g).sqrt()).abs() < 1e-14);
                prop_assert_eq!(hi, tau);
                for nu in admissible_nu(lo, hi) {
                    prop_assert!((nu as f64) > lo && (nu as f64) < hi);
                }
            }
            Err(_) => prop_assert!(1.0 / (1.0 - g).sqrt() >= tau),
        }
        if let Ok((lo_add, _)) = optimality_range(g, tau, Form::Additive) {
            // the additive bound is never weaker
            prop_assert!(lo_add >= 1.0 / (1.0 - g).sqrt() - 1e-12);
        }
    }
}

#[test]
fn complement_shapes() {
    for (p, r, c) in supported() {
        for k in 3..=7 {
            let t = complement_1d(p, r, k, c).unwrap().t;
            let mf = SplineSpace::new(p, r, k).unwrap().dim();
            let mc = SplineSpace::new(p, r, k - 1).unwrap().dim();
            assert_eq!((t.rows(), t.cols()), (mf - mc, mf), "p={p} {r} {c}");
        }
    }
    assert!(complement_1d(4, Continuity::Cpm1, 4, Choice::Second).is_err());
}

#[test]
fn printed_c0_quadratic_first_block() {
    let t = complement_1d(2, Continuity::C0, 2, Choice::First).unwrap().t;
    assert_eq!(
        t.to_dense(),
        vec![vec![0.0, 1.0, -0.25, 0.0, 0.0], vec![0.0, 0.0, -0.25, 1.0, 0.0]]
    );
}

#[test]
fn optimality_range_examples() {
    let (lo, _) = optimality_range(0.0, 4.0, Form::Multiplicative).unwrap();
    assert_eq!(lo, 1.0);
    let (lo, hi) = optimality_range(0.75, 4.0, Form::Multiplicative).unwrap();
    assert!((lo - 2.0).abs() < 1e-14);
    let nus = admissible_nu(lo, hi);
    assert!(nus.contains(&3));
    assert!(!nus.contains(&2));
    assert!(optimality_range(0.96, 4.0, Form::Multiplicative).is_err());
    assert!(optimality_range(1.0, 4.0, Form::Multiplicative).is_err());
    assert!(optimality_range(0.5, 1.0, Form::Multiplicative).is_err());
}

#[test]
fn choice_names() {
    assert_eq!("1".parse::<Choice>().unwrap(), Choice::First);
    assert_eq!("second".parse::<Choice>().unwrap(), Choice::Second);
    assert!("3".parse::<Choice>().is_err());
}
