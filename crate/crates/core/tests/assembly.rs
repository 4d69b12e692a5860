mod common;

use amli_iga::assembly::{
    assemble, assemble_full, boundary_dofs, gauss_legendre, interior_dofs, TensorSpace,
};
use amli_iga::geometry::{make_domain, manufactured_problem, Domain, Example, NurbsPatch};
use amli_iga::linalg::{pcg, Ilu0};
use amli_iga::splines::Continuity;
use common::{galerkin_defect, stiffness};
use proptest::prelude::*;

/// `max |u_h - u|` over a parameter grid.
fn max_error(patch: &NurbsPatch, space: &TensorSpace, coeffs: &[f64], ex: Example) -> f64 {
    let prob = manufactured_problem(ex);
    let dims = space.dims();
    let mut worst = 0.0f64;
    for i in 0..=16 {
        for j in 0..=16 {
            let xi = [i as f64 / 16.0, j as f64 / 16.0];
            let (f0, v0, _) = space.eval_1d(0, xi[0]).unwrap();
            let (f1, v1, _) = space.eval_1d(1, xi[1]).unwrap();
            let mut uh = 0.0;
            for (a, va) in v0.iter().enumerate() {
                for (b, vb) in v1.iter().enumerate() {
                    uh += coeffs[(f0 + a) * dims[1] + f1 + b] * va * vb;
                }
            }
            let (x, _) = patch.map_point(&xi).unwrap();
            worst = worst.max((uh - prob.exact(&x)).abs());
        }
    }
    worst
}

fn solve_error(ex: Example, p: usize, r: Continuity, level: usize) -> f64 {
    let patch = make_domain(ex.domain());
    let space = TensorSpace::new(&patch, p, r, level).unwrap();
    let sys = assemble(&patch, &space, &manufactured_problem(ex), p + 2).unwrap();
    let ilu = Ilu0::new(&sys.a).unwrap();
    let mut pre = |v: &[f64], z: &mut [f64]| ilu.apply(v, z);
    let (u, rep) = pcg(&sys.a, &mut pre, &sys.f, 1e-13, 2000);
    assert!(rep.converged);
    max_error(&patch, &space, &sys.expand(&u), ex)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stiffness_is_symmetric_with_zero_row_sums(
        p in 2usize..=4,
        r in prop_oneof![Just(Continuity::C0), Just(Continuity::Cpm1)],
        level in 1usize..=4,
        annulus in any::<bool>(),
    ) {
        let patch = make_domain(if annulus { Domain::QuarterAnnulus } else { Domain::Square });
        let space = TensorSpace::new(&patch, p, r, level).unwrap();
        let (a, _) = assemble_full(&patch, &space, |_| 0.0, p + 1).unwrap();
        let scale = a.max_abs();
        prop_assert!(a.symmetry_defect() <= 1e-13 * scale);
        for s in a.row_sums() {
            prop_assert!(s.abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
    for n in 1..=8 {
        let (x, w) = gauss_legendre(n);
        for deg in 0..2 * n {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg + 1) as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}");
        }
    }
}

#[test]
fn insufficient_quadrature_is_rejected() {
    let patch = make_domain(Domain::Square);
    let space = TensorSpace::new(&patch, 3, Continuity::Cpm1, 2).unwrap();
    assert!(assemble_full(&patch, &space, |_| 0.0, 3).is_err());
    assert!(assemble_full(&patch, &space, |_| 0.0, 4).is_ok());
}

#[test]
fn quadrature_beyond_p_plus_one_changes_nothing_on_the_square() {
    for p in 2..=4 {
        let a = stiffness(Domain::Square, p, Continuity::Cpm1, 3, p + 1);
        let b = stiffness(Domain::Square, p, Continuity::Cpm1, 3, p + 4);
        assert!(a.add(-1.0, &b).unwrap().max_abs() < 1e-13 * a.max_abs());
    }
}

#[test]
fn boundary_and_interior_partition_the_space() {
    let patch = make_domain(Domain::QuarterThickRing);
    let space = TensorSpace::new(&patch, 2, Continuity::C0, 2).unwrap();
    let b = boundary_dofs(&space);
    let i = interior_dofs(&space);
    assert_eq!(b.len() + i.len(), space.len());
    assert_eq!(i.len(), 3 * 3 * 3);
}

#[test]
fn galerkin_nesting_on_the_square() {
    for p in 2..=4 {
        for r in [Continuity::C0, Continuity::Cpm1] {
            for k in 2..=5 {
                let d = galerkin_defect(Domain::Square, p, r, k, p + 1);
                assert!(d < 1e-10, "p={p} {r} k={k}: {d:e}");
            }
        }
    }
}

#[test]
fn galerkin_nesting_on_the_annulus() {
    for p in 2..=3 {
        for r in [Continuity::C0, Continuity::Cpm1] {
            for k in 2..=4 {
                let d = galerkin_defect(Domain::QuarterAnnulus, p, r, k, p + 8);
                assert!(d < 1e-10, "p={p} {r} k={k}: {d:e}");
            }
        }
    }
}

#[test]
fn discretization_error_decays_at_order_p_plus_one() {
    for ex in [Example::Ex1, Example::Ex2] {
        for p in 2..=3 {
            for r in [Continuity::C0, Continuity::Cpm1] {
                let e1 = solve_error(ex, p, r, 3);
                let e2 = solve_error(ex, p, r, 4);
                let rate = (e1 / e2).log2();
                assert!(rate > p as f64 + 0.5, "{ex:?} p={p} {r}: {e1:e} -> {e2:e}");
            }
        }
    }
}
