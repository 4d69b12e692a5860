use amli_iga::geometry::{
    analysis_weights, determinant, make_domain, manufactured_problem, rational_1d, Domain, Example,
};
use amli_iga::splines::{Continuity, SplineSpace};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn continuity() -> impl Strategy<Value = Continuity> {
    prop_oneof![Just(Continuity::C0), Just(Continuity::Cpm1)]
}

/// Second-order central difference Laplacian.
fn fd_laplacian(u: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let h = 1e-4;
    let mut lap = 0.0;
    for a in 0..x.len() {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[a] += h;
        m[a] -= h;
        lap += (u(&p) - 2.0 * u(x) + u(&m)) / (h * h);
    }
    lap
}

proptest! {
    #[test]
    fn annulus_radius_is_affine_in_the_radial_parameter(s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let patch = make_domain(Domain::QuarterAnnulus);
        let (x, _) = patch.map_point(&[s, t]).unwrap();
        let radius = (x[0] * x[0] + x[1] * x[1]).sqrt();
        prop_assert!((radius - (1.0 + s)).abs() < 1e-13);
        prop_assert!(x[0] >= -1e-15 && x[1] >= -1e-15);
    }

    #[test]
    fn ring_is_an_extruded_annulus(s in 0.0f64..=1.0, t in 0.0f64..=1.0, z in 0.0f64..=1.0) {
        let patch = make_domain(Domain::QuarterThickRing);
        let (x, jac) = patch.map_point(&[s, t, z]).unwrap();
        let radius = (x[0] * x[0] + x[1] * x[1]).sqrt();
        prop_assert!((radius - (1.0 + s)).abs() < 1e-13);
        prop_assert!((x[2] - z).abs() < 1e-14);
        prop_assert!(determinant(&jac) > 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences(s in 0.05f64..0.95, t in 0.05f64..0.95) {
        let patch = make_domain(Domain::QuarterAnnulus);
        let (_, jac) = patch.map_point(&[s, t]).unwrap();
        let h = 1e-6;
        for b in 0..2 {
            let mut p = [s, t];
            let mut m = [s, t];
            p[b] += h;
            m[b] -= h;
            let (xp, _) = patch.map_point(&p).unwrap();
            let (xm, _) = patch.map_point(&m).unwrap();
            for a in 0..2 {
                let fd = (xp[a] - xm[a]) / (2.0 * h);
                prop_assert!((fd - jac[a][b]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn analysis_weights_reproduce_the_geometry_weight(p in 2usize..=4, r in continuity(), level in 1usize..=5, t in 0.0f64..=1.0) {
        let patch = make_domain(Domain::QuarterAnnulus);
        let w = analysis_weights(&patch, p, r, level).unwrap();
        let geo = &patch.spaces()[1];
        let w_geo = &patch.dir_weights()[1];
        let bg = geo.eval_dense(t).unwrap();
        let before: f64 = bg.iter().zip(w_geo).map(|(b, w)| b * w).sum();
        let space = SplineSpace::new(p, r, level).unwrap();
        let ba = space.eval_dense(t).unwrap();
        let after: f64 = ba.iter().zip(&w[1]).map(|(b, w)| b * w).sum();
        prop_assert!((before - after).abs() < 1e-13);
        prop_assert!(w[0].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rational_basis_is_a_partition_of_unity(p in 2usize..=4, r in continuity(), level in 1usize..=5, t in 0.0f64..=1.0) {
        let patch = make_domain(Domain::QuarterAnnulus);
        let w = analysis_weights(&patch, p, r, level).unwrap();
        let space = SplineSpace::new(p, r, level).unwrap();
        let (_, vals, ders) = rational_1d(&space, &w[1], t).unwrap();
        prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        prop_assert!(ders.iter().sum::<f64>().abs() < 1e-10 * space.n_spans() as f64);
    }

    #[test]
    fn manufactured_sources_match_finite_differences(a in 0.1f64..0.9, b in 0.1f64..0.9, c in 0.1f64..0.9) {
        for ex in [Example::Ex1, Example::Ex2, Example::Ex3] {
            let patch = make_domain(ex.domain());
            let xi: Vec<f64> = [a, b, c][..patch.dim()].to_vec();
            let (x, _) = patch.map_point(&xi).unwrap();
            let prob = manufactured_problem(ex);
            let fd = -fd_laplacian(|y| prob.exact(y), &x);
            let f = prob.source(&x);
            prop_assert!((fd - f).abs() < 1e-5 * (1.0 + f.abs()), "{:?}: fd {} closed {}", ex, fd, f);
        }
    }
}

#[test]
fn corners_of_the_examples() {
    let square = make_domain(Domain::Square);
    assert_eq!(square.map_point(&[1.0, 0.0]).unwrap().0, vec![1.0, 0.0]);
    let annulus = make_domain(Domain::QuarterAnnulus);
    let (x, _) = annulus.map_point(&[0.0, 1.0]).unwrap();
    assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-15);
    let (x, _) = annulus.map_point(&[1.0, 0.5]).unwrap();
    assert_abs_diff_eq!(x[0], 2.0_f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(x[1], 2.0_f64.sqrt(), epsilon = 1e-14);
}

#[test]
fn example_two_vanishes_on_the_boundary() {
    let prob = manufactured_problem(Example::Ex2);
    let patch = make_domain(Domain::QuarterAnnulus);
    for j in 0..=20 {
        let t = j as f64 / 20.0;
        for xi in [[0.0, t], [1.0, t], [t, 0.0], [t, 1.0]] {
            let (x, _) = patch.map_point(&xi).unwrap();
            assert!(prob.exact(&x).abs() < 1e-12);
        }
    }
}

#[test]
fn domain_names() {
    for d in [Domain::Square, Domain::QuarterAnnulus, Domain::QuarterThickRing] {
        assert_eq!(d.to_string().parse::<Domain>().unwrap(), d);
    }
    assert_eq!("annulus".parse::<Domain>().unwrap(), Domain::QuarterAnnulus);
    assert!("disk".parse::<Domain>().is_err());
    assert!(Example::from_number(4).is_err());
}
