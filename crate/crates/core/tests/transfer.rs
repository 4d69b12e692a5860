mod common;

use amli_iga::linalg::CsrMatrix;
use amli_iga::splines::{Continuity, SplineSpace};
use amli_iga::transfer::{interior_1d, nurbs_restriction, refine_weights, restriction_1d};
use proptest::prelude::*;

fn continuity() -> impl Strategy<Value = Continuity> {
    prop_oneof![Just(Continuity::C0), Just(Continuity::Cpm1)]
}

fn max_reconstruction_error(g: &CsrMatrix, coarse: &SplineSpace, fine: &SplineSpace, x: f64) -> f64 {
    let bc = coarse.eval_dense(x).unwrap();
    let bf = fine.eval_dense(x).unwrap();
    let rebuilt = g.mul_vec(&bf);
    bc.iter()
        .zip(&rebuilt)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn restriction_reproduces_coarse_basis(p in 2usize..=4, r in continuity(), k in 2usize..=9, x in 0.0f64..=1.0) {
        let g = restriction_1d(p, r, k).unwrap().g;
        let coarse = SplineSpace::new(p, r, k - 1).unwrap();
        let fine = SplineSpace::new(p, r, k).unwrap();
        prop_assert_eq!((g.rows(), g.cols()), (coarse.dim(), fine.dim()));
        prop_assert!(max_reconstruction_error(&g, &coarse, &fine, x) < 1e-12);
    }

    #[test]
    fn weight_function_is_invariant_under_refinement(
        p in 2usize..=4,
        r in continuity(),
        k in 2usize..=7,
        seed in any::<u64>(),
        x in 0.0f64..=1.0,
    ) {
        let coarse = SplineSpace::new(p, r, k - 1).unwrap();
        let fine = SplineSpace::new(p, r, k).unwrap();
        let g = restriction_1d(p, r, k).unwrap().g;
        let w: Vec<f64> = (0..coarse.dim())
            .map(|i| 0.5 + ((seed.wrapping_mul(i as u64 + 1) >> 11) % 1000) as f64 / 1000.0)
            .collect();
        let wf = refine_weights(&g, &w).unwrap();
        let before: f64 = coarse.eval_dense(x).unwrap().iter().zip(&w).map(|(b, w)| b * w).sum();
        let after: f64 = fine.eval_dense(x).unwrap().iter().zip(&wf).map(|(b, w)| b * w).sum();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn nurbs_restriction_reproduces_coarse_nurbs(
        p in 2usize..=4,
        r in continuity(),
        k in 2usize..=6,
        seed in any::<u64>(),
        x in 0.0f64..=1.0,
    ) {
        let coarse = SplineSpace::new(p, r, k - 1).unwrap();
        let fine = SplineSpace::new(p, r, k).unwrap();
        let g = restriction_1d(p, r, k).unwrap().g;
        let w: Vec<f64> = (0..coarse.dim())
            .map(|i| 0.3 + ((seed.rotate_left(i as u32 * 7) >> 13) % 997) as f64 / 997.0)
            .collect();
        let wf = refine_weights(&g, &w).unwrap();
        let rmat = nurbs_restriction(&g, &w).unwrap();
        let rational = |vals: Vec<f64>, w: &[f64]| {
            let den: f64 = vals.iter().zip(w).map(|(b, w)| b * w).sum();
            vals.iter().zip(w).map(|(b, w)| b * w / den).collect::<Vec<_>>()
        };
        let nc = rational(coarse.eval_dense(x).unwrap(), &w);
        let nf = rational(fine.eval_dense(x).unwrap(), &wf);
        let rebuilt = rmat.mul_vec(&nf);
        for (a, b) in nc.iter().zip(&rebuilt) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn columns_sum_to_one() {
    for p in 2..=4 {
        for r in [Continuity::C0, Continuity::Cpm1] {
            for k in 2..=8 {
                let g = restriction_1d(p, r, k).unwrap().g;
                for s in g.col_sums() {
                    assert!((s - 1.0).abs() < 1e-14, "p={p} {r} k={k}");
                }
            }
        }
    }
}

#[test]
fn reconstruction_on_a_grid() {
    for p in 2..=4 {
        for r in [Continuity::C0, Continuity::Cpm1] {
            for k in 2..=8 {
                let g = restriction_1d(p, r, k).unwrap().g;
                let coarse = SplineSpace::new(p, r, k - 1).unwrap();
                let fine = SplineSpace::new(p, r, k).unwrap();
                for j in 0..=400 {
                    let x = j as f64 / 400.0;
                    assert!(max_reconstruction_error(&g, &coarse, &fine, x) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn printed_smooth_operators() {
    let cases = common::printed_smooth_operators();
    for (p, k, expected) in cases {
        let g = restriction_1d(p, Continuity::Cpm1, k).unwrap().g;
        assert_eq!(g.to_dense(), expected, "p={p} k={k}");
    }
}

#[test]
fn printed_smooth_interior_stencils() {
    let cases = common::printed_smooth_stencils();
    for (p, denom, stencil) in cases {
        let g = restriction_1d(p, Continuity::Cpm1, 6).unwrap().g;
        let d = g.to_dense();
        let mid = d.len() / 2;
        let start = d[mid].iter().position(|v| *v != 0.0).unwrap();
        let got: Vec<f64> = d[mid][start..start + stencil.len()].iter().map(|v| v * denom).collect();
        assert_eq!(got, stencil.to_vec(), "p={p}");
        // consecutive interior rows shift by two columns
        let next = d[mid + 1].iter().position(|v| *v != 0.0).unwrap();
        assert_eq!(next, start + 2);
    }
    // first boundary rows of the general-level operators
    let g3 = restriction_1d(3, Continuity::Cpm1, 5).unwrap().g.to_dense();
    assert_eq!(&g3[2][2..6].iter().map(|v| v * 16.).collect::<Vec<_>>(), &[4., 11., 8., 2.]);
    let g4 = restriction_1d(4, Continuity::Cpm1, 5).unwrap().g.to_dense();
    assert_eq!(&g4[2][2..6].iter().map(|v| v * 48.).collect::<Vec<_>>(), &[12., 33., 20., 4.]);
    assert_eq!(&g4[3][3..8].iter().map(|v| v * 48.).collect::<Vec<_>>(), &[6., 25., 29., 15., 3.]);
}

#[test]
fn printed_c0_operators() {
    let cases = common::printed_c0_operators();
    for (p, expected) in cases {
        let g = restriction_1d(p, Continuity::C0, 2).unwrap().g;
        assert_eq!(g.to_dense(), expected, "p={p}");
    }
}

#[test]
fn c0_blocks_overlap_in_one_entry() {
    for p in 2..=4 {
        let block = restriction_1d(p, Continuity::C0, 2).unwrap().g.to_dense();
        let g = restriction_1d(p, Continuity::C0, 4).unwrap().g.to_dense();
        assert_eq!((g.len(), g[0].len()), (4 * p + 1, 8 * p + 1));
        for b in 0..4 {
            for (i, row) in block.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let (gi, gj) = (b * p + i, b * 2 * p + j);
                    // the shared corner belongs to both neighbouring blocks
                    let shared = (i == 0 && j == 0 && b > 0) || (i == p && j == 2 * p && b < 3);
                    if !shared {
                        assert_eq!(g[gi][gj], v, "p={p} block {b} ({i},{j})");
                    }
                }
            }
        }
    }
}

#[test]
fn interior_restriction_drops_boundary_functions() {
    let g = restriction_1d(3, Continuity::Cpm1, 4).unwrap().g;
    let gi = interior_1d(&g);
    assert_eq!((gi.rows(), gi.cols()), (g.rows() - 2, g.cols() - 2));
    // interior coarse functions vanish on the boundary, so their fine
    // expansion never touches the boundary columns
    for i in 1..g.rows() - 1 {
        assert_eq!(g.get(i, 0), 0.0);
        assert_eq!(g.get(i, g.cols() - 1), 0.0);
    }
}

#[test]
fn rejects_unsupported_requests() {
    assert!(restriction_1d(5, Continuity::C0, 3).is_err());
    assert!(restriction_1d(2, Continuity::C0, 1).is_err());
    let g = restriction_1d(2, Continuity::Cpm1, 2).unwrap().g;
    assert!(refine_weights(&g, &[1.0, 1.0]).is_err());
}
