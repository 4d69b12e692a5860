//! Map parameter points through the NURBS test geometries and show that the
//! analysis weights reproduce the geometry weight after refinement.
//!
//! Usage: `nurbs_geometry [square|annulus|ring] [p] [c0|cpm1] [level]`

use std::env;

use amli_iga::geometry::{analysis_weights, make_domain, Domain};
use amli_iga::splines::{Continuity, SplineSpace};

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let domain: Domain = args.first().map_or("annulus", String::as_str).parse()?;
    let p: usize = args.get(1).map_or(2, |s| s.parse().expect("degree"));
    let r: Continuity = args.get(2).map_or("cpm1", String::as_str).parse()?;
    let level: usize = args.get(3).map_or(3, |s| s.parse().expect("level"));

    let patch = make_domain(domain);
    let d = patch.dim();
    println!("{domain}: {d}D patch, {} control points", patch.control_points().len());
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let xi = vec![t; d];
        let (x, jac) = patch.map_point(&xi)?;
        println!("  F({xi:?}) = {x:.6?}, det J = {:.6}", amli_iga::geometry::determinant(&jac));
    }

    // the weight function of each direction, on the geometry mesh and on the
    // refined analysis mesh
    let weights = analysis_weights(&patch, p, r, level)?;
    let analysis = SplineSpace::new(p, r, level)?;
    for (dir, (w, geo_w)) in weights.iter().zip(patch.dir_weights()).enumerate() {
        let geo = &patch.spaces()[dir];
        let mut worst = 0.0f64;
        for j in 0..=100 {
            let t = j as f64 / 100.0;
            let wa: f64 = analysis.eval_dense(t)?.iter().zip(w).map(|(b, w)| b * w).sum();
            let wg: f64 = geo.eval_dense(t)?.iter().zip(geo_w).map(|(b, w)| b * w).sum();
            worst = worst.max((wa - wg).abs());
        }
        println!("  direction {dir}: {} analysis weights, max weight-function change {worst:.2e}", w.len());
    }
    Ok(())
}
