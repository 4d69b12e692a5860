//! Print the restriction operator `G_k` between two dyadic levels and check
//! that it rebuilds the coarse basis from the fine one.
//!
//! Usage: `restriction_operators [p] [c0|cpm1] [k]`

use std::env;

use amli_iga::splines::{Continuity, SplineSpace};
use amli_iga::transfer::restriction_1d;

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let p: usize = args.first().map_or(2, |s| s.parse().expect("degree"));
    let r: Continuity = args.get(1).map_or("cpm1", String::as_str).parse()?;
    let k: usize = args.get(2).map_or(3, |s| s.parse().expect("level"));

    let g = restriction_1d(p, r, k)?.g;
    println!("G_{k} for p = {p}, {r}: {} x {}", g.rows(), g.cols());
    for row in g.to_dense() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:7.4}")).collect();
        println!("  {}", cells.join(" "));
    }

    let coarse = SplineSpace::new(p, r, k - 1)?;
    let fine = SplineSpace::new(p, r, k)?;
    let mut worst = 0.0f64;
    for j in 0..=200 {
        let x = j as f64 / 200.0;
        let rebuilt = g.mul_vec(&fine.eval_dense(x)?);
        for (a, b) in coarse.eval_dense(x)?.iter().zip(&rebuilt) {
            worst = worst.max((a - b).abs());
        }
    }
    println!("max |B_(k-1) - G B_k| on 201 points: {worst:.2e}");
    Ok(())
}
