//! Evaluate a uniform B-spline basis by recursion and by the closed-form
//! expressions in `h`, and print both side by side.
//!
//! Usage: `basis_evaluation [p] [c0|cpm1] [level] [x]`

use std::env;

use amli_iga::splines::{eval_explicit, Continuity, SplineSpace};

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let p: usize = args.first().map_or(3, |s| s.parse().expect("degree"));
    let r: Continuity = args.get(1).map_or("cpm1", String::as_str).parse()?;
    let level: usize = args.get(2).map_or(3, |s| s.parse().expect("level"));
    let x: f64 = args.get(3).map_or(0.3, |s| s.parse().expect("point"));

    let space = SplineSpace::new(p, r, level)?;
    println!("p = {p}, {r}, level {level}: {} functions, h = {}", space.dim(), space.h());
    let (first, values) = space.eval_basis(x)?;
    println!("{:>4} {:>22} {:>22}", "i", "Cox-de Boor", "explicit");
    for (a, v) in values.iter().enumerate() {
        let i = first + a;
        println!("{i:>4} {v:>22.16} {:>22.16}", eval_explicit(p, r, level, i, x)?);
    }
    println!("sum = {}", values.iter().sum::<f64>());
    Ok(())
}
