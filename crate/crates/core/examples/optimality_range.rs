//! Measure γ² and the coarsening factor of a splitting and list the
//! stabilization degrees ν that keep the AMLI cycle optimal.
//!
//! Usage: `optimality_range [example] [p] [c0|cpm1] [1|2] [refinements]`

use std::env;

use amli_iga::amli::C11Kind;
use amli_iga::experiment::{build_hierarchy, discretize, quality_lanczos, ExperimentConfig};
use amli_iga::geometry::Example;
use amli_iga::splitting::{admissible_nu, optimality_range, Form};

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let example = Example::from_number(args.first().map_or(1, |s| s.parse().expect("example")))?;
    let cfg = ExperimentConfig::new(
        example,
        args.get(1).map_or(4, |s| s.parse().expect("degree")),
        args.get(2).map_or("c0", String::as_str).parse()?,
        args.get(3).map_or("1", String::as_str).parse()?,
    );
    let rows: usize = args.get(4).map_or(2, |s| s.parse().expect("refinements"));
    let disc = discretize(&cfg, cfg.finest_level(rows))?;
    let mut hier = build_hierarchy(&disc, C11Kind::Ilu0)?;
    let top = hier.n_levels() - 1;
    hier.compute_gamma_sq(top, quality_lanczos())?;
    let tau = hier.coarsening_factors();
    for l in 1..=top {
        let g2 = hier.level(l).gamma_sq.expect("measured");
        print!("level {l}: {} unknowns, γ² = {g2:.4}, τ = {:.2}", hier.level(l).dofs(), tau[l - 1]);
        for form in [Form::Multiplicative, Form::Additive] {
            match optimality_range(g2, tau[l - 1], form) {
                Ok((lo, hi)) => print!(", {form:?} ν ∈ ({lo:.3}, {hi:.2}) → {:?}", admissible_nu(lo, hi)),
                Err(_) => print!(", {form:?}: no optimal ν"),
            }
        }
        println!();
    }
    Ok(())
}
