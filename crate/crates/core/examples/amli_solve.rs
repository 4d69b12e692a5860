//! Solve one of the test problems with the AMLI cycles and print a table.
//!
//! Usage: `amli_solve [example] [p] [c0|cpm1] [1|2] [refinements] [cycles]`
//! e.g. `amli_solve 1 2 cpm1 1 4 l1,l2,n2`

use std::env;

use amli_iga::amli::Cycle;
use amli_iga::experiment::{run_row, ExperimentConfig};
use amli_iga::geometry::Example;

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let get = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let example = Example::from_number(get(0, "1").parse().expect("example number"))?;
    let mut cfg = ExperimentConfig::new(
        example,
        get(1, "2").parse().expect("degree"),
        get(2, "cpm1").parse()?,
        get(3, "1").parse()?,
    );
    cfg.levels = get(4, "3").parse().expect("refinements");
    cfg.cycles = get(5, "l1,l2,n2")
        .split(',')
        .map(str::parse::<Cycle>)
        .collect::<amli_iga::Result<_>>()?;
    cfg.validate()?;
    println!("{:>6} {:>8} {:>8}  cycles (n_it / rho)", "1/h", "dofs", "t_c");
    for row in 1..=cfg.levels {
        let r = run_row(&cfg, row)?;
        let cells: Vec<String> = r
            .results
            .iter()
            .map(|c| format!("{}: {:>3} / {:.4}{}", c.cycle, c.n_it, c.rho, if c.converged { "" } else { "*" }))
            .collect();
        println!("{:>6} {:>8} {:>8.2}  {}", r.one_over_h, r.dofs, r.t_c, cells.join("   "));
    }
    Ok(())
}
