//! CBS constant and conditioning of the complement block for one splitting.
//!
//! Usage: `splitting_quality [square|annulus] [p] [c0|cpm1] [1|2] [1/h ...]`

use std::env;
use std::time::Instant;

use amli_iga::assembly::{assemble_with, TensorSpace};
use amli_iga::experiment::quality_lanczos;
use amli_iga::geometry::{make_domain, Domain};
use amli_iga::splines::Continuity;
use amli_iga::splitting::{
    cbs_gamma_sq, cond_a11, hb_blocks, level_transfer, write_quality_csv, Choice, QualityRecord,
};

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let domain: Domain = args.first().map_or("square", String::as_str).parse()?;
    let p: usize = args.get(1).map_or(Ok(2), |s| s.parse()).expect("degree");
    let r: Continuity = args.get(2).map_or("cpm1", String::as_str).parse()?;
    let choice: Choice = args.get(3).map_or("1", String::as_str).parse()?;
    let hs: Vec<usize> = if args.len() > 4 {
        args[4..].iter().map(|s| s.parse().expect("1/h")).collect()
    } else {
        vec![8, 16]
    };
    let patch = make_domain(domain);
    let mut records = Vec::new();
    for inv_h in hs {
        let start = Instant::now();
        let k = inv_h.trailing_zeros() as usize + 1;
        let space = TensorSpace::new(&patch, p, r, k)?;
        let sys = assemble_with(&patch, &space, |_| 0.0, |_| 0.0, p + 1)?;
        let tr = level_transfer(&patch, p, r, k, choice)?;
        let blocks = hb_blocks(&sys.a, &tr.transform)?;
        let g = cbs_gamma_sq(&blocks, None, quality_lanczos())?;
        let (kappa, _, _) = cond_a11(&blocks, quality_lanczos())?;
        eprintln!("1/h = {inv_h}: γ² = {:.4}, κ = {kappa:.1} ({:.1}s)", g.value, start.elapsed().as_secs_f64());
        records.push(QualityRecord {
            domain,
            p,
            r,
            choice,
            one_over_h: inv_h,
            gamma_sq: g.value,
            kappa_a11: kappa,
        });
    }
    write_quality_csv(std::io::stdout(), &records)
}
