//! Export the operators of one experiment row as Matrix Market files and
//! read the stiffness matrix back.
//!
//! Usage: `matrix_market_export [dir] [example] [p] [c0|cpm1] [1|2]`

use std::env;

use amli_iga::experiment::{export_operators, ExperimentConfig};
use amli_iga::geometry::Example;
use amli_iga::linalg::matrix_market::read_matrix;

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let dir = args.first().cloned().unwrap_or_else(|| "amli_ops".to_string());
    let example = Example::from_number(args.get(1).map_or(2, |s| s.parse().expect("example")))?;
    let mut cfg = ExperimentConfig::new(
        example,
        args.get(2).map_or(2, |s| s.parse().expect("degree")),
        args.get(3).map_or("c0", String::as_str).parse()?,
        args.get(4).map_or("1", String::as_str).parse()?,
    );
    cfg.levels = 1;
    let files = export_operators(&cfg, &dir)?;
    println!("wrote {} files to {dir}: {}", files.len(), files.join(" "));
    if let Some(name) = files.iter().find(|f| f.starts_with("A_")) {
        let a = read_matrix(std::path::Path::new(&dir).join(name))?;
        println!("{name}: {} x {}, nnz {}, symmetry defect {:.1e}", a.rows(), a.cols(), a.nnz(), a.symmetry_defect());
    }
    Ok(())
}
