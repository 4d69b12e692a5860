//! Assemble and solve a manufactured Poisson problem with ILU(0)-PCG and
//! report the discretization error on a parameter grid.
//!
//! Usage: `assemble_poisson [example] [p] [c0|cpm1] [level]`

use std::env;

use amli_iga::assembly::{assemble, TensorSpace};
use amli_iga::geometry::{make_domain, manufactured_problem, Example, NurbsPatch};
use amli_iga::linalg::{pcg, Ilu0};
use amli_iga::splines::Continuity;

/// `max |u_h - u|` over a uniform grid of parameter points.
fn max_error(
    patch: &NurbsPatch,
    space: &TensorSpace,
    coeffs: &[f64],
    exact: impl Fn(&[f64]) -> f64,
) -> amli_iga::Result<f64> {
    let d = space.dim();
    let dims = space.dims();
    let m = 12usize;
    let mut worst = 0.0f64;
    for flat in 0..(m + 1).pow(d as u32) {
        let xi: Vec<f64> = (0..d).map(|a| ((flat / (m + 1).pow(a as u32)) % (m + 1)) as f64 / m as f64).collect();
        let local: Vec<(usize, Vec<f64>)> = (0..d)
            .map(|a| space.eval_1d(a, xi[a]).map(|(f, v, _)| (f, v)))
            .collect::<amli_iga::Result<_>>()?;
        let n_local: usize = local.iter().map(|(_, v)| v.len()).product();
        let mut uh = 0.0;
        for t in 0..n_local {
            let (mut rem, mut idx, mut w) = (t, 0usize, 1.0);
            for (a, (first, vals)) in local.iter().enumerate().rev() {
                let j = rem % vals.len();
                rem /= vals.len();
                w *= vals[j];
                let stride: usize = dims[a + 1..].iter().product();
                idx += (first + j) * stride;
            }
            uh += w * coeffs[idx];
        }
        let (x, _) = patch.map_point(&xi)?;
        worst = worst.max((uh - exact(&x)).abs());
    }
    Ok(worst)
}

fn main() -> amli_iga::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let example = Example::from_number(args.first().map_or(1, |s| s.parse().expect("example")))?;
    let p: usize = args.get(1).map_or(2, |s| s.parse().expect("degree"));
    let r: Continuity = args.get(2).map_or("cpm1", String::as_str).parse()?;

    let patch = make_domain(example.domain());
    let problem = manufactured_problem(example);
    let default_levels: &[usize] = if patch.dim() == 3 { &[2, 3] } else { &[3, 4, 5] };
    let levels: Vec<usize> = args.get(3).map_or(default_levels.to_vec(), |s| vec![s.parse().expect("level")]);
    for level in levels {
        let space = TensorSpace::new(&patch, p, r, level)?;
        let sys = assemble(&patch, &space, &problem, p + 2)?;
        let ilu = Ilu0::new(&sys.a)?;
        let mut pre = |v: &[f64], z: &mut [f64]| ilu.apply(v, z);
        let (u, rep) = pcg(&sys.a, &mut pre, &sys.f, 1e-12, 5000);
        let coeffs = sys.expand(&u);
        let worst = max_error(&patch, &space, &coeffs, |x| problem.exact(x))?;
        println!(
            "level {level}: {} unknowns, nnz {}, ILU-PCG {} its, max |u_h - u| on a grid = {worst:.3e}",
            sys.a.rows(),
            sys.a.nnz(),
            rep.n_it
        );
    }
    Ok(())
}
