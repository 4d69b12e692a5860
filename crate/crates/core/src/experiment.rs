//! End-to-end runs: assemble, build the hierarchy, solve with each cycle and
//! collect one table row per mesh size.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::amli::{C11Kind, ChebyshevBounds, Cycle, CycleConfig, Hierarchy};
use crate::assembly::{assemble, DiscreteSystem, TensorSpace};
use crate::error::{Error, Result};
use crate::geometry::{make_domain, manufactured_problem, Example, NurbsPatch};
use crate::linalg::{matrix_market, LanczosOptions};
use crate::splines::Continuity;
use crate::splitting::{cond_a11, level_transfer, Choice, LevelTransfer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub example: Example,
    pub degree: usize,
    pub continuity: Continuity,
    pub choice: Choice,
    /// Number of refinements of the coarsest mesh; one row per refinement.
    pub levels: usize,
    pub cycles: Vec<Cycle>,
    pub tol: f64,
    pub max_it: usize,
    /// Also measure `γ²` and `κ(Â₁₁)` on the finest splitting of each row.
    pub quality: bool,
    /// Rows whose finest level would exceed this many unknowns are skipped.
    pub max_dofs: Option<usize>,
    pub bounds: ChebyshevBounds,
}

impl ExperimentConfig {
    pub fn new(example: Example, degree: usize, continuity: Continuity, choice: Choice) -> Self {
        Self {
            example,
            degree,
            continuity,
            choice,
            levels: 3,
            cycles: vec![Cycle::L1],
            tol: 1e-8,
            max_it: 100,
            quality: false,
            max_dofs: None,
            bounds: ChebyshevBounds::Gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.degree) {
            return Err(Error::Config(format!("degree {} not in 2..=4", self.degree)));
        }
        if self.levels == 0 {
            return Err(Error::Config("at least one refinement level".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tolerance {} not in (0, 1)", self.tol)));
        }
        if self.cycles.is_empty() {
            return Err(Error::Config("no cycle selected".into()));
        }
        Ok(())
    }

    /// Dyadic level of the coarsest mesh: `h = 1/4` in 2D, `h = 1/2` in 3D.
    pub fn coarsest_level(&self) -> usize {
        match self.example.domain().dim() {
            3 => 2,
            _ => 3,
        }
    }

    /// Dyadic level of the finest mesh of row `row` (1-based).
    pub fn finest_level(&self, row: usize) -> usize {
        self.coarsest_level() + row
    }

    fn dofs_at(&self, level: usize) -> usize {
        let n = 1usize << (level - 1);
        let m = match self.continuity {
            Continuity::C0 => self.degree * n + 1,
            Continuity::Cpm1 => n + self.degree,
        } - 2;
        m.pow(self.example.domain().dim() as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleResult {
    pub cycle: Cycle,
    pub n_it: usize,
    pub rho: f64,
    pub t_s: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub one_over_h: usize,
    pub dofs: usize,
    pub n_levels: usize,
    pub t_c: f64,
    pub gamma_sq: Option<f64>,
    pub kappa_a11: Option<f64>,
    pub results: Vec<CycleResult>,
    pub skipped: bool,
}

impl TableRow {
    pub fn result(&self, cycle: Cycle) -> Option<&CycleResult> {
        self.results.iter().find(|r| r.cycle == cycle)
    }
    pub fn all_converged(&self) -> bool {
        self.skipped || self.results.iter().all(|r| r.converged)
    }
}

/// Everything built for one mesh size.
pub struct Discretization {
    pub patch: NurbsPatch,
    pub system: DiscreteSystem,
    /// Transfers coarsest first, `transfers[i]` between hierarchy levels
    /// `i` and `i+1`.
    pub transfers: Vec<LevelTransfer>,
}

/// Assemble on dyadic level `finest` and build the transfers down to the
/// coarsest mesh of the example.
pub fn discretize(cfg: &ExperimentConfig, finest: usize) -> Result<Discretization> {
    let patch = make_domain(cfg.example.domain());
    let space = TensorSpace::new(&patch, cfg.degree, cfg.continuity, finest)?;
    let problem = manufactured_problem(cfg.example);
    let system = assemble(&patch, &space, &problem, cfg.degree + 1)?;
    let transfers = (cfg.coarsest_level() + 1..=finest)
        .map(|k| level_transfer(&patch, cfg.degree, cfg.continuity, k, cfg.choice))
        .collect::<Result<Vec<_>>>()?;
    Ok(Discretization {
        patch,
        system,
        transfers,
    })
}

pub fn build_hierarchy(disc: &Discretization, c11: C11Kind) -> Result<Hierarchy> {
    let transforms = disc.transfers.iter().map(|t| t.transform.clone()).collect();
    Hierarchy::setup(disc.system.a.clone(), transforms, c11)
}

/// Like [`build_hierarchy`] but moves the matrices instead of copying them;
/// returns the hierarchy and the load vector. See [`Hierarchy::setup_with`]
/// for `keep_a11`.
pub fn into_hierarchy(disc: Discretization, c11: C11Kind, keep_a11: bool) -> Result<(Hierarchy, Vec<f64>)> {
    let transforms = disc.transfers.into_iter().map(|t| t.transform).collect();
    let hier = Hierarchy::setup_with(disc.system.a, transforms, c11, keep_a11)?;
    Ok((hier, disc.system.f))
}

/// Lanczos settings used for the quality measures.
pub fn quality_lanczos() -> LanczosOptions {
    LanczosOptions {
        tol: 1e-4,
        ..LanczosOptions::default()
    }
}

/// PCG steps behind each Ritz interval estimate.
pub const RITZ_STEPS: usize = 30;

/// One table row for refinement `row` (1-based).
pub fn run_row(cfg: &ExperimentConfig, row: usize) -> Result<TableRow> {
    let finest = cfg.finest_level(row);
    let one_over_h = 1usize << (finest - 1);
    let dofs = cfg.dofs_at(finest);
    if cfg.max_dofs.is_some_and(|m| dofs > m) {
        return Ok(TableRow {
            one_over_h,
            dofs,
            n_levels: row + 1,
            t_c: 0.0,
            gamma_sq: None,
            kappa_a11: None,
            results: Vec::new(),
            skipped: true,
        });
    }
    let start = Instant::now();
    let disc = discretize(cfg, finest)?;
    let needs_gamma = cfg.cycles.iter().any(|c| *c == Cycle::L2);
    let keep_a11 = cfg.quality || (needs_gamma && cfg.bounds == ChebyshevBounds::Gamma);
    let (mut hier, f) = into_hierarchy(disc, C11Kind::Ilu0, keep_a11)?;
    let top = hier.n_levels() - 1;
    if needs_gamma && top >= 2 {
        match cfg.bounds {
            ChebyshevBounds::Gamma => hier.compute_gamma_sq(top - 1, quality_lanczos())?,
            ChebyshevBounds::Ritz => hier.estimate_ritz_bounds(top - 1, 2, RITZ_STEPS)?,
        }
    }
    let t_c = start.elapsed().as_secs_f64();
    let mut gamma_sq = None;
    let mut kappa_a11 = None;
    if cfg.quality {
        hier.compute_gamma_sq(top, quality_lanczos())?;
        gamma_sq = hier.level(top).gamma_sq;
        let blocks = hier.level(top).blocks.as_ref().expect("finest blocks");
        kappa_a11 = Some(cond_a11(blocks, quality_lanczos())?.0);
    }
    let mut results = Vec::with_capacity(cfg.cycles.len());
    for &cycle in &cfg.cycles {
        let cc = CycleConfig::new(cycle);
        let (_, report) = hier.solve(&cc, &f, cfg.tol, cfg.max_it)?;
        results.push(CycleResult {
            cycle,
            n_it: report.n_it,
            rho: report.rho,
            t_s: report.t_s,
            converged: report.converged,
        });
    }
    Ok(TableRow {
        one_over_h,
        dofs: hier.finest().dofs(),
        n_levels: hier.n_levels(),
        t_c,
        gamma_sq,
        kappa_a11,
        results,
        skipped: false,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TableRow>> {
    cfg.validate()?;
    (1..=cfg.levels).map(|row| run_row(cfg, row)).collect()
}

/// CSV header of [`write_csv`], one line per (row, cycle).
pub const CSV_HEADER: [&str; 11] = [
    "one_over_h",
    "dofs",
    "cycle",
    "n_it",
    "rho",
    "converged",
    "t_c",
    "t_s",
    "gamma_sq",
    "kappa_a11",
    "skipped",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        let base = |cycle: String, n_it: String, rho: String, conv: String, t_s: String| {
            vec![
                row.one_over_h.to_string(),
                row.dofs.to_string(),
                cycle,
                n_it,
                rho,
                conv,
                format!("{:.3}", row.t_c),
                t_s,
                opt(row.gamma_sq),
                opt(row.kappa_a11),
                row.skipped.to_string(),
            ]
        };
        if row.results.is_empty() {
            w.write_record(base(String::new(), String::new(), String::new(), String::new(), String::new()))
                .map_err(csv_err)?;
        }
        for r in &row.results {
            w.write_record(base(
                r.cycle.to_string(),
                r.n_it.to_string(),
                format!("{:.4}", r.rho),
                r.converged.to_string(),
                format!("{:.3}", r.t_s),
            ))
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, rows: &[TableRow]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn tag(cfg: &ExperimentConfig) -> String {
    format!("p{}_{}", cfg.degree, cfg.continuity)
}

/// Write the operators of the finest row as Matrix Market files.
///
/// Per fine level `k`: `G_p2_cpm1_k4.mtx` (or `R_..._d1.mtx` for rational
/// directions), `T_p2_cpm1_c1_k4.mtx`, `A_p2_cpm1_k4.mtx` and the four
/// blocks `Ahat11_p2_cpm1_c1_k4.mtx` … `Ahat22_…`. The coarsest matrix and
/// the finest load vector are written as well. Returns the file names.
pub fn export_operators(cfg: &ExperimentConfig, dir: impl AsRef<Path>) -> Result<Vec<String>> {
    cfg.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let finest = cfg.finest_level(cfg.levels);
    let disc = discretize(cfg, finest)?;
    let hier = build_hierarchy(&disc, C11Kind::Ilu0)?;
    let t = tag(cfg);
    let c = cfg.choice.number();
    let k0 = cfg.coarsest_level();
    let mut names = Vec::new();
    let mut put_m = |name: String, m: &crate::linalg::CsrMatrix| -> Result<()> {
        matrix_market::write_matrix(dir.join(&name), m)?;
        names.push(name);
        Ok(())
    };
    for (i, tr) in disc.transfers.iter().enumerate() {
        let k = k0 + 1 + i;
        let g = crate::transfer::restriction_1d(cfg.degree, cfg.continuity, k)?.g;
        let mut wrote_g = false;
        for (d, op) in tr.restriction.iter().enumerate() {
            if *op == g {
                if !wrote_g {
                    put_m(format!("G_{t}_k{k}.mtx"), op)?;
                    wrote_g = true;
                }
            } else {
                put_m(format!("R_{t}_k{k}_d{}.mtx", d + 1), op)?;
            }
        }
        put_m(format!("T_{t}_c{c}_k{k}.mtx"), &tr.complement[0])?;
    }
    for l in 0..hier.n_levels() {
        let k = k0 + l;
        let lev = hier.level(l);
        put_m(format!("A_{t}_k{k}.mtx"), &lev.a)?;
        if let Some(b) = &lev.blocks {
            put_m(format!("Ahat11_{t}_c{c}_k{k}.mtx"), &b.a11)?;
            put_m(format!("Ahat12_{t}_c{c}_k{k}.mtx"), &b.a12)?;
            put_m(format!("Ahat21_{t}_c{c}_k{k}.mtx"), &b.a21())?;
            put_m(format!("Ahat22_{t}_c{c}_k{k}.mtx"), &b.a22)?;
        }
    }
    let fname = format!("f_{t}_k{finest}.mtx");
    matrix_market::write_vector(dir.join(&fname), &disc.system.f)?;
    names.push(fname);
    Ok(names)
}
