//! Multilevel hierarchy and the AMLI cycles built on it.
//!
//! Every level `k ≥ 2` holds the two-level transformation `J = [J_c; J_g]`
//! and the blocks of `Â = J A Jᵀ`. The preconditioner at level `k` is the
//! block factorization
//!
//! ```text
//! M = [C₁₁  0 ] [I  C₁₁⁻¹Â₁₂]
//!     [Â₂₁ C₂₂] [0      I   ]
//! ```
//!
//! mapped back with `Jᵀ`, where `C₁₁` is ILU(0) of `Â₁₁` and `C₂₂⁻¹` is a
//! polynomial in the level `k-1` preconditioner (linear cycles) or a few
//! inner FCG steps preconditioned by it (nonlinear cycles).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use crate::linalg::{fcg, fcg_fixed, pcg, pcg_ritz_bounds, CsrMatrix, DenseLu, Ilu0, LanczosOptions, SolveReport};
use crate::splitting::{cbs_gamma_sq, hb_blocks, Form, HierarchicalBlocks, Transform};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cycle {
    /// Linear, one coarse application (V-cycle).
    L1,
    /// Linear, Chebyshev-stabilized degree two (W-cycle).
    L2,
    /// Nonlinear, two inner FCG steps.
    N2,
    /// Nonlinear, three inner FCG steps.
    N3,
}

impl Cycle {
    pub fn nu(self) -> usize {
        match self {
            Cycle::L1 => 1,
            Cycle::L2 | Cycle::N2 => 2,
            Cycle::N3 => 3,
        }
    }
    pub fn is_nonlinear(self) -> bool {
        matches!(self, Cycle::N2 | Cycle::N3)
    }
    pub fn all() -> [Cycle; 4] {
        [Cycle::L1, Cycle::L2, Cycle::N2, Cycle::N3]
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cycle::L1 => "L1",
            Cycle::L2 => "L2",
            Cycle::N2 => "N2",
            Cycle::N3 => "N3",
        })
    }
}

impl FromStr for Cycle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Cycle::L1),
            "l2" => Ok(Cycle::L2),
            "n2" => Ok(Cycle::N2),
            "n3" => Ok(Cycle::N3),
            other => Err(Error::Config(format!("unknown cycle '{other}'"))),
        }
    }
}

/// Source of the Chebyshev interval used by the L2 cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChebyshevBounds {
    /// `[1 - γ², 1]` of the level below.
    #[default]
    Gamma,
    /// Extreme PCG Ritz values of the level-below preconditioned operator.
    Ritz,
}

impl fmt::Display for ChebyshevBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChebyshevBounds::Gamma => "gamma",
            ChebyshevBounds::Ritz => "ritz",
        })
    }
}

impl FromStr for ChebyshevBounds {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(ChebyshevBounds::Gamma),
            "ritz" => Ok(ChebyshevBounds::Ritz),
            other => Err(Error::Config(format!("unknown Chebyshev bounds '{other}'"))),
        }
    }
}

/// How `Â₁₁` is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C11Kind {
    Ilu0,
    /// Dense LU; only sensible for small problems and tests.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub cycle: Cycle,
    pub nu: usize,
    /// Chebyshev interval `[a, b]`; `None` uses `[1 - γ², 1]` of the level
    /// being stabilized.
    pub bounds: Option<(f64, f64)>,
    pub form: Form,
}

impl CycleConfig {
    pub fn new(cycle: Cycle) -> Self {
        Self {
            cycle,
            nu: cycle.nu(),
            bounds: None,
            form: Form::Multiplicative,
        }
    }

    pub fn with_bounds(mut self, a: f64, b: f64) -> Self {
        self.bounds = Some((a, b));
        self
    }

    pub fn with_form(mut self, form: Form) -> Self {
        self.form = form;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu == 0 {
            return Err(Error::Config("ν must be at least 1".into()));
        }
        if let Some((a, b)) = self.bounds {
            check_bounds(a, b)?;
        }
        Ok(())
    }
}

fn check_bounds(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a < b) {
        return Err(Error::Config(format!(
            "Chebyshev bounds need 0 < a < b, got [{a}, {b}]"
        )));
    }
    Ok(())
}

/// Ascending coefficients of `p_ν(t) = T_ν((b+a-2t)/(b-a)) / T_ν((b+a)/(b-a))`.
pub fn chebyshev_coefficients(nu: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    check_bounds(a, b)?;
    let alpha = (b + a) / (b - a);
    let beta = -2.0 / (b - a);
    let mut prev = vec![1.0];
    let mut cur = vec![alpha, beta];
    if nu == 0 {
        return Ok(prev);
    }
    for _ in 1..nu {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += 2.0 * alpha * c;
            next[i + 1] += 2.0 * beta * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    let norm = cur[0];
    Ok(cur.iter().map(|c| c / norm).collect())
}

/// Coefficients of `q` with `1 - t q(t) = p_ν(t)`.
pub fn q_coefficients(nu: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    let p = chebyshev_coefficients(nu, a, b)?;
    Ok(p[1..].iter().map(|c| -c).collect())
}

enum C11 {
    Ilu(Ilu0),
    Dense(DenseLu),
}

impl C11 {
    fn solve(&self, v: &[f64]) -> Vec<f64> {
        match self {
            C11::Ilu(f) => f.solve(v),
            C11::Dense(lu) => lu.solve(v),
        }
    }
}

/// One level of the hierarchy.
pub struct Level {
    pub a: CsrMatrix,
    /// Transformation to the next coarser level (absent on the coarsest).
    pub transform: Option<Transform>,
    /// `a11` is left empty when the setup handed it to the factorization.
    pub blocks: Option<HierarchicalBlocks>,
    c11: Option<C11>,
    a11_kept: bool,
    /// Squared CBS constant of this level's splitting, once measured.
    pub gamma_sq: Option<f64>,
    /// Spectral interval of this level's linear preconditioner, once
    /// estimated; takes priority over `gamma_sq` for Chebyshev bounds.
    pub ritz_bounds: Option<(f64, f64)>,
}

impl Level {
    pub fn dofs(&self) -> usize {
        self.a.rows()
    }
}

/// Levels ordered coarsest first; index 0 is solved exactly.
pub struct Hierarchy {
    levels: Vec<Level>,
    coarse_lu: DenseLu,
    /// Setup wall time in seconds.
    pub t_c: f64,
}

impl Hierarchy {
    /// Build the hierarchy from the finest matrix and the transformations
    /// ordered coarsest first (`transforms[i]` maps level `i+1` to `i`).
    pub fn setup(a_fine: CsrMatrix, transforms: Vec<Transform>, c11: C11Kind) -> Result<Self> {
        Self::setup_with(a_fine, transforms, c11, true)
    }

    /// As [`Hierarchy::setup`]; with `keep_a11 = false` and ILU(0) the
    /// factorization takes over the storage of `Â₁₁`, which is then no
    /// longer available for `γ²` measurements.
    pub fn setup_with(a_fine: CsrMatrix, transforms: Vec<Transform>, c11: C11Kind, keep_a11: bool) -> Result<Self> {
        let start = Instant::now();
        let n_levels = transforms.len() + 1;
        let mut levels: Vec<Level> = Vec::with_capacity(n_levels);
        let mut a = a_fine;
        let mut pending = Vec::with_capacity(n_levels);
        for (l, t) in transforms.into_iter().enumerate().rev() {
            let level = l + 1;
            if t.dim() != a.rows() {
                return Err(Error::Setup {
                    level,
                    source: Box::new(Error::DimensionMismatch {
                        expected: a.rows(),
                        got: t.dim(),
                        context: "transformation size",
                    }),
                });
            }
            let mut blocks = hb_blocks(&a, &t).map_err(|e| Error::Setup {
                level,
                source: Box::new(e),
            })?;
            let c = match c11 {
                C11Kind::Ilu0 if !keep_a11 => {
                    let n1 = blocks.n1();
                    Ilu0::from_matrix(std::mem::replace(&mut blocks.a11, CsrMatrix::zeros(n1, n1))).map(C11::Ilu)
                }
                C11Kind::Ilu0 => Ilu0::new(&blocks.a11).map(C11::Ilu),
                C11Kind::Exact => DenseLu::from_csr(&blocks.a11).map(C11::Dense),
            }
            .map_err(|e| Error::Setup {
                level,
                source: Box::new(e),
            })?;
            let coarse = blocks.a22.clone();
            pending.push(Level {
                a,
                transform: Some(t),
                blocks: Some(blocks),
                c11: Some(c),
                a11_kept: keep_a11 || c11 == C11Kind::Exact,
                gamma_sq: None,
                ritz_bounds: None,
            });
            a = coarse;
        }
        let coarse_lu = DenseLu::from_csr(&a).map_err(|e| Error::Setup {
            level: 0,
            source: Box::new(e),
        })?;
        levels.push(Level {
            a,
            transform: None,
            blocks: None,
            c11: None,
            a11_kept: false,
            gamma_sq: None,
            ritz_bounds: None,
        });
        levels.extend(pending.into_iter().rev());
        Ok(Self {
            levels,
            coarse_lu,
            t_c: start.elapsed().as_secs_f64(),
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }
    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }
    pub fn finest(&self) -> &Level {
        self.levels.last().expect("nonempty hierarchy")
    }
    pub fn dofs(&self) -> Vec<usize> {
        self.levels.iter().map(Level::dofs).collect()
    }

    /// `τ_l = N_l / N_{l-1}` for `l ≥ 1`.
    pub fn coarsening_factors(&self) -> Vec<f64> {
        let n = self.dofs();
        n.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect()
    }

    /// Measure `γ²` on levels `1..=upto` bottom-up, the `Â₂₂` solves being
    /// preconditioned by the linear V-cycle of the level below.
    pub fn compute_gamma_sq(&mut self, upto: usize, opts: LanczosOptions) -> Result<()> {
        let upto = upto.min(self.levels.len() - 1);
        let v_cycle = CycleConfig::new(Cycle::L1);
        for l in 1..=upto {
            if self.levels[l].gamma_sq.is_some() {
                continue;
            }
            if !self.levels[l].a11_kept {
                return Err(Error::Setup {
                    level: l,
                    source: Box::new(Error::Config("Â₁₁ was released at setup".into())),
                });
            }
            let est = {
                let this = &*self;
                let coarse_a = &this.levels[l - 1].a;
                let mut solve = |b: &[f64]| -> Vec<f64> {
                    if l == 1 {
                        return this.coarse_lu.solve(b);
                    }
                    let mut pre = |r: &[f64], z: &mut [f64]| {
                        z.copy_from_slice(&this.apply_level(&v_cycle, l - 1, r));
                    };
                    pcg(coarse_a, &mut pre, b, 1e-10, 1000).0
                };
                let blocks = this.levels[l].blocks.as_ref().expect("level has blocks");
                cbs_gamma_sq(blocks, Some(&mut solve), opts)?
            };
            self.levels[l].gamma_sq = Some(est.value);
        }
        Ok(())
    }

    /// Estimate the spectral interval of the degree-`nu` linear cycle on
    /// levels `1..=upto`, bottom-up, from PCG Ritz values.
    pub fn estimate_ritz_bounds(&mut self, upto: usize, nu: usize, steps: usize) -> Result<()> {
        let upto = upto.min(self.levels.len() - 1);
        let cfg = CycleConfig {
            nu,
            ..CycleConfig::new(if nu == 1 { Cycle::L1 } else { Cycle::L2 })
        };
        for l in 1..=upto {
            let (lo, hi) = {
                let this = &*self;
                let n = this.levels[l].dofs();
                let mut rng = ChaCha8Rng::seed_from_u64(0xb0b + l as u64);
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mut pre = |r: &[f64], z: &mut [f64]| {
                    z.copy_from_slice(&this.apply_level(&cfg, l, r));
                };
                pcg_ritz_bounds(&this.levels[l].a, &mut pre, &b, steps)
            };
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::Setup {
                    level: l,
                    source: Box::new(Error::Config(format!(
                        "preconditioner not positive definite (Ritz interval [{lo}, {hi}])"
                    ))),
                });
            }
            self.levels[l].ritz_bounds = Some((lo, hi));
        }
        Ok(())
    }

    pub fn set_gamma_sq(&mut self, l: usize, g: f64) {
        self.levels[l].gamma_sq = Some(g);
    }

    fn c22(&self, cfg: &CycleConfig, l: usize, w: &[f64]) -> Vec<f64> {
        let below = l - 1;
        if below == 0 {
            return self.coarse_lu.solve(w);
        }
        if cfg.cycle.is_nonlinear() {
            let mut pre = |r: &[f64], z: &mut [f64]| {
                z.copy_from_slice(&self.apply_level(cfg, below, r));
            };
            return fcg_fixed(&self.levels[below].a, &mut pre, w, cfg.nu, cfg.nu);
        }
        if cfg.nu == 1 {
            return self.apply_level(cfg, below, w);
        }
        self.chebyshev(cfg, below, w)
    }

    fn chebyshev(&self, cfg: &CycleConfig, below: usize, w: &[f64]) -> Vec<f64> {
        let (a, b) = match cfg.bounds {
            Some(bounds) => bounds,
            None => match self.levels[below].ritz_bounds {
                Some(bounds) => bounds,
                None => {
                    let g = self.levels[below]
                        .gamma_sq
                        .expect("γ² measured before a Chebyshev cycle");
                    (1.0 - g, 1.0)
                }
            },
        };
        let q = q_coefficients(cfg.nu, a, b).expect("validated bounds");
        let a_mat = &self.levels[below].a;
        let nu = q.len();
        let mut u: Vec<f64> = w.iter().map(|x| q[nu - 1] * x).collect();
        for i in (0..nu - 1).rev() {
            let m = self.apply_level(cfg, below, &u);
            let am = a_mat.mul_vec(&m);
            for ((ui, &wi), ai) in u.iter_mut().zip(w).zip(am) {
                *ui = q[i] * wi + ai;
            }
        }
        self.apply_level(cfg, below, &u)
    }

    /// Preconditioner action at level `l` in the level's own ordering.
    pub fn apply_level(&self, cfg: &CycleConfig, l: usize, v: &[f64]) -> Vec<f64> {
        if l == 0 {
            return self.coarse_lu.solve(v);
        }
        let lev = &self.levels[l];
        let t = lev.transform.as_ref().expect("level has a transform");
        let blocks = lev.blocks.as_ref().expect("level has blocks");
        let c11 = lev.c11.as_ref().expect("level has C11");
        let v1 = t.jc.mul_vec(v);
        let v2 = t.jg.mul_vec(v);
        let (x1, y2) = match cfg.form {
            Form::Multiplicative => {
                let y1 = c11.solve(&v1);
                let a21y1 = blocks.a12.mul_vec_transpose(&y1);
                let w: Vec<f64> = v2.iter().zip(&a21y1).map(|(a, b)| a - b).collect();
                let y2 = self.c22(cfg, l, &w);
                let corr = c11.solve(&blocks.a12.mul_vec(&y2));
                let x1: Vec<f64> = y1.iter().zip(&corr).map(|(a, b)| a - b).collect();
                (x1, y2)
            }
            Form::Additive => (c11.solve(&v1), self.c22(cfg, l, &v2)),
        };
        let mut z = t.jc.mul_vec_transpose(&x1);
        let zg = t.jg.mul_vec_transpose(&y2);
        for (a, b) in z.iter_mut().zip(zg) {
            *a += b;
        }
        z
    }

    /// Linear multiplicative cycle (`L1`/`L2` or any `ν` with Chebyshev).
    pub fn apply_linear(&self, cfg: &CycleConfig, l: usize, v: &[f64]) -> Vec<f64> {
        let c = CycleConfig {
            cycle: if cfg.nu == 1 { Cycle::L1 } else { Cycle::L2 },
            form: Form::Multiplicative,
            ..*cfg
        };
        self.apply_level(&c, l, v)
    }

    /// `C₂₂⁻¹ w` of the linear cycle at level `l` (`w` lives on level `l-1`).
    pub fn apply_c22_linear(&self, cfg: &CycleConfig, l: usize, w: &[f64]) -> Vec<f64> {
        let c = CycleConfig {
            cycle: if cfg.nu == 1 { Cycle::L1 } else { Cycle::L2 },
            ..*cfg
        };
        self.c22(&c, l, w)
    }

    /// Nonlinear multiplicative cycle with `ν` inner FCG steps per level.
    pub fn apply_nonlinear(&self, cfg: &CycleConfig, l: usize, v: &[f64]) -> Vec<f64> {
        let c = CycleConfig {
            cycle: if cfg.nu >= 3 { Cycle::N3 } else { Cycle::N2 },
            form: Form::Multiplicative,
            ..*cfg
        };
        self.apply_level(&c, l, v)
    }

    /// Block-diagonal variant `diag(C₁₁, C₂₂)`.
    pub fn apply_additive(&self, cfg: &CycleConfig, l: usize, v: &[f64]) -> Vec<f64> {
        let c = CycleConfig {
            form: Form::Additive,
            ..*cfg
        };
        self.apply_level(&c, l, v)
    }

    /// Outer solve on the finest level: PCG for linear cycles, FCG(10) for
    /// nonlinear ones.
    pub fn solve(&self, cfg: &CycleConfig, rhs: &[f64], tol: f64, max_it: usize) -> Result<(Vec<f64>, SolveReport)> {
        cfg.validate()?;
        let top = self.levels.len() - 1;
        if cfg.cycle == Cycle::L2 && cfg.bounds.is_none() && cfg.nu > 1 {
            if let Some(l) = (1..top)
                .find(|&l| self.levels[l].gamma_sq.is_none() && self.levels[l].ritz_bounds.is_none())
            {
                return Err(Error::Config(format!(
                    "γ² of level {l} must be measured before an L2 solve"
                )));
            }
        }
        let a = &self.levels[top].a;
        let start = Instant::now();
        let mut pre = |r: &[f64], z: &mut [f64]| {
            z.copy_from_slice(&self.apply_level(cfg, top, r));
        };
        let (x, mut report) = if cfg.cycle.is_nonlinear() {
            fcg(a, &mut pre, rhs, tol, max_it, 10)
        } else {
            pcg(a, &mut pre, rhs, tol, max_it)
        };
        report.t_s = start.elapsed().as_secs_f64();
        report.t_c = self.t_c;
        Ok((x, report))
    }
}
