//! Tensor-product NURBS patches for the example domains and the
//! manufactured solutions posed on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::splines::{Continuity, SplineSpace};
use crate::transfer::{refine_weights, restriction_1d};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Square,
    QuarterAnnulus,
    QuarterThickRing,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::QuarterThickRing => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Square => "square",
            Domain::QuarterAnnulus => "quarter_annulus",
            Domain::QuarterThickRing => "quarter_thick_ring",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Domain::Square),
            "quarter_annulus" | "annulus" => Ok(Domain::QuarterAnnulus),
            "quarter_thick_ring" | "thick_ring" => Ok(Domain::QuarterThickRing),
            other => Err(Error::Config(format!("unknown domain '{other}'"))),
        }
    }
}

/// Rational basis of one direction: values and derivatives of
/// `B_i w_i / Σ_j B_j w_j` on the functions active at `x`.
pub fn rational_1d(
    space: &SplineSpace,
    weights: &[f64],
    x: f64,
) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let (first, b, db) = space.eval_with_deriv(x)?;
    let mut w = 0.0;
    let mut dw = 0.0;
    for k in 0..b.len() {
        w += b[k] * weights[first + k];
        dw += db[k] * weights[first + k];
    }
    let mut vals = Vec::with_capacity(b.len());
    let mut ders = Vec::with_capacity(b.len());
    for k in 0..b.len() {
        let wi = weights[first + k];
        vals.push(b[k] * wi / w);
        ders.push((db[k] * wi * w - b[k] * wi * dw) / (w * w));
    }
    Ok((first, vals, ders))
}

/// Tensor-product NURBS patch whose weights factor per direction.
#[derive(Clone, Debug)]
pub struct NurbsPatch {
    spaces: Vec<SplineSpace>,
    /// Per-direction weight factors; the tensor weight of a control point is
    /// their product.
    dir_weights: Vec<Vec<f64>>,
    /// Control points, flat tensor order with the first direction slowest.
    control_points: Vec<Vec<f64>>,
}

impl NurbsPatch {
    pub fn new(
        spaces: Vec<SplineSpace>,
        dir_weights: Vec<Vec<f64>>,
        control_points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let d = spaces.len();
        if d == 0 || d > 3 || dir_weights.len() != d {
            return Err(Error::Geometry("inconsistent number of directions".into()));
        }
        for (s, w) in spaces.iter().zip(&dir_weights) {
            if w.len() != s.dim() {
                return Err(Error::Geometry("weight count differs from space dim".into()));
            }
            if w.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::Geometry("weights must be positive".into()));
            }
        }
        let n: usize = spaces.iter().map(SplineSpace::dim).product();
        if control_points.len() != n || control_points.iter().any(|p| p.len() != d) {
            return Err(Error::Geometry("control net does not match tensor dims".into()));
        }
        Ok(Self {
            spaces,
            dir_weights,
            control_points,
        })
    }

    pub fn dim(&self) -> usize {
        self.spaces.len()
    }
    pub fn spaces(&self) -> &[SplineSpace] {
        &self.spaces
    }
    pub fn dir_weights(&self) -> &[Vec<f64>] {
        &self.dir_weights
    }
    pub fn control_points(&self) -> &[Vec<f64>] {
        &self.control_points
    }

    /// Tensor weights, flat with the first direction slowest.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![1.0];
        for dw in &self.dir_weights {
            w = w
                .iter()
                .flat_map(|a| dw.iter().map(move |b| a * b))
                .collect();
        }
        w
    }

    /// Active tensor basis: flat indices, rational values and parametric
    /// gradients.
    pub fn eval_nurbs_basis(&self, xi: &[f64]) -> Result<(Vec<usize>, Vec<f64>, Vec<Vec<f64>>)> {
        let d = self.dim();
        if xi.len() != d {
            return Err(Error::Domain("parametric point has wrong dimension".into()));
        }
        let per: Vec<(usize, Vec<f64>, Vec<f64>)> = (0..d)
            .map(|a| rational_1d(&self.spaces[a], &self.dir_weights[a], xi[a]))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = self.spaces.iter().map(SplineSpace::dim).collect();
        let counts: Vec<usize> = per.iter().map(|p| p.1.len()).collect();
        let total: usize = counts.iter().product();
        let mut idx = Vec::with_capacity(total);
        let mut vals = Vec::with_capacity(total);
        let mut grads = Vec::with_capacity(total);
        let mut local = vec![0usize; d];
        for _ in 0..total {
            let mut flat = 0;
            let mut v = 1.0;
            let mut g = vec![1.0; d];
            for a in 0..d {
                let (first, ref nv, ref nd) = per[a];
                flat = flat * dims[a] + first + local[a];
                v *= nv[local[a]];
                for (b, gb) in g.iter_mut().enumerate() {
                    *gb *= if a == b { nd[local[a]] } else { nv[local[a]] };
                }
            }
            idx.push(flat);
            vals.push(v);
            grads.push(g);
            for a in (0..d).rev() {
                local[a] += 1;
                if local[a] < counts[a] {
                    break;
                }
                local[a] = 0;
            }
        }
        Ok((idx, vals, grads))
    }

    /// Physical point and Jacobian `J[a][b] = ∂x_a/∂ξ_b`.
    pub fn map_point(&self, xi: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let d = self.dim();
        let (idx, vals, grads) = self.eval_nurbs_basis(xi)?;
        let mut x = vec![0.0; d];
        let mut jac = vec![vec![0.0; d]; d];
        for ((&i, &v), g) in idx.iter().zip(&vals).zip(&grads) {
            let p = &self.control_points[i];
            for a in 0..d {
                x[a] += v * p[a];
                for b in 0..d {
                    jac[a][b] += g[b] * p[a];
                }
            }
        }
        let det = determinant(&jac);
        if !(det > 0.0) {
            return Err(Error::Geometry(format!(
                "non-positive Jacobian determinant {det} at {xi:?}"
            )));
        }
        Ok((x, jac))
    }
}

pub fn determinant(j: &[Vec<f64>]) -> f64 {
    match j.len() {
        1 => j[0][0],
        2 => j[0][0] * j[1][1] - j[0][1] * j[1][0],
        3 => {
            j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
                - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
                + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
        }
        _ => f64::NAN,
    }
}

/// Coarse exact geometry of one of the example domains.
///
/// Direction 0 is radial (degree 1, radii 1 to 2) and direction 1 angular
/// (rational quadratic) for the curved domains; the thick ring adds a linear
/// direction `z ∈ [0, 1]`.
pub fn make_domain(domain: Domain) -> NurbsPatch {
    let lin = SplineSpace::with_spans(1, Continuity::Cpm1, 1).expect("valid space");
    let quad = SplineSpace::with_spans(2, Continuity::Cpm1, 1).expect("valid space");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (spaces, weights, points) = match domain {
        Domain::Square => {
            let pts = vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ];
            (
                vec![lin.clone(), lin.clone()],
                vec![vec![1.0; 2], vec![1.0; 2]],
                pts,
            )
        }
        Domain::QuarterAnnulus => {
            let mut pts = Vec::new();
            for r in [1.0, 2.0] {
                pts.extend([vec![r, 0.0], vec![r, r], vec![0.0, r]]);
            }
            (
                vec![lin.clone(), quad.clone()],
                vec![vec![1.0; 2], vec![1.0, s, 1.0]],
                pts,
            )
        }
        Domain::QuarterThickRing => {
            let mut pts = Vec::new();
            for r in [1.0, 2.0] {
                for c in [[r, 0.0], [r, r], [0.0, r]] {
                    for z in [0.0, 1.0] {
                        pts.push(vec![c[0], c[1], z]);
                    }
                }
            }
            (
                vec![lin.clone(), quad.clone(), lin.clone()],
                vec![vec![1.0; 2], vec![1.0, s, 1.0], vec![1.0; 2]],
                pts,
            )
        }
    };
    NurbsPatch::new(spaces, weights, points).expect("valid example patch")
}

/// Identity map of the unit interval, square or cube.
pub fn unit_cube(d: usize) -> NurbsPatch {
    let lin = SplineSpace::with_spans(1, Continuity::Cpm1, 1).expect("valid space");
    let n = 1usize << d;
    let points = (0..n)
        .map(|i| (0..d).map(|a| ((i >> (d - 1 - a)) & 1) as f64).collect())
        .collect();
    NurbsPatch::new(vec![lin; d], vec![vec![1.0; 2]; d], points).expect("valid unit patch")
}

/// Raise the degree of Bézier coefficients by one.
fn elevate_once(c: &[f64]) -> Vec<f64> {
    let q = c.len() - 1;
    let mut out = Vec::with_capacity(q + 2);
    out.push(c[0]);
    for i in 1..=q {
        let a = i as f64 / (q + 1) as f64;
        out.push(a * c[i - 1] + (1.0 - a) * c[i]);
    }
    out.push(c[q]);
    out
}

/// Weight coefficients of the geometry's weight function in the analysis
/// space of degree `p`, continuity `r` and the given level, per direction.
///
/// The coarse single-span weights are degree-elevated to `p` and then
/// refined level by level with `W^k = Gᵀ W^{k-1}`, so the weight function
/// itself never changes.
pub fn analysis_weights(
    patch: &NurbsPatch,
    p: usize,
    r: Continuity,
    level: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(patch.dim());
    for (space, w) in patch.spaces.iter().zip(&patch.dir_weights) {
        if space.n_spans() != 1 {
            return Err(Error::Geometry("geometry must be a single Bézier patch".into()));
        }
        if space.degree() > p {
            return Err(Error::Geometry(format!(
                "analysis degree {p} below geometry degree {}",
                space.degree()
            )));
        }
        if w.iter().all(|&v| v == 1.0) {
            out.push(vec![1.0; SplineSpace::new(p, r, level)?.dim()]);
            continue;
        }
        let mut c = w.clone();
        while c.len() < p + 1 {
            c = elevate_once(&c);
        }
        for k in 2..=level {
            let g = restriction_1d(p, r, k)?.g;
            c = refine_weights(&g, &c)?;
        }
        out.push(c);
    }
    Ok(out)
}

/// The three test problems: `-Δu = f` with Dirichlet data from `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Example {
    /// `u = eˣ sin y` on the unit square.
    Ex1,
    /// `u = -x y² (x²+y²-1)(x²+y²-4)` on the quarter annulus.
    Ex2,
    /// `u = eˣ sin(xy) cos z` on the quarter thick ring.
    Ex3,
}

impl Example {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Example::Ex1),
            2 => Ok(Example::Ex2),
            3 => Ok(Example::Ex3),
            _ => Err(Error::Config(format!("unknown example {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Example::Ex1 => 1,
            Example::Ex2 => 2,
            Example::Ex3 => 3,
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            Example::Ex1 => Domain::Square,
            Example::Ex2 => Domain::QuarterAnnulus,
            Example::Ex3 => Domain::QuarterThickRing,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ManufacturedProblem {
    pub example: Example,
}

pub fn manufactured_problem(example: Example) -> ManufacturedProblem {
    ManufacturedProblem { example }
}

impl ManufacturedProblem {
    pub fn exact(&self, p: &[f64]) -> f64 {
        match self.example {
            Example::Ex1 => p[0].exp() * p[1].sin(),
            Example::Ex2 => {
                let (x, y) = (p[0], p[1]);
                let s = x * x + y * y;
                -x * y * y * (s - 1.0) * (s - 4.0)
            }
            Example::Ex3 => p[0].exp() * (p[0] * p[1]).sin() * p[2].cos(),
        }
    }

    /// `f = -Δu` in closed form.
    pub fn source(&self, p: &[f64]) -> f64 {
        match self.example {
            Example::Ex1 => 0.0,
            Example::Ex2 => {
                let (x, y) = (p[0], p[1]);
                let (x2, y2) = (x * x, y * y);
                2.0 * x2 * x2 * x + 44.0 * x2 * x * y2 - 10.0 * x2 * x + 42.0 * x * y2 * y2
                    - 90.0 * x * y2
                    + 8.0 * x
            }
            Example::Ex3 => {
                let (x, y, z) = (p[0], p[1], p[2]);
                let xy = x * y;
                x.exp() * z.cos() * ((x * x + y * y) * xy.sin() - 2.0 * y * xy.cos())
            }
        }
    }

    pub fn dirichlet(&self, p: &[f64]) -> f64 {
        self.exact(p)
    }
}
