//! Tensor-product quadrature on polydiscs and weighted L² norms.
//!
//! Each coordinate disc uses Gauss–Legendre nodes in the radius (with the
//! polar factor `ρ dρ` folded into the weights) and uniform angular nodes
//! offset by half a step, so no node sits on a coordinate axis. Sums use a
//! fixed chunked pairwise tree and are bit-stable at fixed resolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::koszul::KoszulSection;
use crate::poly::{CompiledPoly, Poly};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("invalid resolution n_rad = {n_rad}, n_ang = {n_ang} (need n_rad >= 2, n_ang >= 4)")]
    Resolution { n_rad: usize, n_ang: usize },
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("weight is not finite at node {node:?}")]
    NonFiniteWeight { node: Vec<(f64, f64)> },
    #[error("integrand has {got} variables, grid has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid weight: {0}")]
    Weight(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub center: Vec<Complex64>,
    pub radii: Vec<f64>,
}

impl DomainSpec {
    pub fn new(center: Vec<Complex64>, radii: Vec<f64>) -> Result<Self, QuadError> {
        if center.len() != radii.len() || radii.is_empty() {
            return Err(QuadError::Domain(format!("{} centers for {} radii", center.len(), radii.len())));
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(QuadError::Domain(format!("radius {r} is not positive")));
        }
        Ok(Self { center, radii })
    }

    pub fn unit_polydisc(n: usize) -> Self {
        Self { center: vec![Complex64::new(0.0, 0.0); n], radii: vec![1.0; n] }
    }

    pub fn n(&self) -> usize {
        self.radii.len()
    }

    pub fn volume(&self) -> f64 {
        self.radii.iter().map(|r| PI * r * r).product()
    }
}

/// Plurisubharmonic weight `ψ`; integrands carry `e^{−ψ}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Psi {
    Zero,
    /// `c·|z|²`.
    Quadratic(f64),
    /// `c·log(1 + |z|²)`.
    LogFubiniStudy(f64),
    /// A real polynomial in `t_j = |z_j|²`; variable `j` of the polynomial
    /// stands for `t_j`.
    PolyInAbs2(Poly),
}

impl Psi {
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let abs2 = || z.iter().map(Complex64::norm_sqr).sum::<f64>();
        match self {
            Psi::Zero => 0.0,
            Psi::Quadratic(c) => c * abs2(),
            Psi::LogFubiniStudy(c) => c * abs2().ln_1p(),
            Psi::PolyInAbs2(p) => {
                let t: Vec<Complex64> = z.iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
                p.eval(&t).map(|v| v.re).unwrap_or(f64::NAN)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub psi: Psi,
    pub epsilon: f64,
    /// Defaults to `min{n, r−1}`.
    pub q: Option<u32>,
}

impl WeightSpec {
    pub fn flat(epsilon: f64) -> Self {
        Self { psi: Psi::Zero, epsilon, q: None }
    }

    pub fn resolve_q(&self, sec: &KoszulSection) -> u32 {
        self.q.unwrap_or_else(|| sec.n().min(sec.r().saturating_sub(1)) as u32)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(QuadError::Weight(format!("epsilon = {} must be positive", self.epsilon)));
        }
        Ok(())
    }

    pub fn bound(&self) -> f64 {
        (1.0 + self.epsilon) / self.epsilon
    }
}

/// A pointwise weight function.
pub trait Weight {
    fn eval(&self, z: &[Complex64]) -> f64;
}

impl<F: Fn(&[Complex64]) -> f64> Weight for F {
    fn eval(&self, z: &[Complex64]) -> f64 {
        self(z)
    }
}

/// `(|g|²)^{exponent} · e^{−ψ}`.
#[derive(Debug, Clone)]
pub struct SkodaWeight {
    g: Vec<CompiledPoly>,
    pub exponent: f64,
    pub psi: Psi,
}

impl SkodaWeight {
    pub fn new(sec: &KoszulSection, exponent: f64, psi: Psi) -> Self {
        Self { g: sec.generators().iter().map(Poly::compile).collect(), exponent, psi }
    }
}

impl Weight for SkodaWeight {
    fn eval(&self, z: &[Complex64]) -> f64 {
        let g2: f64 = self.g.iter().map(|g| g.eval(z).norm_sqr()).sum();
        let base = if self.exponent == 0.0 { 1.0 } else { g2.powf(self.exponent) };
        match self.psi {
            Psi::Zero => base,
            ref psi => base * (-psi.eval(z)).exp(),
        }
    }
}

/// `w_num = |g|^{−2q(1+ε)} e^{−ψ}` and `w_den = |g|^{−2(q+qε+1)} e^{−ψ}`.
pub fn skoda_weights(sec: &KoszulSection, ws: &WeightSpec) -> (SkodaWeight, SkodaWeight) {
    let q = ws.resolve_q(sec) as f64;
    let e = ws.epsilon;
    (
        SkodaWeight::new(sec, -q * (1.0 + e), ws.psi.clone()),
        SkodaWeight::new(sec, -(q + q * e + 1.0), ws.psi.clone()),
    )
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[derive(Debug, Clone, PartialEq)]
struct Axis {
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

/// Tensor-product grid; nodes are enumerated lazily from per-coordinate
/// factors, in row-major order with the last coordinate fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    axes: Vec<Axis>,
    pub resolution: (usize, usize),
}

pub fn polydisc_grid(dom: &DomainSpec, n_rad: usize, n_ang: usize) -> Result<QuadratureGrid, QuadError> {
    if n_rad < 2 || n_ang < 4 {
        return Err(QuadError::Resolution { n_rad, n_ang });
    }
    let (x, w) = gauss_legendre(n_rad);
    let axes = dom
        .center
        .iter()
        .zip(&dom.radii)
        .map(|(c, &r)| {
            let mut nodes = Vec::with_capacity(n_rad * n_ang);
            let mut weights = Vec::with_capacity(n_rad * n_ang);
            for (xi, wi) in x.iter().zip(&w) {
                let rho = 0.5 * r * (xi + 1.0);
                let wr = 0.5 * r * wi * rho;
                for j in 0..n_ang {
                    let th = 2.0 * PI * (j as f64 + 0.5) / n_ang as f64;
                    nodes.push(c + Complex64::from_polar(rho, th));
                    weights.push(wr * 2.0 * PI / n_ang as f64);
                }
            }
            Axis { nodes, weights }
        })
        .collect();
    Ok(QuadratureGrid { axes, resolution: (n_rad, n_ang) })
}

fn pairwise<T>(mut v: Vec<T>, combine: &impl Fn(T, T) -> T) -> Option<T> {
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => combine(a, b),
                None => a,
            });
        }
        v = next;
    }
    v.pop()
}

impl QuadratureGrid {
    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, mut k: usize) -> (Vec<Complex64>, f64) {
        let mut z = vec![Complex64::new(0.0, 0.0); self.n()];
        let mut w = 1.0;
        for (j, ax) in self.axes.iter().enumerate().rev() {
            let m = ax.nodes.len();
            z[j] = ax.nodes[k % m];
            w *= ax.weights[k % m];
            k /= m;
        }
        (z, w)
    }

    /// Visits all nodes in chunks of fixed size, each chunk folded
    /// sequentially into a fresh accumulator, and combines the chunk results
    /// by a fixed pairwise tree.
    pub fn reduce<T, E>(
        &self,
        init: impl Fn() -> T,
        mut visit: impl FnMut(&mut T, &[Complex64], f64) -> Result<(), E>,
        combine: impl Fn(T, T) -> T,
    ) -> Result<T, E> {
        let n = self.n();
        let total = self.len();
        let mut idx = vec![0usize; n];
        let mut z: Vec<Complex64> = self.axes.iter().map(|a| a.nodes[0]).collect();
        let mut chunks = Vec::with_capacity(total.div_ceil(CHUNK));
        let mut done = 0;
        while done < total {
            let mut acc = init();
            let end = (done + CHUNK).min(total);
            while done < end {
                let w: f64 = idx.iter().zip(&self.axes).map(|(&i, a)| a.weights[i]).product();
                visit(&mut acc, &z, w)?;
                done += 1;
                for j in (0..n).rev() {
                    idx[j] += 1;
                    if idx[j] < self.axes[j].nodes.len() {
                        z[j] = self.axes[j].nodes[idx[j]];
                        break;
                    }
                    idx[j] = 0;
                    z[j] = self.axes[j].nodes[0];
                }
            }
            chunks.push(acc);
        }
        Ok(pairwise(chunks, &combine).unwrap_or_else(init))
    }

    pub fn total_weight(&self) -> f64 {
        let r: Result<f64, ()> = self.reduce(|| 0.0, |acc, _, w| {
            *acc += w;
            Ok(())
        }, |a, b| a + b);
        r.unwrap_or(0.0)
    }

    /// `Σ weight · f(node)`.
    pub fn integrate(&self, f: impl Fn(&[Complex64]) -> f64) -> f64 {
        let r: Result<f64, ()> = self.reduce(|| 0.0, |acc, z, w| {
            *acc += w * f(z);
            Ok(())
        }, |a, b| a + b);
        r.unwrap_or(0.0)
    }
}

fn node_report(z: &[Complex64]) -> Vec<(f64, f64)> {
    z.iter().map(|c| (c.re, c.im)).collect()
}

/// `Σ_nodes weight · (Σ_k |F_k|²) · w`.
pub fn weighted_norm2<W: Weight + ?Sized>(f: &[Poly], w: &W, grid: &QuadratureGrid) -> Result<f64, QuadError> {
    weighted_norm2_compiled(&compile_all(f, grid.n())?, w, grid)
}

fn compile_all(f: &[Poly], n: usize) -> Result<Vec<CompiledPoly>, QuadError> {
    if let Some(p) = f.iter().find(|p| p.nvars() != n) {
        return Err(QuadError::Dimension { expected: n, got: p.nvars() });
    }
    Ok(f.iter().map(Poly::compile).collect())
}

/// As [`weighted_norm2`] for float-coefficient components.
pub fn weighted_norm2_compiled<W: Weight + ?Sized>(
    f: &[CompiledPoly],
    w: &W,
    grid: &QuadratureGrid,
) -> Result<f64, QuadError> {
    if let Some(p) = f.iter().find(|p| p.nvars() != grid.n()) {
        return Err(QuadError::Dimension { expected: grid.n(), got: p.nvars() });
    }
    let comps: Vec<&CompiledPoly> = f.iter().filter(|p| !p.is_zero()).collect();
    grid.reduce(
        || 0.0,
        |acc, z, wt| {
            let a: f64 = comps.iter().map(|c| c.eval(z).norm_sqr()).sum();
            if a == 0.0 {
                return Ok(());
            }
            let wz = w.eval(z);
            if !wz.is_finite() {
                return Err(QuadError::NonFiniteWeight { node: node_report(z) });
            }
            *acc += wt * a * wz;
            Ok(())
        },
        |a, b| a + b,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    /// Value at the finest resolution.
    pub value: f64,
    /// `|v_finest − v_previous| / |v_finest|`.
    pub rel_change: f64,
    pub diverging: bool,
    pub values: Vec<f64>,
    pub resolutions: Vec<(usize, usize)>,
}

/// Relative growth per doubling above which a sequence counts as diverging.
pub const DIVERGENCE_GROWTH: f64 = 0.1;

/// Evaluates at three successive doublings ending at `2·base` (or starting
/// at `base` when halving is not a valid resolution). `diverging` is set when
/// both doublings grow the value by more than 10%.
pub fn refine_and_estimate<W: Weight + ?Sized>(
    f: &[Poly],
    w: &W,
    dom: &DomainSpec,
    base: (usize, usize),
) -> Result<Refinement, QuadError> {
    refine_compiled(&compile_all(f, dom.n())?, w, dom, base)
}

pub fn refine_compiled<W: Weight + ?Sized>(
    f: &[CompiledPoly],
    w: &W,
    dom: &DomainSpec,
    base: (usize, usize),
) -> Result<Refinement, QuadError> {
    let (nr, na) = base;
    let start = if nr >= 4 && na >= 8 { (nr / 2, na / 2) } else { (nr, na) };
    let resolutions = vec![start, (start.0 * 2, start.1 * 2), (start.0 * 4, start.1 * 4)];
    let values = resolutions
        .iter()
        .map(|&(r, a)| weighted_norm2_compiled(f, w, &polydisc_grid(dom, r, a)?))
        .collect::<Result<Vec<f64>, _>>()?;
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b.abs() };
    let grows = |a: f64, b: f64| a > 0.0 && (b - a) / a > DIVERGENCE_GROWTH;
    Ok(Refinement {
        value: values[2],
        rel_change: rel(values[1], values[2]),
        diverging: grows(values[0], values[1]) && grows(values[1], values[2]),
        values,
        resolutions,
    })
}
