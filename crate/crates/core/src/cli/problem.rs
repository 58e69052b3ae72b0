//! JSON problem files.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adjdiv::ScalarDivisionData;
use crate::exterior::{MultiIndex, SymExt};
use crate::koszul::KoszulSection;
use crate::poly::{parse, Poly, PolyMatrix};
use crate::quad::{DomainSpec, Psi, WeightSpec};

use super::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_version")]
    pub version: String,
    pub n: usize,
    /// Defaults to the number of generators.
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub generators: Vec<String>,
    /// Multi-index key (`"1,3"`, or `""` for degree 0) to polynomial.
    #[serde(default)]
    pub target: BTreeMap<String, String>,
    #[serde(default)]
    pub weight: WeightFile,
    #[serde(default)]
    pub domain: Option<DomainFile>,
    #[serde(default)]
    pub solver: SolverFile,
    /// Raw matrix for single-map exactness scores.
    #[serde(default)]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub adjugate: Option<AdjugateFile>,
}

fn default_version() -> String {
    "1".into()
}

fn default_p() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    #[serde(default = "default_psi")]
    pub psi: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub q: Option<u32>,
}

fn default_psi() -> String {
    "0".into()
}

fn default_epsilon() -> f64 {
    1.0
}

impl Default for WeightFile {
    fn default() -> Self {
        Self { psi: default_psi(), epsilon: default_epsilon(), q: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub kind: String,
    pub center: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    #[serde(default)]
    pub degree: Option<u32>,
    #[serde(default = "default_res")]
    pub n_rad: usize,
    #[serde(default = "default_res")]
    pub n_ang: usize,
}

fn default_res() -> usize {
    16
}

impl Default for SolverFile {
    fn default() -> Self {
        Self { degree: None, n_rad: default_res(), n_ang: default_res() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjugateFile {
    pub matrix: Vec<Vec<String>>,
    pub rhs: Vec<String>,
    #[serde(default)]
    pub u: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub v: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::parse(format!("{what}: {e}"))
}

pub fn poly(text: &str, n: usize, what: &str) -> Result<Poly, CliError> {
    parse(text, n).map_err(|e| parse_err(&format!("{what} {text:?}"), e))
}

pub fn poly_matrix(rows: &[Vec<String>], n: usize, what: &str) -> Result<PolyMatrix, CliError> {
    let parsed = rows
        .iter()
        .map(|row| row.iter().map(|s| poly(s, n, what)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    PolyMatrix::from_rows(parsed).map_err(|e| parse_err(what, e))
}

fn parse_scale(prefix: &str) -> Result<f64, CliError> {
    if prefix.is_empty() {
        return Ok(1.0);
    }
    let c = prefix.strip_suffix('*').unwrap_or(prefix);
    c.parse::<f64>().map_err(|e| parse_err(&format!("psi coefficient {c:?}"), e))
}

/// `0`, `c*|z|^2`, `c*log(1+|z|^2)`, or a real polynomial where `zj`
/// stands for `|z_j|²`.
pub fn parse_psi(text: &str, n: usize) -> Result<Psi, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(prefix) = t.strip_suffix("log(1+|z|^2)") {
        return Ok(Psi::LogFubiniStudy(parse_scale(prefix)?));
    }
    if let Some(prefix) = t.strip_suffix("|z|^2") {
        return Ok(Psi::Quadratic(parse_scale(prefix)?));
    }
    let p = poly(&t, n, "psi")?;
    if p.is_zero() {
        return Ok(Psi::Zero);
    }
    if p.terms().any(|(_, c)| !c.is_real()) {
        return Err(CliError::parse(format!("psi {text:?} must have real coefficients")));
    }
    Ok(Psi::PolyInAbs2(p))
}

/// A validated problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub n: usize,
    pub p: usize,
    pub generators: Vec<Poly>,
    pub ws: WeightSpec,
    pub dom: DomainSpec,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| parse_err("problem file", e))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Self, CliError> {
        let n = file.n;
        if n == 0 {
            return Err(CliError::parse("n must be positive"));
        }
        let generators = file.generators.iter().map(|g| poly(g, n, "generator")).collect::<Result<Vec<_>, _>>()?;
        if let Some(r) = file.r {
            if r != generators.len() && !generators.is_empty() {
                return Err(CliError::parse(format!("r = {r} but {} generators given", generators.len())));
            }
        }
        let ws = WeightSpec {
            psi: parse_psi(&file.weight.psi, n)?,
            epsilon: file.weight.epsilon,
            q: file.weight.q,
        };
        ws.validate().map_err(|e| parse_err("weight", e))?;
        let dom = match &file.domain {
            None => DomainSpec::unit_polydisc(n),
            Some(d) => {
                if d.kind != "polydisc" {
                    return Err(CliError::parse(format!("unsupported domain kind {:?}", d.kind)));
                }
                if d.radii.len() != n {
                    return Err(CliError::parse(format!("domain has {} radii, n = {n}", d.radii.len())));
                }
                DomainSpec::new(d.center.iter().map(|c| Complex64::new(c[0], c[1])).collect(), d.radii.clone())
                    .map_err(|e| parse_err("domain", e))?
            }
        };
        let p = file.p;
        Ok(Self { file, n, p, generators, ws, dom })
    }

    pub fn r(&self) -> usize {
        self.generators.len()
    }

    pub fn section(&self) -> Result<KoszulSection, CliError> {
        if self.generators.is_empty() {
            return Err(CliError::parse("problem has no generators"));
        }
        KoszulSection::new(self.generators.clone()).map_err(|e| parse_err("generators", e))
    }

    /// Target of degree `p − 1`.
    pub fn target(&self) -> Result<SymExt, CliError> {
        let r = self.r();
        if self.p == 0 || self.p > r {
            return Err(CliError::parse(format!("p = {} outside 1..={r}", self.p)));
        }
        let mut coeffs = Vec::new();
        for (k, v) in &self.file.target {
            let idx = MultiIndex::parse(r, k).map_err(|e| parse_err(&format!("target key {k:?}"), e))?;
            if idx.len() != self.p - 1 {
                return Err(CliError::parse(format!("target key {k:?} has length {}, expected {}", idx.len(), self.p - 1)));
            }
            coeffs.push((idx, poly(v, self.n, "target")?));
        }
        SymExt::from_coeffs(r, self.p - 1, coeffs).map_err(|e| parse_err("target", e))
    }

    pub fn raw_matrix(&self) -> Result<Option<PolyMatrix>, CliError> {
        self.file.matrix.as_ref().map(|m| poly_matrix(m, self.n, "matrix")).transpose()
    }

    pub fn adjugate(&self) -> Result<AdjugateInput, CliError> {
        let a = self.file.adjugate.as_ref().ok_or_else(|| CliError::parse("problem has no adjugate section"))?;
        let phi = poly_matrix(&a.matrix, self.n, "adjugate matrix")?;
        let (q, p) = (phi.rows(), phi.cols());
        if q == 0 || q > p {
            return Err(CliError::parse(format!("adjugate matrix is {q}x{p}, need 1 <= q <= p")));
        }
        let rhs = a.rhs.iter().map(|s| poly(s, self.n, "adjugate rhs")).collect::<Result<Vec<_>, _>>()?;
        let column_map = |m: &BTreeMap<String, Vec<String>>, what: &str| -> Result<BTreeMap<MultiIndex, Vec<Poly>>, CliError> {
            m.iter()
                .map(|(k, col)| {
                    let idx = MultiIndex::parse(p, k).map_err(|e| parse_err(&format!("{what} key {k:?}"), e))?;
                    if idx.len() != q {
                        return Err(CliError::parse(format!("{what} key {k:?} must have {q} entries")));
                    }
                    let col = col.iter().map(|s| poly(s, self.n, what)).collect::<Result<Vec<_>, _>>()?;
                    Ok((idx, col))
                })
                .collect()
        };
        let u = a.u.as_ref().map(|u| column_map(u, "u")).transpose()?;
        let v = column_map(&a.v, "v")?;
        Ok(AdjugateInput { phi, rhs, data: u.map(|u| ScalarDivisionData { u, v: v.clone() }), v, alpha: a.alpha })
    }
}

#[derive(Debug, Clone)]
pub struct AdjugateInput {
    pub phi: PolyMatrix,
    pub rhs: Vec<Poly>,
    /// `None` when `u` must come from single-minor division.
    pub data: Option<ScalarDivisionData>,
    pub v: BTreeMap<MultiIndex, Vec<Poly>>,
    pub alpha: Option<f64>,
}

/// JSON list of points, each a list of `[re, im]` pairs.
pub fn parse_points(text: &str, n: usize) -> Result<Vec<Vec<Complex64>>, CliError> {
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| parse_err("points file", e))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, p)| {
            if p.len() != n {
                return Err(CliError::parse(format!("point {i} has {} coordinates, n = {n}", p.len())));
            }
            Ok(p.into_iter().map(|c| Complex64::new(c[0], c[1])).collect())
        })
        .collect()
}
