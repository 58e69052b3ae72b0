use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Poly, PolyError};
use crate::exterior::MultiIndex;

/// Dense row-major matrix of polynomials sharing one ring.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self, PolyError> {
        if entries.len() != rows * cols {
            return Err(PolyError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let nvars = entries.first().map(Poly::nvars).unwrap_or(0);
        if entries.iter().any(|p| p.nvars() != nvars) {
            return Err(PolyError::Shape("matrix entries live in different rings".into()));
        }
        Ok(Self { rows, cols, nvars, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self, PolyError> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(PolyError::Shape("ragged rows".into()));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Self { rows, cols, nvars, entries: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, Poly::one(nvars));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        if self.cols != rhs.rows {
            return Err(PolyError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = PolyMatrix::zeros(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Poly::zero(self.nvars);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), rhs.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `self · v` for a column of polynomials.
    pub fn mul_vec(&self, v: &[Poly]) -> Result<Vec<Poly>, PolyError> {
        if v.len() != self.cols {
            return Err(PolyError::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Poly::zero(self.nvars), |acc, k| &acc + &(self.get(i, k) * &v[k]))
            })
            .collect())
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
            .collect();
        PolyMatrix { rows: rows.len(), cols: cols.len(), nvars: self.nvars, entries }
    }

    /// Entrywise partial derivative in `z_{idx+1}`.
    pub fn derivative(&self, idx: usize) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().map(|p| p.derivative(idx)).collect(),
        }
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<DMatrix<Complex64>, PolyError> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).eval(point)?;
            }
        }
        Ok(m)
    }

    fn require_square(&self) -> Result<(), PolyError> {
        if self.rows != self.cols {
            return Err(PolyError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    /// Exact determinant by Laplace expansion along rows, memoized over
    /// column subsets (`O(n·2ⁿ)` polynomial products).
    pub fn det(&self) -> Result<Poly, PolyError> {
        self.require_square()?;
        Ok(det_rows_cols(self, &(0..self.rows).collect::<Vec<_>>(), &(0..self.cols).collect::<Vec<_>>()))
    }

    /// Transpose of the cofactor matrix, so that `M · adj(M) = det(M) · I`.
    pub fn adjugate(&self) -> Result<PolyMatrix, PolyError> {
        self.require_square()?;
        let n = self.rows;
        let mut adj = PolyMatrix::zeros(n, n, self.nvars);
        if n == 0 {
            return Ok(adj);
        }
        if n == 1 {
            adj.set(0, 0, Poly::one(self.nvars));
            return Ok(adj);
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let cof = det_rows_cols(self, &rows, &cols);
                adj.set(j, i, if (i + j) % 2 == 0 { cof } else { -cof });
            }
        }
        Ok(adj)
    }

    /// All `q×q` minors of a `q×p` matrix, keyed by increasing column sets.
    pub fn minors(&self) -> Result<BTreeMap<MultiIndex, Poly>, PolyError> {
        let (q, p) = (self.rows, self.cols);
        if q > p {
            return Err(PolyError::Shape(format!("minors need rows <= cols, got {q}x{p}")));
        }
        let rows: Vec<usize> = (0..q).collect();
        Ok(MultiIndex::all(p, q)
            .into_iter()
            .map(|idx| {
                let cols: Vec<usize> = idx.indices().iter().map(|&c| c - 1).collect();
                let d = det_rows_cols(self, &rows, &cols);
                (idx, d)
            })
            .collect())
    }
}

/// Determinant of the square submatrix on the given rows and columns.
fn det_rows_cols(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Poly {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    let nv = m.nvars;
    if n == 0 {
        return Poly::one(nv);
    }
    let full = 1usize << n;
    let mut dp: Vec<Option<Poly>> = vec![None; full];
    dp[0] = Some(Poly::one(nv));
    // dp[mask] = det(rows[0..|mask|], cols in mask), expanding along the last row.
    for mask in 1..full {
        let k = mask.count_ones() as usize - 1;
        let mut acc = Poly::zero(nv);
        let mut pos = 0;
        for (c, &col) in cols.iter().enumerate() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let a = m.get(rows[k], col);
            if !a.is_zero() {
                if let Some(sub) = &dp[mask & !(1 << c)] {
                    if !sub.is_zero() {
                        let term = a * sub;
                        acc = if (k + pos) % 2 == 0 { &acc + &term } else { &acc - &term };
                    }
                }
            }
            pos += 1;
        }
        dp[mask] = Some(acc);
    }
    dp[full - 1].take().expect("full mask computed")
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn pm(rows: &[&[&str]], n: usize) -> PolyMatrix {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse(s, n).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_examples() {
        assert_eq!(PolyMatrix::identity(2, 1).det().unwrap(), Poly::one(1));
        let m = pm(&[&["z1", "z2"], &["z3", "z4"]], 4);
        assert_eq!(m.det().unwrap(), parse("z1*z4 - z2*z3", 4).unwrap());
        let ns = PolyMatrix::zeros(2, 3, 1);
        assert!(matches!(ns.det(), Err(PolyError::NotSquare { rows: 2, cols: 3 })));
        assert!(matches!(ns.adjugate(), Err(PolyError::NotSquare { .. })));
    }

    #[test]
    fn adjugate_examples() {
        let id = PolyMatrix::identity(3, 2);
        assert_eq!(id.adjugate().unwrap(), id);
        let m = pm(&[&["z1", "z2"], &["0", "1"]], 2);
        assert_eq!(m.adjugate().unwrap(), pm(&[&["1", "-z2"], &["0", "z1"]], 2));
        let m = pm(&[&["z1", "z2", "1"], &["z2^2", "0", "z1"], &["3", "z1*z2", "(1+1i)"]], 2);
        let d = m.det().unwrap();
        let prod = m.mul(&m.adjugate().unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { Poly::zero(2) };
                assert_eq!(prod.get(i, j), &want);
            }
        }
    }

    #[test]
    fn minors_examples() {
        let phi = pm(&[&["z1", "z2"]], 2);
        let mins = phi.minors().unwrap();
        assert_eq!(mins.len(), 2);
        assert_eq!(mins[&MultiIndex::new(2, vec![1]).unwrap()], parse("z1", 2).unwrap());
        assert_eq!(mins[&MultiIndex::new(2, vec![2]).unwrap()], parse("z2", 2).unwrap());

        // det [[1,0],[0,1]] = 1, det [[1,z1],[0,z2]] = z2, det [[0,z1],[1,z2]] = -z1
        let phi = pm(&[&["1", "0", "z1"], &["0", "1", "z2"]], 2);
        let mins = phi.minors().unwrap();
        assert_eq!(mins[&MultiIndex::new(3, vec![1, 2]).unwrap()], Poly::one(2));
        assert_eq!(mins[&MultiIndex::new(3, vec![1, 3]).unwrap()], parse("z2", 2).unwrap());
        assert_eq!(mins[&MultiIndex::new(3, vec![2, 3]).unwrap()], parse("-z1", 2).unwrap());

        let phi = pm(&[&["z1", "z2", "z1"], &["1", "z2^2", "1"]], 2);
        let mins = phi.minors().unwrap();
        assert!(mins[&MultiIndex::new(3, vec![1, 3]).unwrap()].is_zero());
        assert!(pm(&[&["z1"], &["z2"]], 2).minors().is_err());
    }
}
