//! Dense complex matrices and the handful of factorizations the calculus needs:
//! LU with partial pivoting (solves and determinants), cyclic Jacobi for
//! Hermitian spectra, and tolerance-aware definiteness classification.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default relative threshold for singularity and definiteness decisions.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("matrix is singular (|det| = {det_abs:.3e}, condition estimate {condition:.3e})")]
    Singular { det_abs: f64, condition: f64 },
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Row-major dense complex matrix. Serializes as rows of `[re, im]` pairs.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Vec<Complex64>>> for CMatrix {
    type Error = NumError;

    fn try_from(rows: Vec<Vec<Complex64>>) -> Result<Self, NumError> {
        CMatrix::from_rows(&rows)
    }
}

impl From<CMatrix> for Vec<Vec<Complex64>> {
    fn from(m: CMatrix) -> Self {
        (0..m.rows).map(|r| m.data[r * m.cols..(r + 1) * m.cols].to_vec()).collect()
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. All rows must share a length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, NumError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(NumError::DimensionMismatch {
                context: "ragged rows".into(),
            });
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Ok(CMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must match shape");
        CMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { ZERO })
    }

    pub fn scalar(n: usize, s: Complex64) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { s } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn re(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest Euclidean row norm, the scale used by the singularity test.
    pub fn row_scale(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(Complex64::norm_sqr).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Selects the rows and columns listed in `rows` and `cols`, in that order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = CMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        m.set_submatrix(0, 0, a);
        m.set_submatrix(0, a.cols, b);
        m.set_submatrix(a.rows, 0, c);
        m.set_submatrix(a.rows, a.cols, d);
        m
    }

    /// Block-diagonal sum.
    pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> Self {
        Self::from_blocks(
            a,
            &CMatrix::zeros(a.rows, b.cols),
            &CMatrix::zeros(b.rows, a.cols),
            b,
        )
    }

    pub fn symmetric_part(&self) -> Self {
        (self + &self.transpose()).scale_real(0.5)
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// ‖M − Mᵀ‖ / max(‖M‖, tiny), Frobenius.
    pub fn asymmetry(&self) -> f64 {
        relative_distance(self, &self.transpose())
    }

    /// ‖M − M†‖ / max(‖M‖, tiny), Frobenius.
    pub fn non_hermiticity(&self) -> f64 {
        relative_distance(self, &self.adjoint())
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

/// ‖a − b‖_F / max(‖a‖_F, ‖b‖_F, 1e-300).
pub fn relative_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = (a - b).norm_fro();
    let scale = a.norm_fro().max(b.norm_fro()).max(1e-300);
    diff / scale
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

impl Lu {
    pub fn new(m: &CMatrix) -> Result<Self, NumError> {
        if !m.is_square() {
            return Err(NumError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if !m.is_finite() {
            return Err(NumError::NonFinite);
        }
        let n = m.rows;
        let scale = m.row_scale();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap_or(k);
            if pivot_row != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, pivot_row * n + c);
                }
                perm.swap(k, pivot_row);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot == ZERO {
                continue;
            }
            for r in (k + 1)..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for c in (k + 1)..n {
                    let u = lu[(k, c)];
                    lu[(r, c)] -= factor * u;
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn det(&self) -> Complex64 {
        let mut det = Complex64::new(self.sign, 0.0);
        for k in 0..self.dim() {
            det *= self.lu[(k, k)];
        }
        det
    }

    /// `|det| < rel_tol · scaleᴺ` where scale is the largest row norm.
    pub fn is_singular(&self, rel_tol: f64) -> bool {
        let n = self.dim();
        if n == 0 {
            return false;
        }
        if self.scale == 0.0 {
            return true;
        }
        let det_abs = self.det().norm();
        let threshold = rel_tol * self.scale.powi(n as i32);
        det_abs < threshold || (0..n).any(|k| self.lu[(k, k)] == ZERO)
    }

    /// Solves `M·X = rhs` column by column; does not check conditioning.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix, NumError> {
        let n = self.dim();
        if rhs.rows != n {
            return Err(NumError::DimensionMismatch {
                context: format!("rhs has {} rows, matrix is {n}x{n}", rhs.rows),
            });
        }
        let mut x = CMatrix::zeros(n, rhs.cols);
        let mut col = vec![ZERO; n];
        for j in 0..rhs.cols {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = rhs[(self.perm[i], j)];
            }
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.lu[(i, k)] * col[k];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * col[k];
                }
                col[i] = s / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        Ok(x)
    }
}

/// Output of [`solve_det`].
#[derive(Debug, Clone)]
pub struct SolveDet {
    pub det: Complex64,
    pub singular: bool,
    pub solution: Option<CMatrix>,
}

/// Determinant of `m` and, when `rhs` is given, the solution of `m·X = rhs`.
///
/// Without a right-hand side a singular matrix is reported through the flag;
/// with one, singularity is an error carrying a condition estimate.
pub fn solve_det(m: &CMatrix, rhs: Option<&CMatrix>, rel_tol: f64) -> Result<SolveDet, NumError> {
    let lu = Lu::new(m)?;
    let det = lu.det();
    let singular = lu.is_singular(rel_tol);
    let solution = match rhs {
        None => None,
        Some(_) if singular => {
            return Err(NumError::Singular {
                det_abs: det.norm(),
                condition: condition_number(m)?,
            })
        }
        Some(b) => Some(lu.solve(b)?),
    };
    Ok(SolveDet {
        det,
        singular,
        solution,
    })
}

pub fn det(m: &CMatrix) -> Result<Complex64, NumError> {
    Ok(Lu::new(m)?.det())
}

/// Solves `m·X = rhs` with the default singularity gate.
pub fn solve(m: &CMatrix, rhs: &CMatrix) -> Result<CMatrix, NumError> {
    solve_det(m, Some(rhs), DEFAULT_REL_TOL).map(|s| s.solution.expect("rhs was supplied"))
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix, NumError> {
    solve(m, &CMatrix::identity(m.rows()))
}

/// Extreme singular values `(σ_min, σ_max)` from the Hermitian dilation
/// `[[0, M], [M†, 0]]`, whose spectrum is `±σᵢ`.
pub fn singular_value_bounds(m: &CMatrix) -> Result<(f64, f64), NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let dilation = CMatrix::from_blocks(&CMatrix::zeros(n, n), m, &m.adjoint(), &CMatrix::zeros(n, n));
    let eigs = herm_eigs(&dilation)?;
    // ascending: the top n eigenvalues are the singular values
    let sigma_min = eigs[n].max(0.0);
    let sigma_max = eigs[2 * n - 1].max(0.0);
    Ok((sigma_min, sigma_max))
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &CMatrix) -> Result<f64, NumError> {
    let (lo, hi) = singular_value_bounds(m)?;
    Ok(if lo == 0.0 { f64::INFINITY } else { hi / lo })
}

/// Reciprocal condition number σ_min/σ_max, zero for the zero matrix.
pub fn invertibility_margin(m: &CMatrix) -> Result<f64, NumError> {
    let (lo, hi) = singular_value_bounds(m)?;
    Ok(if hi == 0.0 { 0.0 } else { lo / hi })
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn herm_eigs(m: &CMatrix) -> Result<Vec<f64>, NumError> {
    herm_eig(m).map(|e| e.values)
}

/// Cyclic Jacobi eigensolver for Hermitian input.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_finite() {
        return Err(NumError::NonFinite);
    }
    let deviation = m.non_hermiticity();
    if deviation > DEFAULT_REL_TOL {
        return Err(NumError::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total = a.norm_fro();
    if total > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
                .map(|(r, c)| a[(r, c)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-16 * total {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `U = diag-phase · real rotation`, with columns
/// `U[:,p] = (c, -s·ē)`, `U[:,q] = (s, c·ē)` in the (p, q) plane, where `e` is
/// the phase of `a[p][q]`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let n = a.rows;
    let e = g / g_abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let upp = Complex64::new(c, 0.0);
    let uqp = -e.conj() * s;
    let upq = Complex64::new(s, 0.0);
    let uqq = e.conj() * c;

    // A ← A·U (columns p, q)
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * upp + arq * uqp;
        a[(r, q)] = arp * upq + arq * uqq;
    }
    // A ← U†·A (rows p, q)
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = upp.conj() * apc + uqp.conj() * aqc;
        a[(q, col)] = upq.conj() * apc + uqq.conj() * aqc;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * upp + vrq * uqp;
        v[(r, q)] = vrp * upq + vrq * uqq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefinitenessStatus {
    PosDef,
    PosSemiDef,
    Indefinite,
    NegSemiDef,
    NegDef,
    Zero,
}

impl DefinitenessStatus {
    pub fn mirrored(self) -> Self {
        use DefinitenessStatus::*;
        match self {
            PosDef => NegDef,
            PosSemiDef => NegSemiDef,
            NegDef => PosDef,
            NegSemiDef => PosSemiDef,
            Indefinite => Indefinite,
            Zero => Zero,
        }
    }

    /// True for PosDef, PosSemiDef and Zero.
    pub fn is_nonnegative(self) -> bool {
        matches!(
            self,
            DefinitenessStatus::PosDef | DefinitenessStatus::PosSemiDef | DefinitenessStatus::Zero
        )
    }
}

impl fmt::Display for DefinitenessStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DefinitenessStatus::PosDef => "PosDef",
            DefinitenessStatus::PosSemiDef => "PosSemiDef",
            DefinitenessStatus::Indefinite => "Indefinite",
            DefinitenessStatus::NegSemiDef => "NegSemiDef",
            DefinitenessStatus::NegDef => "NegDef",
            DefinitenessStatus::Zero => "Zero",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Definiteness {
    pub status: DefinitenessStatus,
    /// Smallest eigenvalue magnitude over the largest; 0 when degenerate.
    pub margin: f64,
    /// Spectral scale max|λ| used for the zero threshold.
    pub scale: f64,
    /// Ascending eigenvalues after tolerance zeroing.
    pub eigenvalues: Vec<f64>,
}

impl Definiteness {
    /// (number of positive, number of negative) eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let pos = self.eigenvalues.iter().filter(|&&x| x > 0.0).count();
        let neg = self.eigenvalues.iter().filter(|&&x| x < 0.0).count();
        (pos, neg)
    }

    /// Smallest eigenvalue divided by the scale; negative when the form dips.
    pub fn min_relative(&self) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.eigenvalues.first().copied().unwrap_or(0.0) / self.scale
    }

    pub fn is_nonnegative(&self) -> bool {
        self.status.is_nonnegative()
    }
}

/// Classifies a Hermitian matrix; eigenvalues within `tol·max|λ|` of zero
/// count as zero.
pub fn classify(m: &CMatrix, tol: f64) -> Result<Definiteness, NumError> {
    let raw = herm_eigs(m)?;
    Ok(classify_eigenvalues(&raw, tol))
}

/// Like [`classify`], but the zero threshold is `tol·max(max|λ|, reference)`.
/// Forms that arise by cancellation pass the size of their ingredients as
/// `reference` so that roundoff is not mistaken for a sign.
pub fn classify_scaled(m: &CMatrix, tol: f64, reference: f64) -> Result<Definiteness, NumError> {
    let raw = herm_eigs(m)?;
    Ok(classify_eigenvalues_scaled(&raw, tol, reference))
}

pub fn classify_eigenvalues(raw: &[f64], tol: f64) -> Definiteness {
    classify_eigenvalues_scaled(raw, tol, 0.0)
}

pub fn classify_eigenvalues_scaled(raw: &[f64], tol: f64, reference: f64) -> Definiteness {
    let scale = raw.iter().map(|x| x.abs()).fold(reference.abs(), f64::max);
    let threshold = tol * scale;
    let eigenvalues: Vec<f64> = raw
        .iter()
        .map(|&x| if x.abs() <= threshold { 0.0 } else { x })
        .collect();
    let pos = eigenvalues.iter().filter(|&&x| x > 0.0).count();
    let neg = eigenvalues.iter().filter(|&&x| x < 0.0).count();
    let zero = eigenvalues.len() - pos - neg;
    use DefinitenessStatus::*;
    let status = match (pos, neg, zero) {
        (_, 0, 0) if pos > 0 => PosDef,
        (0, _, 0) if neg > 0 => NegDef,
        (0, 0, _) => Zero,
        (_, 0, _) => PosSemiDef,
        (0, _, _) => NegSemiDef,
        _ => Indefinite,
    };
    let margin = if scale == 0.0 || zero > 0 {
        0.0
    } else {
        eigenvalues.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min) / scale
    };
    Definiteness {
        status,
        margin,
        scale,
        eigenvalues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_rows_of_pairs() {
        let m = CMatrix::from_rows(&[vec![Complex64::new(1.0, 2.0), ZERO], vec![I, ONE]]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[[1.0,2.0],[0.0,0.0]],[[0.0,1.0],[1.0,0.0]]]");
        assert_eq!(serde_json::from_str::<CMatrix>(&text).unwrap(), m);
        assert!(serde_json::from_str::<CMatrix>("[[[1,0]],[[1,0],[0,0]]]").is_err());
        assert!(serde_json::from_str::<CMatrix>("[[1,0]]").is_err());
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lcg_matrix(n: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_solve() {
        let m = CMatrix::identity(2);
        let rhs = CMatrix::from_real(2, 1, &[1.0, 2.0]);
        let out = solve_det(&m, Some(&rhs), DEFAULT_REL_TOL).unwrap();
        assert_eq!(out.det, ONE);
        assert!(!out.singular);
        assert_eq!(out.solution.unwrap(), rhs);
    }

    #[test]
    fn symplectic_j_has_unit_det() {
        let j = CMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let out = solve_det(&j, None, DEFAULT_REL_TOL).unwrap();
        assert!((out.det - ONE).norm() < 1e-15);
        assert!(!out.singular);
    }

    #[test]
    fn rank_one_is_flagged() {
        let m = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let out = solve_det(&m, None, DEFAULT_REL_TOL).unwrap();
        assert!(out.singular);
        let rhs = CMatrix::from_real(2, 1, &[1.0, 0.0]);
        match solve_det(&m, Some(&rhs), DEFAULT_REL_TOL) {
            Err(NumError::Singular { condition, .. }) => assert!(condition > 1e12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn zero_matrix_is_singular() {
        let out = solve_det(&CMatrix::zeros(3, 3), None, DEFAULT_REL_TOL).unwrap();
        assert!(out.singular);
        assert_eq!(out.det, ZERO);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            solve_det(&CMatrix::zeros(2, 3), None, DEFAULT_REL_TOL),
            Err(NumError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn herm_eigs_examples() {
        let d = CMatrix::diag(&[c(4.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(herm_eigs(&d).unwrap(), vec![1.0, 4.0]);
        let swap = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = herm_eigs(&swap).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        let quarter = CMatrix::scalar(3, c(0.25, 0.0));
        assert!(herm_eigs(&quarter).unwrap().iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn herm_eigs_rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(herm_eigs(&m), Err(NumError::NotHermitian { .. })));
    }

    #[test]
    fn complex_phase_offdiagonal() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]]).unwrap();
        let e = herm_eigs(&m).unwrap();
        assert!(e[0].abs() < 1e-15 && (e[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 7);
            let a = lcg_matrix(n, seed);
            let h = a.hermitian_part();
            let eig = herm_eig(&h).unwrap();
            let lambda = CMatrix::diag(&eig.values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let rebuilt = &(&eig.vectors * &lambda) * &eig.vectors.adjoint();
            assert!(relative_distance(&rebuilt, &h) < 1e-12, "seed {seed}");
            let gram = &eig.vectors.adjoint() * &eig.vectors;
            assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn random_solve_residual() {
        for seed in 100..120 {
            let n = 1 + (seed as usize % 6);
            let m = &lcg_matrix(n, seed) + &CMatrix::scalar(n, c(3.0, 0.0));
            let rhs = lcg_matrix(n, seed + 1000);
            let x = solve(&m, &rhs).unwrap();
            let resid = (&(&m * &x) - &rhs).norm_fro();
            assert!(resid <= 1e-10 * m.norm_fro() * x.norm_fro());
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = CMatrix::diag(&[c(0.0, 3.0), c(-0.5, 0.0)]);
        let (lo, hi) = singular_value_bounds(&m).unwrap();
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
        assert!((condition_number(&m).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let pd = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let d = classify(&pd, DEFAULT_REL_TOL).unwrap();
        assert_eq!(d.status, DefinitenessStatus::PosDef);
        assert!((d.margin - 0.5).abs() < 1e-15);
        let psd = CMatrix::diag(&[c(0.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(classify(&psd, DEFAULT_REL_TOL).unwrap().status, DefinitenessStatus::PosSemiDef);
        let ind = CMatrix::diag(&[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(classify(&ind, DEFAULT_REL_TOL).unwrap().status, DefinitenessStatus::Indefinite);
        let z = CMatrix::zeros(2, 2);
        assert_eq!(classify(&z, DEFAULT_REL_TOL).unwrap().status, DefinitenessStatus::Zero);
    }

    #[test]
    fn tiny_eigenvalue_counts_as_zero() {
        let m = CMatrix::diag(&[c(1e-12, 0.0), c(1.0, 0.0)]);
        let d = classify(&m, DEFAULT_REL_TOL).unwrap();
        assert_eq!(d.status, DefinitenessStatus::PosSemiDef);
        assert_eq!(d.margin, 0.0);
        assert_eq!(d.signature(), (1, 0));
    }

    #[test]
    fn classify_negation_mirrors() {
        for seed in 0..30 {
            let n = 1 + seed as usize % 5;
            let h = lcg_matrix(n, seed + 77).hermitian_part();
            let a = classify(&h, DEFAULT_REL_TOL).unwrap();
            let b = classify(&-&h, DEFAULT_REL_TOL).unwrap();
            assert_eq!(a.status.mirrored(), b.status);
        }
    }
}
