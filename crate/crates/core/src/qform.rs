//! Quadratic forms on ℂⁿ and ℂ²ⁿ: mixed (real-analytic) forms, holomorphic
//! forms, strictly plurisubharmonic weights and their polarizations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{self, classify, CMatrix, Definiteness, DEFAULT_REL_TOL, I, ONE, ZERO};

/// `q(x) = xᵀBx + x̄ᵀCx + x̄ᵀDx̄` on ℂⁿ, with `B`, `D` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedQuadForm {
    n: usize,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

impl MixedQuadForm {
    /// Symmetrizes `b` and `d`; the value of the form is unchanged.
    pub fn new(b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = b.rows();
        for (name, m) in [("B", &b), ("C", &c), ("D", &d)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!(
                    "block {name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(numkernel::NumError::NonFinite.into());
            }
        }
        Ok(MixedQuadForm {
            n,
            b: b.symmetric_part(),
            c,
            d: d.symmetric_part(),
        })
    }

    pub fn zero(n: usize) -> Self {
        MixedQuadForm {
            n,
            b: CMatrix::zeros(n, n),
            c: CMatrix::zeros(n, n),
            d: CMatrix::zeros(n, n),
        }
    }

    /// `λ|x|²`.
    pub fn radial(n: usize, lambda: Complex64) -> Self {
        MixedQuadForm {
            n,
            b: CMatrix::zeros(n, n),
            c: CMatrix::scalar(n, lambda),
            d: CMatrix::zeros(n, n),
        }
    }

    /// `λ|x|² + A x̄·x̄`.
    pub fn radial_with_antiholomorphic(lambda: Complex64, a: &CMatrix) -> Result<Self> {
        let n = a.rows();
        Self::new(CMatrix::zeros(n, n), CMatrix::scalar(n, lambda), a.clone())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.n);
        let xb: Vec<Complex64> = x.iter().map(Complex64::conj).collect();
        dot(x, &self.b.mul_vec(x)) + dot(&xb, &self.c.mul_vec(x)) + dot(&xb, &self.d.mul_vec(&xb))
    }

    /// Real-valued iff `D = B̄` and `C` Hermitian.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.b.norm_fro().max(self.c.norm_fro()).max(self.d.norm_fro());
        if scale == 0.0 {
            return true;
        }
        (&self.d - &self.b.conj()).norm_fro() <= tol * scale
            && (&self.c - &self.c.adjoint()).norm_fro() <= tol * scale
    }

    pub fn real_part(&self) -> RealQuadOnC {
        RealQuadOnC::from_fn(self.n, |x| self.eval(x).re)
    }

    pub fn imag_part(&self) -> RealQuadOnC {
        RealQuadOnC::from_fn(self.n, |x| self.eval(x).im)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        MixedQuadForm {
            n: self.n,
            b: self.b.scale(s),
            c: self.c.scale(s),
            d: self.d.scale(s),
        }
    }

    pub fn add(&self, other: &MixedQuadForm) -> Self {
        assert_eq!(self.n, other.n);
        MixedQuadForm {
            n: self.n,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
            d: &self.d + &other.d,
        }
    }

    pub fn max_abs_diff(&self, other: &MixedQuadForm) -> f64 {
        self.b
            .max_abs_diff(&other.b)
            .max(self.c.max_abs_diff(&other.c))
            .max(self.d.max_abs_diff(&other.d))
    }

    pub fn scale_norm(&self) -> f64 {
        self.b.norm_max().max(self.c.norm_max()).max(self.d.norm_max())
    }
}

/// `f(u) = ½ uᵀMu` on ℂᴺ with `M` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloQuadForm {
    m: CMatrix,
}

impl HoloQuadForm {
    /// Takes the Hessian `m`, symmetrizing it.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "Hessian must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(numkernel::NumError::NonFinite.into());
        }
        Ok(HoloQuadForm {
            m: m.symmetric_part(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        HoloQuadForm {
            m: CMatrix::zeros(dim, dim),
        }
    }

    /// `c·x·ξ` on ℂⁿ × ℂⁿ.
    pub fn bilinear_x_xi(n: usize, c: Complex64) -> Self {
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            m[(j, n + j)] = c;
            m[(n + j, j)] = c;
        }
        HoloQuadForm { m }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn hessian(&self) -> &CMatrix {
        &self.m
    }

    pub fn eval(&self, u: &[Complex64]) -> Complex64 {
        0.5 * dot(u, &self.m.mul_vec(u))
    }

    /// Gradient `M·u`.
    pub fn gradient(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.m.mul_vec(u)
    }

    /// Pulls the form back along a linear substitution `u = L·v`.
    pub fn pullback(&self, l: &CMatrix) -> HoloQuadForm {
        HoloQuadForm {
            m: (&(&l.transpose() * &self.m) * l).symmetric_part(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        HoloQuadForm { m: self.m.scale(s) }
    }

    pub fn add(&self, other: &HoloQuadForm) -> Self {
        HoloQuadForm {
            m: &self.m + &other.m,
        }
    }

    /// Restricts a form on ℂ²ⁿ = (x, y) to the anti-diagonal `y = x̄`.
    pub fn unpolarize(&self) -> Result<MixedQuadForm> {
        let dim = self.dim();
        if dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "unpolarize needs an even dimension, got {dim}"
            )));
        }
        let n = dim / 2;
        let m = &self.m;
        MixedQuadForm::new(
            m.submatrix(0, 0, n, n).scale_real(0.5),
            m.submatrix(n, 0, n, n),
            m.submatrix(n, n, n, n).scale_real(0.5),
        )
    }

    pub fn max_abs_diff(&self, other: &HoloQuadForm) -> f64 {
        self.m.max_abs_diff(&other.m)
    }
}

/// Strictly plurisubharmonic quadratic weight `Φ₀(x) = Re(xᵀPx) + x†Hx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    n: usize,
    p: CMatrix,
    h: CMatrix,
    definiteness: Definiteness,
}

impl Weight {
    /// Symmetrizes `P`, requires `H` Hermitian (to the default tolerance) and
    /// positive definite.
    pub fn new(p: CMatrix, h: CMatrix) -> Result<Self> {
        let n = h.rows();
        if !h.is_square() || p.rows() != n || p.cols() != n {
            return Err(Error::Dimension(format!(
                "weight blocks must be {n}x{n}: P is {}x{}, H is {}x{}",
                p.rows(),
                p.cols(),
                h.rows(),
                h.cols()
            )));
        }
        if !p.is_finite() || !h.is_finite() {
            return Err(numkernel::NumError::NonFinite.into());
        }
        let deviation = h.non_hermiticity();
        if deviation > DEFAULT_REL_TOL {
            return Err(Error::NotHermitian {
                what: "weight Hermitian part H",
                deviation,
            });
        }
        let h = h.hermitian_part();
        let definiteness = classify(&h, DEFAULT_REL_TOL)?;
        if definiteness.status != numkernel::DefinitenessStatus::PosDef {
            return Err(Error::NotPositiveDefinite {
                what: "weight Hermitian part H",
                definiteness,
            });
        }
        Ok(Weight {
            n,
            p: p.symmetric_part(),
            h,
            definiteness,
        })
    }

    /// The model weight `|x|²/4`.
    pub fn model(n: usize) -> Self {
        Weight::new(CMatrix::zeros(n, n), CMatrix::scalar(n, Complex64::new(0.25, 0.0)))
            .expect("|x|²/4 is strictly plurisubharmonic")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    /// Margin of `H ≻ 0` certified at construction.
    pub fn definiteness(&self) -> &Definiteness {
        &self.definiteness
    }

    pub fn eval(&self, x: &[Complex64]) -> f64 {
        self.as_mixed().eval(x).re
    }

    pub fn as_mixed(&self) -> MixedQuadForm {
        MixedQuadForm {
            n: self.n,
            b: self.p.scale_real(0.5),
            c: self.h.clone(),
            d: self.p.conj().scale_real(0.5),
        }
    }

    pub fn real_form(&self) -> RealQuadOnC {
        RealQuadOnC::from_fn(self.n, |x| self.eval(x))
    }

    /// `Φ_herm(x) = x†Hx`.
    pub fn herm(&self) -> MixedQuadForm {
        MixedQuadForm {
            n: self.n,
            b: CMatrix::zeros(self.n, self.n),
            c: self.h.clone(),
            d: CMatrix::zeros(self.n, self.n),
        }
    }

    /// Polarization `Ψ₀(x, y) = ½xᵀPx + yᵀHx + ½yᵀP̄y`.
    pub fn psi0(&self) -> HoloQuadForm {
        polarize(&self.as_mixed())
    }

    /// Polarization `Ψ_herm(x, y) = yᵀHx`.
    pub fn psi_herm(&self) -> HoloQuadForm {
        polarize(&self.herm())
    }

    /// Holomorphic parametrization `(x, y) ↦ (x, (2/i)(Px + Hᵀy))` of ℂ²ⁿ;
    /// `Λ_Φ₀` is the image of the anti-diagonal `y = x̄`.
    pub fn parametrization(&self) -> CMatrix {
        let n = self.n;
        let two_over_i = Complex64::new(0.0, -2.0);
        CMatrix::from_blocks(
            &CMatrix::identity(n),
            &CMatrix::zeros(n, n),
            &self.p.scale(two_over_i),
            &self.h.transpose().scale(two_over_i),
        )
    }

    /// `ξ(x) = (2/i) ∂Φ₀/∂x`.
    pub fn xi(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.lambda_point(x).split_off(self.n)
    }

    /// The point `(x, ξ(x))` of `Λ_Φ₀`.
    pub fn lambda_point(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut u = x.to_vec();
        u.extend(x.iter().map(Complex64::conj));
        self.parametrization().mul_vec(&u)
    }

    pub fn max_abs_diff(&self, other: &Weight) -> f64 {
        self.p.max_abs_diff(&other.p).max(self.h.max_abs_diff(&other.h))
    }
}

/// Real quadratic form `t ↦ tᵀSt` on ℂⁿ ≅ ℝ²ⁿ with `t = (Re x, Im x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealQuadOnC {
    n: usize,
    s: Vec<f64>,
}

impl RealQuadOnC {
    /// Recovers the matrix of a real quadratic function by polarization on
    /// the real basis vectors.
    pub fn from_fn(n: usize, f: impl Fn(&[Complex64]) -> f64) -> Self {
        let dim = 2 * n;
        let basis = |k: usize| -> Vec<Complex64> {
            let mut x = vec![ZERO; n];
            if k < n {
                x[k] = ONE;
            } else {
                x[k - n] = I;
            }
            x
        };
        let diag: Vec<f64> = (0..dim).map(|k| f(&basis(k))).collect();
        let mut s = vec![0.0; dim * dim];
        for a in 0..dim {
            s[a * dim + a] = diag[a];
            for b in (a + 1)..dim {
                let sum: Vec<Complex64> = basis(a).iter().zip(basis(b)).map(|(u, v)| u + v).collect();
                let off = 0.5 * (f(&sum) - diag[a] - diag[b]);
                s[a * dim + b] = off;
                s[b * dim + a] = off;
            }
        }
        RealQuadOnC { n, s }
    }

    pub fn from_matrix(n: usize, s: Vec<f64>) -> Result<Self> {
        let dim = 2 * n;
        if s.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "real form on C^{n} needs {} entries, got {}",
                dim * dim,
                s.len()
            )));
        }
        let mut sym = s.clone();
        for a in 0..dim {
            for b in 0..dim {
                sym[a * dim + b] = 0.5 * (s[a * dim + b] + s[b * dim + a]);
            }
        }
        Ok(RealQuadOnC { n, s: sym })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[f64] {
        &self.s
    }

    pub fn eval(&self, x: &[Complex64]) -> f64 {
        let t: Vec<f64> = x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)).collect();
        let dim = t.len();
        let mut v = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                v += t[a] * self.s[a * dim + b] * t[b];
            }
        }
        v
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_real(2 * self.n, 2 * self.n, &self.s)
    }

    pub fn classify(&self, tol: f64) -> Result<Definiteness> {
        Ok(classify(&self.to_cmatrix(), tol)?)
    }

    /// Classification with the zero threshold measured against `reference`.
    pub fn classify_scaled(&self, tol: f64, reference: f64) -> Result<Definiteness> {
        Ok(numkernel::classify_scaled(&self.to_cmatrix(), tol, reference)?)
    }

    pub fn sub(&self, other: &RealQuadOnC) -> RealQuadOnC {
        assert_eq!(self.n, other.n);
        RealQuadOnC {
            n: self.n,
            s: self.s.iter().zip(&other.s).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> RealQuadOnC {
        RealQuadOnC {
            n: self.n,
            s: self.s.iter().map(|a| a * k).collect(),
        }
    }

    pub fn norm_max(&self) -> f64 {
        self.s.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }
}

/// The unique holomorphic form on ℂ²ⁿ with `qᵖⁱ(x, x̄) = q(x)`:
/// `qᵖⁱ(x, y) = xᵀBx + yᵀCx + yᵀDy`.
pub fn polarize(q: &MixedQuadForm) -> HoloQuadForm {
    let m = CMatrix::from_blocks(
        &q.b.scale_real(2.0),
        &q.c.transpose(),
        &q.c,
        &q.d.scale_real(2.0),
    );
    HoloQuadForm { m }
}

/// Hermitian part and polarizations of a weight.
#[derive(Debug, Clone)]
pub struct WeightParts {
    pub herm: MixedQuadForm,
    pub psi0: HoloQuadForm,
    pub psi_herm: HoloQuadForm,
}

pub fn weight_parts(weight: &Weight) -> WeightParts {
    WeightParts {
        herm: weight.herm(),
        psi0: weight.psi0(),
        psi_herm: weight.psi_herm(),
    }
}

/// A form on ℂ²ⁿ evaluated along `Λ_Φ₀`.
#[derive(Debug, Clone)]
pub struct LambdaRestriction {
    /// `x ↦ Re F(x, ξ(x))`.
    pub re: RealQuadOnC,
    /// `x ↦ Im F(x, ξ(x))`.
    pub im: RealQuadOnC,
    /// `R(x, z) = F(x, ξᵖⁱ(x, z))`, so that `R(x, x̄)` is the restriction.
    pub polarized: HoloQuadForm,
    /// Size of the ingredients `‖F‖·‖T‖²`, the reference for zero tests.
    pub scale: f64,
}

impl LambdaRestriction {
    pub fn classify_im(&self, tol: f64) -> Result<Definiteness> {
        self.im.classify_scaled(tol, self.scale)
    }

    pub fn classify_re(&self, tol: f64) -> Result<Definiteness> {
        self.re.classify_scaled(tol, self.scale)
    }
}

pub fn restrict_to_lambda(f: &HoloQuadForm, weight: &Weight) -> Result<LambdaRestriction> {
    if f.dim() != 2 * weight.dim() {
        return Err(Error::Dimension(format!(
            "form on C^{} cannot be restricted to Λ in C^{}",
            f.dim(),
            2 * weight.dim()
        )));
    }
    let t = weight.parametrization();
    let polarized = f.pullback(&t);
    let on_lambda = polarized.unpolarize()?;
    Ok(LambdaRestriction {
        re: on_lambda.real_part(),
        im: on_lambda.imag_part(),
        polarized,
        scale: f.hessian().norm_max() * t.norm_max().powi(2),
    })
}

/// Dual of the real positive definite form `½Ax·x`, namely `½A⁻¹ξ·ξ`.
pub fn dual_form(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("dual form needs a square matrix".into()));
    }
    let scale = a.norm_max().max(1e-300);
    if a.as_slice().iter().any(|z| z.im.abs() > DEFAULT_REL_TOL * scale) {
        return Err(Error::NotSymmetric {
            what: "dual form argument (must be real)",
            deviation: a.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale,
        });
    }
    let asym = a.asymmetry();
    if asym > DEFAULT_REL_TOL {
        return Err(Error::NotSymmetric {
            what: "dual form argument",
            deviation: asym,
        });
    }
    let sym = CMatrix::from_real(a.rows(), a.cols(), &a.symmetric_part().re());
    let definiteness = classify(&sym, DEFAULT_REL_TOL)?;
    if definiteness.status != numkernel::DefinitenessStatus::PosDef {
        return Err(Error::NotPositiveDefinite {
            what: "dual form argument",
            definiteness,
        });
    }
    let inv = numkernel::inverse(&sym)?;
    Ok(CMatrix::from_real(inv.rows(), inv.cols(), &inv.symmetric_part().re()))
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    fn random_matrix(n: usize, next: &mut impl FnMut() -> f64) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn random_weight(n: usize, next: &mut impl FnMut() -> f64) -> Weight {
        let a = random_matrix(n, next);
        let h = &(&a.adjoint() * &a) + &CMatrix::scalar(n, c(0.3, 0.0));
        Weight::new(random_matrix(n, next).scale_real(0.5), h).unwrap()
    }

    fn random_point(n: usize, next: &mut impl FnMut() -> f64) -> Vec<Complex64> {
        (0..n).map(|_| c(2.0 * next(), 2.0 * next())).collect()
    }

    #[test]
    fn polarize_radial() {
        let lambda = c(0.3, -1.2);
        let qp = polarize(&MixedQuadForm::radial(1, lambda));
        let (y, theta) = (c(0.7, 0.1), c(-0.2, 1.5));
        assert!((qp.eval(&[y, theta]) - lambda * y * theta).norm() < 1e-15);
    }

    #[test]
    fn polarize_zero_and_antiholomorphic_square() {
        assert_eq!(polarize(&MixedQuadForm::zero(2)), HoloQuadForm::zero(4));
        let q = MixedQuadForm::new(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            CMatrix::scalar(1, ONE),
        )
        .unwrap();
        let qp = polarize(&q);
        let (x, y) = (c(1.3, 0.4), c(-0.5, 2.0));
        assert!((qp.eval(&[x, y]) - y * y).norm() < 1e-15);
    }

    #[test]
    fn polarization_round_trip() {
        let mut next = lcg(7);
        for _ in 0..200 {
            let n = 1 + (next().abs() * 3.0) as usize;
            let q = MixedQuadForm::new(
                random_matrix(n, &mut next),
                random_matrix(n, &mut next),
                random_matrix(n, &mut next),
            )
            .unwrap();
            let x = random_point(n, &mut next);
            let mut u = x.clone();
            u.extend(x.iter().map(Complex64::conj));
            let scale = 1.0 + q.scale_norm() * x.iter().map(|z| z.norm_sqr()).sum::<f64>();
            assert!((polarize(&q).eval(&u) - q.eval(&x)).norm() <= 1e-12 * scale);
            assert!(polarize(&q).unpolarize().unwrap().max_abs_diff(&q) < 1e-15);
        }
    }

    #[test]
    fn model_weight_parts() {
        let w = Weight::model(1);
        let parts = weight_parts(&w);
        let x = c(0.6, -1.1);
        assert!((parts.herm.eval(&[x]).re - x.norm_sqr() / 4.0).abs() < 1e-15);
        let y = c(2.0, 0.5);
        assert!((parts.psi0.eval(&[x, y]) - x * y / 4.0).norm() < 1e-15);
        assert!((parts.psi_herm.eval(&[x, y]) - x * y / 4.0).norm() < 1e-15);
        // identity with x = 2, y = 0: 2ReΨ₀(2,0) − Φ₀(2) − Φ₀(0) = −Φ_herm(2) = −1
        let lhs = 2.0 * parts.psi0.eval(&[c(2.0, 0.0), ZERO]).re - w.eval(&[c(2.0, 0.0)]) - w.eval(&[ZERO]);
        assert!((lhs + 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_hermitian_part() {
        let w = Weight::new(CMatrix::zeros(2, 2), CMatrix::identity(2)).unwrap();
        let x = [c(1.0, 2.0), c(-0.5, 0.5)];
        assert!((w.herm().eval(&x).re - 5.5).abs() < 1e-14);
    }

    #[test]
    fn weight_rejects_non_positive_h() {
        let r = Weight::new(CMatrix::zeros(1, 1), CMatrix::scalar(1, c(-1.0, 0.0)));
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
        let r = Weight::new(
            CMatrix::zeros(2, 2),
            CMatrix::from_rows(&[vec![ONE, I], vec![I, ONE]]).unwrap(),
        );
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn weight_identities_random() {
        let mut next = lcg(11);
        for _ in 0..100 {
            let n = 1 + (next().abs() * 3.0) as usize;
            let w = random_weight(n, &mut next);
            let parts = weight_parts(&w);
            let x = random_point(n, &mut next);
            let y = random_point(n, &mut next);
            let ix: Vec<Complex64> = x.iter().map(|z| z * I).collect();
            let avg = 0.5 * (w.eval(&x) + w.eval(&ix));
            let herm = parts.herm.eval(&x).re;
            let scale = 1.0 + x.iter().map(|z| z.norm_sqr()).sum::<f64>() * w.h().norm_fro();
            assert!((avg - herm).abs() < 1e-12 * scale);
            let mut u = x.clone();
            u.extend(x.iter().map(Complex64::conj));
            assert!((parts.psi0.eval(&u).re - w.eval(&x)).abs() < 1e-12 * scale);
            assert!(parts.psi0.eval(&u).im.abs() < 1e-12 * scale);
            assert!((parts.psi_herm.eval(&u).re - herm).abs() < 1e-12 * scale);
            // 2ReΨ₀(x, ȳ) − Φ₀(x) − Φ₀(y) = −Φ_herm(x − y)
            let mut xy = x.clone();
            xy.extend(y.iter().map(Complex64::conj));
            let diff: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let lhs = 2.0 * parts.psi0.eval(&xy).re - w.eval(&x) - w.eval(&y);
            let scale = scale + y.iter().map(|z| z.norm_sqr()).sum::<f64>() * w.h().norm_fro() * 4.0;
            assert!((lhs + parts.herm.eval(&diff).re).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn lambda_points_follow_gradient() {
        let w = Weight::model(1);
        let x = c(1.0, 0.0);
        let xi = w.xi(&[x]);
        assert!((xi[0] - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn restrict_radial_weyl_exponent() {
        // F = 2c·xξ with ξ(x) = −i x̄/2 restricts to −ic|x|²
        let w = Weight::model(1);
        let cc = c(0.0, 0.5);
        let f = HoloQuadForm::bilinear_x_xi(1, 2.0 * cc);
        let r = restrict_to_lambda(&f, &w).unwrap();
        let x = c(0.3, -0.8);
        let expect = -I * cc * x.norm_sqr();
        assert!((r.re.eval(&[x]) - expect.re).abs() < 1e-15);
        assert!(r.im.eval(&[x]).abs() < 1e-15);
        assert!((r.re.eval(&[x]) - 0.5 * x.norm_sqr()).abs() < 1e-15);
        assert_eq!(r.classify_im(DEFAULT_REL_TOL).unwrap().status, numkernel::DefinitenessStatus::Zero);

        let zero = restrict_to_lambda(&HoloQuadForm::zero(2), &w).unwrap();
        assert_eq!(zero.re.norm_max(), 0.0);

        // generic c: Im part is −Re c·|x|²
        let cc = c(-0.7, 0.2);
        let r = restrict_to_lambda(&HoloQuadForm::bilinear_x_xi(1, 2.0 * cc), &w).unwrap();
        assert!((r.im.eval(&[x]) + cc.re * x.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn restriction_matches_direct_sampling() {
        let mut next = lcg(23);
        for _ in 0..50 {
            let n = 1 + (next().abs() * 3.0) as usize;
            let w = random_weight(n, &mut next);
            let f = HoloQuadForm::new(random_matrix(2 * n, &mut next)).unwrap();
            let r = restrict_to_lambda(&f, &w).unwrap();
            let x = random_point(n, &mut next);
            let direct = f.eval(&w.lambda_point(&x));
            let mut u = x.clone();
            u.extend(x.iter().map(Complex64::conj));
            let via_polar = r.polarized.eval(&u);
            let scale = 1.0 + direct.norm();
            assert!((direct - via_polar).norm() < 1e-12 * scale);
            assert!((r.re.eval(&x) - direct.re).abs() < 1e-11 * scale);
            assert!((r.im.eval(&x) - direct.im).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn dual_form_examples() {
        let a = CMatrix::scalar(2, c(2.0, 0.0));
        assert!(dual_form(&a).unwrap().max_abs_diff(&CMatrix::scalar(2, c(0.5, 0.0))) < 1e-15);
        let id = CMatrix::identity(3);
        assert!(dual_form(&id).unwrap().max_abs_diff(&id) < 1e-15);
        assert!(dual_form(&CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn dual_of_symbol_form_is_four_herm() {
        let mut next = lcg(31);
        for n in 1..=3 {
            let w = random_weight(n, &mut next);
            let k = numkernel::inverse(&w.h().scale_real(8.0)).unwrap();
            // ξ ↦ ½ ξ†(8H)⁻¹ξ written as ½ tᵀAt
            let symbol = RealQuadOnC::from_fn(n, |xi| {
                let xb: Vec<Complex64> = xi.iter().map(Complex64::conj).collect();
                0.5 * dot(&xb, &k.mul_vec(xi)).re
            });
            let a = CMatrix::from_real(2 * n, 2 * n, &symbol.scale(2.0).matrix().to_vec());
            let dual = dual_form(&a).unwrap();
            let four_herm = w.herm().real_part().scale(4.0);
            // ½ Dξ·ξ equals the form t ↦ tᵀ(4Φ_herm)t
            let expect = CMatrix::from_real(2 * n, 2 * n, &four_herm.scale(2.0).matrix().to_vec());
            assert!(numkernel::relative_distance(&dual, &expect) < 1e-12);
        }
    }

    #[test]
    fn dual_form_is_an_involution() {
        let mut next = lcg(41);
        for _ in 0..50 {
            let n = 1 + (next().abs() * 4.0) as usize;
            let r = CMatrix::from_fn(n, n, |_, _| c(next(), 0.0));
            let a = &(&r.transpose() * &r) + &CMatrix::scalar(n, c(0.5, 0.0));
            let back = dual_form(&dual_form(&a).unwrap()).unwrap();
            assert!(numkernel::relative_distance(&back, &a) < 1e-12);
        }
    }
}
