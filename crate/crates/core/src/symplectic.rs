//! Complex linear symplectic algebra on ℂ²ⁿ = ℂⁿₓ × ℂⁿ_ξ.
//!
//! The symplectic form is `σ(μ, ν) = Jμ·ν` with `J = [[0, I], [−I, 0]]`;
//! every sign below follows from this choice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, Definiteness, DEFAULT_REL_TOL, I, ONE};
use crate::qform::{dot, HoloQuadForm, RealQuadOnC, Weight};

/// Relative defect accepted for `κᵀJκ = J` and for the symmetry of `J𝓕`.
pub const STRUCTURE_TOL: f64 = 1e-9;

pub fn j_matrix(n: usize) -> CMatrix {
    CMatrix::from_blocks(
        &CMatrix::zeros(n, n),
        &CMatrix::identity(n),
        &CMatrix::scalar(n, -ONE),
        &CMatrix::zeros(n, n),
    )
}

/// `σ(μ, ν) = Jμ·ν = ξ(μ)·x(ν) − x(μ)·ξ(ν)`.
pub fn sigma(mu: &[Complex64], nu: &[Complex64]) -> Complex64 {
    assert_eq!(mu.len(), nu.len());
    assert_eq!(mu.len() % 2, 0);
    let n = mu.len() / 2;
    dot(&mu[n..], &nu[..n]) - dot(&mu[..n], &nu[n..])
}

fn half_dim(m: &CMatrix, what: &str) -> Result<usize> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "{what} must be 2n x 2n, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(numkernel::NumError::NonFinite.into());
    }
    Ok(m.rows() / 2)
}

/// Hamiltonian matrix `𝓕`: `J𝓕` is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct FundMatrix {
    n: usize,
    f: CMatrix,
}

impl FundMatrix {
    pub fn new(f: CMatrix) -> Result<Self> {
        let n = half_dim(&f, "fundamental matrix")?;
        let asymmetry = hamiltonian_defect(&f);
        if asymmetry > STRUCTURE_TOL {
            return Err(Error::NotHamiltonian { asymmetry });
        }
        Ok(FundMatrix { n, f })
    }

    pub fn zero(n: usize) -> Self {
        FundMatrix {
            n,
            f: CMatrix::zeros(2 * n, 2 * n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.f
    }

    /// Hamilton field `H_F(ρ) = 2𝓕ρ`.
    pub fn hamilton_field(&self, rho: &[Complex64]) -> Vec<Complex64> {
        self.f.mul_vec(rho).into_iter().map(|z| 2.0 * z).collect()
    }

    /// Relative asymmetry of `J𝓕`.
    pub fn defect(&self) -> f64 {
        hamiltonian_defect(&self.f)
    }
}

pub fn hamiltonian_defect(f: &CMatrix) -> f64 {
    (&j_matrix(f.rows() / 2) * f).asymmetry()
}

/// Linear canonical transformation: `κᵀJκ = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMap {
    n: usize,
    k: CMatrix,
}

impl CanonicalMap {
    pub fn new(k: CMatrix) -> Result<Self> {
        let n = half_dim(&k, "canonical map")?;
        let defect = canonical_defect(&k);
        if defect > STRUCTURE_TOL {
            return Err(Error::NotCanonical { defect });
        }
        Ok(CanonicalMap { n, k })
    }

    pub fn identity(n: usize) -> Self {
        CanonicalMap {
            n,
            k: CMatrix::identity(2 * n),
        }
    }

    /// `(x, ξ) ↦ (a·x, ξ/a)`.
    pub fn scaling(n: usize, a: Complex64) -> Result<Self> {
        let mut d = vec![a; n];
        d.extend(std::iter::repeat(ONE / a).take(n));
        CanonicalMap::new(CMatrix::diag(&d))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.k
    }

    pub fn apply(&self, rho: &[Complex64]) -> Vec<Complex64> {
        self.k.mul_vec(rho)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CanonicalMap) -> CanonicalMap {
        assert_eq!(self.n, other.n);
        CanonicalMap {
            n: self.n,
            k: &self.k * &other.k,
        }
    }

    /// `κ⁻¹ = −Jκᵀ J`.
    pub fn inverse(&self) -> CanonicalMap {
        let j = j_matrix(self.n);
        CanonicalMap {
            n: self.n,
            k: (&(&j * &self.k.transpose()) * &j).scale_real(-1.0),
        }
    }

    pub fn defect(&self) -> f64 {
        canonical_defect(&self.k)
    }
}

/// `‖κᵀJκ − J‖_max / max(1, ‖κ‖²_max)`.
pub fn canonical_defect(k: &CMatrix) -> f64 {
    let j = j_matrix(k.rows() / 2);
    let lhs = &(&k.transpose() * &j) * k;
    lhs.max_abs_diff(&j) / k.norm_max().powi(2).max(1.0)
}

/// Anti-linear map `ρ ↦ C·ρ̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiLinearMap {
    n: usize,
    c: CMatrix,
}

impl AntiLinearMap {
    pub fn new(c: CMatrix) -> Result<Self> {
        let n = half_dim(&c, "anti-linear map")?;
        Ok(AntiLinearMap { n, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn apply(&self, rho: &[Complex64]) -> Vec<Complex64> {
        let conj: Vec<Complex64> = rho.iter().map(Complex64::conj).collect();
        self.c.mul_vec(&conj)
    }

    /// `self ∘ κ`, again anti-linear with matrix `C·κ̄`.
    pub fn after(&self, k: &CMatrix) -> AntiLinearMap {
        AntiLinearMap {
            n: self.n,
            c: &self.c * &k.conj(),
        }
    }

    /// `κ ∘ self`, anti-linear with matrix `κ·C`.
    pub fn before(&self, k: &CMatrix) -> AntiLinearMap {
        AntiLinearMap {
            n: self.n,
            c: k * &self.c,
        }
    }

    /// `self ∘ other`, a linear map with matrix `C₁·C̄₂`.
    pub fn then_anti(&self, other: &AntiLinearMap) -> CMatrix {
        &self.c * &other.c.conj()
    }

    /// `‖C·C̄ − I‖_max`.
    pub fn involution_defect(&self) -> f64 {
        self.then_anti(self).max_abs_diff(&CMatrix::identity(2 * self.n))
    }

    /// `‖CᵀJC − J‖_max / max(1, ‖C‖²_max)`: `σ(ιμ, ιν) = conj σ(μ, ν)`.
    pub fn conjugate_symplectic_defect(&self) -> f64 {
        canonical_defect(&self.c)
    }
}

/// Phase `φ(x, y, θ)` on ℂⁿ × ℂⁿ × ℂᴺ.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    n: usize,
    big_n: usize,
    phi: HoloQuadForm,
}

impl PhaseFunction {
    pub fn new(n: usize, big_n: usize, phi: HoloQuadForm) -> Result<Self> {
        if phi.dim() != 2 * n + big_n {
            return Err(Error::Dimension(format!(
                "phase on C^{} does not split as (x, y, θ) = ({n}, {n}, {big_n})",
                phi.dim()
            )));
        }
        Ok(PhaseFunction { n, big_n, phi })
    }

    /// Weyl phase `(x − y)·θ + F((x + y)/2, θ)`.
    pub fn weyl(f: &HoloQuadForm) -> Result<Self> {
        if f.dim() % 2 != 0 {
            return Err(Error::Dimension("Weyl exponent must live on C^2n".into()));
        }
        let n = f.dim() / 2;
        let mut m = CMatrix::zeros(3 * n, 3 * n);
        for j in 0..n {
            m[(j, 2 * n + j)] = ONE;
            m[(2 * n + j, j)] = ONE;
            m[(n + j, 2 * n + j)] = -ONE;
            m[(2 * n + j, n + j)] = -ONE;
        }
        // (x, y, θ) ↦ ((x + y)/2, θ)
        let mut l = CMatrix::zeros(2 * n, 3 * n);
        for j in 0..n {
            l[(j, j)] = Complex64::new(0.5, 0.0);
            l[(j, n + j)] = Complex64::new(0.5, 0.0);
            l[(n + j, 2 * n + j)] = ONE;
        }
        let total = HoloQuadForm::new(m)?.add(&f.pullback(&l));
        PhaseFunction::new(n, n, total)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.big_n
    }

    pub fn form(&self) -> &HoloQuadForm {
        &self.phi
    }

    fn block(&self, r: Var, c: Var) -> CMatrix {
        let (r0, nr) = self.range(r);
        let (c0, nc) = self.range(c);
        self.phi.hessian().submatrix(r0, c0, nr, nc)
    }

    fn range(&self, v: Var) -> (usize, usize) {
        match v {
            Var::X => (0, self.n),
            Var::Y => (self.n, self.n),
            Var::Theta => (2 * self.n, self.big_n),
        }
    }
}

#[derive(Clone, Copy)]
enum Var {
    X,
    Y,
    Theta,
}

/// `𝓕 = ½·J·F''`.
pub fn fundamental_matrix(f: &HoloQuadForm) -> Result<FundMatrix> {
    let n = half_dim(f.hessian(), "Weyl exponent Hessian")?;
    Ok(FundMatrix {
        n,
        f: (&j_matrix(n) * f.hessian()).scale_real(0.5),
    })
}

/// Inverse of [`fundamental_matrix`]: `F'' = −2J𝓕`, so `F(ρ) = σ(ρ, 𝓕ρ)`.
pub fn form_from_fund(f: &FundMatrix) -> Result<HoloQuadForm> {
    let asymmetry = f.defect();
    if asymmetry > STRUCTURE_TOL {
        return Err(Error::NotHamiltonian { asymmetry });
    }
    HoloQuadForm::new((&j_matrix(f.n) * &f.f).scale_real(-2.0))
}

/// Reciprocal condition numbers of `1 + 𝓕` and `1 − 𝓕`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMargins {
    pub plus: f64,
    pub minus: f64,
}

impl SpectralMargins {
    /// `±1 ∉ Spec(𝓕)` to tolerance `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.plus > tol && self.minus > tol
    }

    pub fn min(&self) -> f64 {
        self.plus.min(self.minus)
    }
}

pub fn spectral_margins(f: &FundMatrix) -> Result<SpectralMargins> {
    let id = CMatrix::identity(2 * f.n);
    Ok(SpectralMargins {
        plus: numkernel::invertibility_margin(&(&id + &f.f))?,
        minus: numkernel::invertibility_margin(&(&id - &f.f))?,
    })
}

/// `κ = (1 − 𝓕)(1 + 𝓕)⁻¹`; fails when `−1 ∈ Spec(𝓕)`.
pub fn cayley(f: &FundMatrix, tol: f64) -> Result<CanonicalMap> {
    let id = CMatrix::identity(2 * f.n);
    let plus = &id + &f.f;
    let margin = numkernel::invertibility_margin(&plus)?;
    if margin <= tol {
        return Err(Error::SpectralGate { sign: '+', margin });
    }
    // κ = (1 − 𝓕)(1 + 𝓕)⁻¹ = ((1 + 𝓕)⁻ᵀ(1 − 𝓕)ᵀ)ᵀ
    let k = numkernel::solve(&plus.transpose(), &(&id - &f.f).transpose())?.transpose();
    CanonicalMap::new(k)
}

/// `𝓕 = (1 + κ)⁻¹(1 − κ)`; fails when `−1 ∈ Spec(κ)`.
pub fn inverse_cayley(k: &CanonicalMap, tol: f64) -> Result<FundMatrix> {
    let id = CMatrix::identity(2 * k.n);
    let plus = &id + &k.k;
    let margin = numkernel::invertibility_margin(&plus)?;
    if margin <= tol {
        return Err(Error::CayleyUndefined { margin });
    }
    FundMatrix::new(numkernel::solve(&plus, &(&id - &k.k))?)
}

/// Reciprocal condition number of `1 + 𝓕̃𝓕`.
pub fn composition_margin(f: &FundMatrix, f_tilde: &FundMatrix) -> Result<f64> {
    let id = CMatrix::identity(2 * f.n);
    Ok(numkernel::invertibility_margin(&(&id + &(&f_tilde.f * &f.f)))?)
}

/// Fundamental matrix of the Weyl exponent of `Op(e^{iF̃})∘Op(e^{iF})`:
/// `𝓕̂ = (1 + 𝓕)(1 + 𝓕̃𝓕)⁻¹(1 + 𝓕̃) − 1`, the Cayley preimage of `κ̃κ`.
pub fn compose_fundamental(f: &FundMatrix, f_tilde: &FundMatrix, tol: f64) -> Result<FundMatrix> {
    if f.n != f_tilde.n {
        return Err(Error::Dimension(format!(
            "cannot compose fundamental matrices of sizes {} and {}",
            2 * f.n,
            2 * f_tilde.n
        )));
    }
    let id = CMatrix::identity(2 * f.n);
    let middle = &id + &(&f_tilde.f * &f.f);
    let margin = numkernel::invertibility_margin(&middle)?;
    if margin <= tol {
        return Err(Error::CompositionGate { margin });
    }
    let right = numkernel::solve(&middle, &(&id + &f_tilde.f))?;
    let hat = &(&(&id + &f.f) * &right) - &id;
    FundMatrix::new(hat)
}

/// The anti-linear involution fixing `Λ_Φ₀` pointwise: `T∘swap∘conj∘T⁻¹`
/// with `T` the parametrization `(x, y) ↦ (x, (2/i)(Px + Hᵀy))`.
pub fn involution(weight: &Weight) -> AntiLinearMap {
    let n = weight.dim();
    let t = weight.parametrization();
    let t_inv = numkernel::inverse(&t).expect("parametrization is invertible when H is");
    let swap = CMatrix::from_blocks(
        &CMatrix::zeros(n, n),
        &CMatrix::identity(n),
        &CMatrix::identity(n),
        &CMatrix::zeros(n, n),
    );
    AntiLinearMap {
        n,
        c: &(&t * &swap) * &t_inv.conj(),
    }
}

/// Hermitian matrix `K` with `ρ†Kρ = (1/i)(σ(κρ, ι_out κρ) − σ(ρ, ι_in ρ))`,
/// together with the size of its ingredients.
fn positivity_matrix(k: &CanonicalMap, phi_in: &Weight, phi_out: &Weight) -> Result<(CMatrix, f64)> {
    let n = k.n;
    if phi_in.dim() != n || phi_out.dim() != n {
        return Err(Error::Dimension(format!(
            "canonical map on C^{} with weights on C^{} and C^{}",
            2 * n,
            phi_in.dim(),
            phi_out.dim()
        )));
    }
    let j = j_matrix(n);
    let c_in = involution(phi_in);
    let c_out = involution(phi_out);
    // σ(ρ, Cρ̄) = −ρᵀJCρ̄
    let m_out = (&(&(&k.k.transpose() * &j) * &c_out.c) * &k.k.conj()).scale_real(-1.0);
    let m_in = (&j * &c_in.c).scale_real(-1.0);
    let kmat = (&m_out - &m_in).scale(-I).transpose();
    let reference = k.k.norm_max().powi(2) * c_out.c.norm_max() + c_in.c.norm_max();
    Ok((kmat, reference))
}

/// Definiteness of the positivity form of `κ` relative to `(Λ_out, Λ_in)`,
/// as a real quadratic form on ℝ⁴ⁿ. PosDef is strict positivity.
pub fn positivity(k: &CanonicalMap, phi_in: &Weight, phi_out: &Weight, tol: f64) -> Result<Definiteness> {
    let (kmat, reference) = positivity_matrix(k, phi_in, phi_out)?;
    let deviation = (&kmat - &kmat.adjoint()).norm_max() / reference.max(f64::MIN_POSITIVE);
    if deviation > 1e-10 {
        return Err(Error::NotHermitian {
            what: "positivity form",
            deviation,
        });
    }
    let h = kmat.hermitian_part();
    Ok(numkernel::classify_scaled(&realify(&h), tol, reference)?)
}

/// Real symmetric matrix of `t ↦ ρ†Kρ`, `t = (Re ρ, Im ρ)`.
fn realify(h: &CMatrix) -> CMatrix {
    let m = h.rows();
    CMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let z = h[(r % m, c % m)];
        let v = match (r < m, c < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        };
        Complex64::new(v, 0.0)
    })
}

/// `κ* = ι_{Φ₁}∘κ⁻¹∘ι_{Φ₂}` for `κ: Λ_{Φ₁} → Λ_{Φ₂}`.
pub fn adjoint_map(k: &CanonicalMap, phi1: &Weight, phi2: &Weight) -> Result<CanonicalMap> {
    if phi1.dim() != k.n || phi2.dim() != k.n {
        return Err(Error::Dimension("adjoint: weight and map dimensions differ".into()));
    }
    let inner = involution(phi2).before(k.inverse().matrix());
    CanonicalMap::new(involution(phi1).then_anti(&inner))
}

/// Outcome of the algebraic checks on a phase function.
#[derive(Debug, Clone)]
pub struct PhaseReport {
    /// Rank of `(φ''_θx φ''_θy φ''_θθ)` is `N`.
    pub nondegenerate: bool,
    /// Rows of the θ-block that depend on earlier ones.
    pub dependent_rows: Vec<usize>,
    /// `det [[φ''_xy, φ''_xθ], [φ''_θy, φ''_θθ]] ≠ 0`.
    pub graph: bool,
    pub graph_margin: f64,
    pub kappa: Option<CanonicalMap>,
    /// Signature of `(y, θ) ↦ −Im φ(0, y, θ) + Φ₀(y)` when a weight is given.
    pub signature: Option<(usize, usize)>,
}

impl PhaseReport {
    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.nondegenerate {
            Ok(())
        } else {
            Err(Error::RankDeficientPhase {
                rows: self.dependent_rows.clone(),
            })
        }
    }
}

pub fn phase_checks(phi: &PhaseFunction, weight: Option<&Weight>, tol: f64) -> Result<PhaseReport> {
    let (n, big_n) = (phi.n, phi.big_n);
    let theta_rows = {
        let mut a = CMatrix::zeros(big_n, 2 * n + big_n);
        a.set_submatrix(0, 0, &phi.block(Var::Theta, Var::X));
        a.set_submatrix(0, n, &phi.block(Var::Theta, Var::Y));
        a.set_submatrix(0, 2 * n, &phi.block(Var::Theta, Var::Theta));
        a
    };
    let dependent_rows = dependent_rows(&theta_rows, tol);
    let nondegenerate = dependent_rows.is_empty();

    let graph_matrix = CMatrix::from_blocks(
        &phi.block(Var::Y, Var::X),
        &phi.block(Var::Y, Var::Theta),
        &phi.block(Var::Theta, Var::X),
        &phi.block(Var::Theta, Var::Theta),
    );
    let graph_margin = numkernel::invertibility_margin(&graph_matrix)?;
    let graph = graph_margin > tol;

    let kappa = if nondegenerate && graph {
        Some(recover_map(phi, &graph_matrix)?)
    } else {
        None
    };

    let signature = match weight {
        None => None,
        Some(w) => {
            if w.dim() != n {
                return Err(Error::Dimension("phase and weight dimensions differ".into()));
            }
            let form = RealQuadOnC::from_fn(n + big_n, |v| {
                let mut u = vec![Complex64::new(0.0, 0.0); n];
                u.extend_from_slice(v);
                -phi.phi.eval(&u).im + w.eval(&v[..n])
            });
            let reference = phi.phi.hessian().norm_max() + w.h().norm_max() + w.p().norm_max();
            Some(form.classify_scaled(tol, reference)?.signature())
        }
    };

    Ok(PhaseReport {
        nondegenerate,
        dependent_rows,
        graph,
        graph_margin,
        kappa,
        signature,
    })
}

/// Greedy Gram–Schmidt over the rows of `a`; a row whose residual is below
/// `tol` times its own norm (or the matrix scale, for zero rows) is dependent.
fn dependent_rows(a: &CMatrix, tol: f64) -> Vec<usize> {
    let scale = a.norm_max();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut dependent = Vec::new();
    for r in 0..a.rows() {
        let row = a.row(r).to_vec();
        let norm0 = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut v = row;
        // two passes keep the residual orthogonal in floating point
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let res = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if scale == 0.0 || res <= tol * norm0.max(scale) {
            dependent.push(r);
        } else {
            basis.push(v.into_iter().map(|z| z / res).collect());
        }
    }
    dependent
}

/// Solves `φ'_θ = 0`, `η = −φ'_y` for `(x, θ)` and reads off `ξ = φ'_x`.
fn recover_map(phi: &PhaseFunction, graph_matrix: &CMatrix) -> Result<CanonicalMap> {
    let (n, big_n) = (phi.n, phi.big_n);
    // columns of rhs: the inputs (y, η)
    let mut rhs = CMatrix::zeros(n + big_n, 2 * n);
    rhs.set_submatrix(0, 0, &phi.block(Var::Y, Var::Y).scale_real(-1.0));
    rhs.set_submatrix(0, n, &CMatrix::scalar(n, -ONE));
    rhs.set_submatrix(n, 0, &phi.block(Var::Theta, Var::Y).scale_real(-1.0));
    let sol = numkernel::solve(graph_matrix, &rhs)?;
    let x_of = sol.submatrix(0, 0, n, 2 * n);
    let theta_of = sol.submatrix(n, 0, big_n, 2 * n);
    let mut y_of = CMatrix::zeros(n, 2 * n);
    y_of.set_submatrix(0, 0, &CMatrix::identity(n));
    let xi_of = &(&(&phi.block(Var::X, Var::X) * &x_of) + &(&phi.block(Var::X, Var::Y) * &y_of))
        + &(&phi.block(Var::X, Var::Theta) * &theta_of);
    let mut k = CMatrix::zeros(2 * n, 2 * n);
    k.set_submatrix(0, 0, &x_of);
    k.set_submatrix(n, 0, &xi_of);
    CanonicalMap::new(k)
}

/// Weight `Φ₁` with `κ(Λ_Φ₀) = Λ_Φ₁`.
pub fn pushforward_weight(k: &CanonicalMap, weight: &Weight, tol: f64) -> Result<Weight> {
    let n = k.n;
    if weight.dim() != n {
        return Err(Error::Dimension("pushforward: weight and map dimensions differ".into()));
    }
    // κ(Λ_Φ₀) is parametrized by (x, x̄) ↦ κT(x, x̄)
    let kt = &k.k * &weight.parametrization();
    let k11 = kt.submatrix(0, 0, n, n);
    let k12 = kt.submatrix(0, n, n, n);
    let bottom = kt.submatrix(n, 0, n, 2 * n);
    // (x', x̄') = W (x, x̄)
    let w = CMatrix::from_blocks(&k11, &k12, &k12.conj(), &k11.conj());
    let margin = numkernel::invertibility_margin(&w)?;
    if margin <= tol {
        return Err(Error::NotAGraph {
            block: "x-component of κT",
            margin,
        });
    }
    // ξ' = [A₁ A₂](x', x̄'), A = bottom·W⁻¹
    let a = numkernel::solve(&w.transpose(), &bottom.transpose())?.transpose();
    let half_i = Complex64::new(0.0, 0.5);
    let p1 = a.submatrix(0, 0, n, n).scale(half_i);
    let h1 = a.submatrix(0, n, n, n).scale(half_i).transpose();
    let sym = p1.asymmetry();
    if sym > STRUCTURE_TOL && p1.norm_max() > DEFAULT_REL_TOL * a.norm_max() {
        return Err(Error::NotSymmetric {
            what: "pluriharmonic part of the pushed-forward weight",
            deviation: sym,
        });
    }
    Weight::new(p1.symmetric_part(), h1)
}

/// Generating-function map `κ_g: (θ, −g'_θ) ↦ (x, g'_x)` of a form `g(x, θ)`
/// on ℂⁿ × ℂⁿ; requires `g''_θx` invertible.
pub fn generating_map(g: &HoloQuadForm, tol: f64) -> Result<CanonicalMap> {
    let n = half_dim(g.hessian(), "generating function Hessian")?;
    let m = g.hessian();
    let gxx = m.submatrix(0, 0, n, n);
    let gxt = m.submatrix(0, n, n, n);
    let gtx = m.submatrix(n, 0, n, n);
    let gtt = m.submatrix(n, n, n, n);
    let margin = numkernel::invertibility_margin(&gtx)?;
    if margin <= tol {
        return Err(Error::NoKernelNormalForm { margin });
    }
    // S: (x, θ) ↦ (θ, −g'_θ), T: (x, θ) ↦ (x, g'_x), κ_g = T·S⁻¹
    let s = CMatrix::from_blocks(
        &CMatrix::zeros(n, n),
        &CMatrix::identity(n),
        &gtx.scale_real(-1.0),
        &gtt.scale_real(-1.0),
    );
    let t = CMatrix::from_blocks(&CMatrix::identity(n), &CMatrix::zeros(n, n), &gxx, &gxt);
    let k = numkernel::solve(&s.transpose(), &t.transpose())?.transpose();
    CanonicalMap::new(k)
}

/// Phase `Ψ(x, θ)` of the kernel `e^{2Ψ(x, θ)}` of an operator quantizing
/// `κ: Λ_{Φ₁} → Λ_{Φ₂}`: `κ_{2Ψ/i} = κ∘κ_{2Ψ₁/i}`.
pub fn fio_kernel_phase(k: &CanonicalMap, phi1: &Weight, phi2: &Weight, tol: f64) -> Result<HoloQuadForm> {
    let n = k.n;
    if phi1.dim() != n || phi2.dim() != n {
        return Err(Error::Dimension("kernel phase: weight and map dimensions differ".into()));
    }
    let bergman = generating_map(&phi1.psi0().scale(-2.0 * I), tol)?;
    let composed = k.compose(&bergman);
    let m = composed.matrix();
    let a = m.submatrix(0, 0, n, n);
    let b = m.submatrix(0, n, n, n);
    let c = m.submatrix(n, 0, n, n);
    let d = m.submatrix(n, n, n, n);
    let margin = numkernel::invertibility_margin(&b)?;
    if margin <= tol {
        return Err(Error::NoKernelNormalForm { margin });
    }
    let b_inv = numkernel::inverse(&b)?;
    let db_inv = &d * &b_inv;
    let gxx = db_inv.clone();
    let gxt = &c - &(&db_inv * &a);
    let gtx = b_inv.scale_real(-1.0);
    let gtt = &b_inv * &a;
    let g = CMatrix::from_blocks(&gxx, &gxt, &gtx, &gtt);
    HoloQuadForm::new(g.scale(Complex64::new(0.0, 0.5)))
}

/// Inverse of [`fio_kernel_phase`]: `κ = κ_{2Ψ/i}∘κ_{2Ψ₁/i}⁻¹`.
pub fn kernel_phase_map(psi: &HoloQuadForm, phi1: &Weight, tol: f64) -> Result<CanonicalMap> {
    let bergman = generating_map(&phi1.psi0().scale(-2.0 * I), tol)?;
    Ok(generating_map(&psi.scale(-2.0 * I), tol)?.compose(&bergman.inverse()))
}

/// Hessian of `(y, x) ↦ conj Ψ(x̄, ȳ)`.
pub fn kernel_adjoint_phase(psi: &HoloQuadForm) -> Result<HoloQuadForm> {
    let n = half_dim(psi.hessian(), "kernel phase Hessian")?;
    let m = psi.hessian().conj();
    HoloQuadForm::new(CMatrix::from_blocks(
        &m.submatrix(n, n, n, n),
        &m.submatrix(n, 0, n, n),
        &m.submatrix(0, n, n, n),
        &m.submatrix(0, 0, n, n),
    ))
}
