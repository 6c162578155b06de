//! Exact quadratic stationary phase and the Toeplitz/Weyl pipelines.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, Definiteness, DefinitenessStatus, ONE};
use crate::qform::{polarize, restrict_to_lambda, HoloQuadForm, MixedQuadForm, RealQuadOnC, Weight};
use crate::symplectic::{self, FundMatrix};

/// Result of eliminating variables at a non-degenerate critical point.
#[derive(Debug, Clone)]
pub struct CriticalValueResult {
    /// The form on the retained variables.
    pub reduced: HoloQuadForm,
    /// Eliminated variables at the critical point, as a linear map of the
    /// retained ones.
    pub critical_map: CMatrix,
    pub fiber_hessian_det: Complex64,
    /// Reciprocal condition number of the fiber Hessian.
    pub fiber_margin: f64,
    pub retained: Vec<usize>,
    pub eliminated: Vec<usize>,
}

/// Critical value of `f` in the variables `eliminate` (Schur complement).
pub fn holo_vc(f: &HoloQuadForm, eliminate: &[usize], tol: f64) -> Result<CriticalValueResult> {
    let dim = f.dim();
    let mut seen = vec![false; dim];
    for &k in eliminate {
        if k >= dim || seen[k] {
            return Err(Error::Dimension(format!(
                "invalid elimination index {k} for a form on C^{dim}"
            )));
        }
        seen[k] = true;
    }
    let retained: Vec<usize> = (0..dim).filter(|&k| !seen[k]).collect();
    let m = f.hessian();
    let m_aa = m.select(&retained, &retained);
    if eliminate.is_empty() {
        return Ok(CriticalValueResult {
            reduced: f.clone(),
            critical_map: CMatrix::zeros(0, dim),
            fiber_hessian_det: ONE,
            fiber_margin: 1.0,
            retained,
            eliminated: Vec::new(),
        });
    }
    let m_ab = m.select(&retained, eliminate);
    let m_ba = m.select(eliminate, &retained);
    let m_bb = m.select(eliminate, eliminate);
    let fiber_margin = numkernel::invertibility_margin(&m_bb)?;
    let det = numkernel::det(&m_bb)?;
    if fiber_margin <= tol {
        return Err(Error::DegenerateStationaryPhase {
            det_abs: det.norm(),
            margin: fiber_margin,
        });
    }
    let critical_map = numkernel::solve(&m_bb, &m_ba)?.scale_real(-1.0);
    let reduced = &m_aa + &(&m_ab * &critical_map);
    Ok(CriticalValueResult {
        reduced: HoloQuadForm::new(reduced)?,
        critical_map,
        fiber_hessian_det: det,
        fiber_margin,
        retained,
        eliminated: eliminate.to_vec(),
    })
}

/// Given `h(X) = vc_Y(f(X, Y) + g(Y))`, recovers `g(Y) = vc_X(−f(X, Y) + h(X))`.
/// `f` lives on `(X, Y)` with `X` the first `nx` variables.
pub fn legendre_invert(f: &HoloQuadForm, h: &HoloQuadForm, nx: usize, tol: f64) -> Result<HoloQuadForm> {
    let dim = f.dim();
    if h.dim() != nx || nx > dim || dim - nx != nx {
        return Err(Error::Dimension(format!(
            "inversion needs f on C^{nx} x C^{nx} and h on C^{nx}, got f on C^{dim}, h on C^{}",
            h.dim()
        )));
    }
    let coupling = f.hessian().submatrix(0, nx, nx, nx);
    let margin = numkernel::invertibility_margin(&coupling)?;
    if margin <= tol {
        return Err(Error::DegenerateStationaryPhase {
            det_abs: numkernel::det(&coupling)?.norm(),
            margin,
        });
    }
    let mut total = f.hessian().scale_real(-1.0);
    let hx = &total.submatrix(0, 0, nx, nx) + h.hessian();
    total.set_submatrix(0, 0, &hx);
    let x_vars: Vec<usize> = (0..nx).collect();
    Ok(holo_vc(&HoloQuadForm::new(total)?, &x_vars, tol)?.reduced)
}

/// `∫_{ℝᵐ} exp(−½uᵀSu + b·u) du = (2π)^{m/2} det(S)^{−1/2} exp(½bᵀS⁻¹b)` for
/// real symmetric positive definite `S`.
pub fn gaussian_value(s: &CMatrix, b: &[Complex64]) -> Result<Complex64> {
    let m = s.rows();
    if !s.is_square() || b.len() != m {
        return Err(Error::Dimension("gaussian_value: S must be m x m and b of length m".into()));
    }
    let scale = s.norm_max().max(f64::MIN_POSITIVE);
    let imag = s.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale;
    if imag > numkernel::DEFAULT_REL_TOL || s.asymmetry() > numkernel::DEFAULT_REL_TOL {
        return Err(Error::NotSymmetric {
            what: "Gaussian covariance (must be real symmetric)",
            deviation: imag.max(s.asymmetry()),
        });
    }
    let s = CMatrix::from_real(m, m, &s.symmetric_part().re());
    let definiteness = numkernel::classify(&s, numkernel::DEFAULT_REL_TOL)?;
    if definiteness.status != DefinitenessStatus::PosDef {
        return Err(Error::NotPositiveDefinite {
            what: "Gaussian covariance",
            definiteness,
        });
    }
    let det = numkernel::det(&s)?.re;
    let bcol = CMatrix::from_fn(m, 1, |r, _| b[r]);
    let sol = numkernel::solve(&s, &bcol)?;
    let quad: Complex64 = (0..m).map(|r| b[r] * sol[(r, 0)]).sum();
    Ok((2.0 * std::f64::consts::PI).powf(m as f64 / 2.0) / det.sqrt() * (0.5 * quad).exp())
}

/// Hypotheses of the two composition theorems, in trail order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateId {
    Admissible,
    Spectral,
    AdmissibleTilde,
    SpectralTilde,
    Bounded,
    BoundedTilde,
    Composition,
    ComposedBounded,
    WeylBounded,
    WeylSpectral,
    NonDegenerate,
    ToeplitzSymbol,
}

/// Gate labels carry the equation tags of the source theorems so that a
/// report can be read against them.
const GATE_LABELS: [(GateId, &str, &str); 12] = [
    (GateId::Admissible, "(1.3)", "Re q < Φ_herm"),
    (GateId::Spectral, "(1.8)", "±1 ∉ Spec(𝓕)"),
    (GateId::AdmissibleTilde, "(1.9)", "Re q̃ < Φ_herm"),
    (GateId::SpectralTilde, "(1.10)", "±1 ∉ Spec(𝓕̃)"),
    (GateId::Bounded, "(1.11)", "a ∈ L∞: Im F|_Λ ≥ 0"),
    (GateId::BoundedTilde, "(1.11) ã", "ã ∈ L∞: Im F̃|_Λ ≥ 0"),
    (GateId::Composition, "(1.14)", "−1 ∉ Spec(𝓕̃𝓕)"),
    (GateId::ComposedBounded, "(1.13.1)", "Im F̂|_Λ ≥ 0"),
    (GateId::WeylBounded, "(1.15.02.1)", "Im G|_Λ ≥ 0"),
    (GateId::WeylSpectral, "Thm 1.2", "±1 ∉ Spec(𝓕_G)"),
    (GateId::NonDegenerate, "(1.15.03)", "iG(x, ξᵖⁱ) + 4Ψ_herm non-degenerate"),
    (GateId::ToeplitzSymbol, "(1.15.1)", "Re Q < Φ_herm"),
];

impl GateId {
    fn entry(self) -> &'static (GateId, &'static str, &'static str) {
        GATE_LABELS
            .iter()
            .find(|(id, _, _)| *id == self)
            .expect("every gate has a label")
    }

    pub fn label(self) -> &'static str {
        self.entry().1
    }

    pub fn condition(self) -> &'static str {
        self.entry().2
    }

    pub fn all() -> impl Iterator<Item = GateId> {
        GATE_LABELS.iter().map(|(id, _, _)| *id)
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.label(), self.condition())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateStatus {
    Pass,
    Fail,
    /// Not evaluated because an earlier gate failed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub id: GateId,
    pub status: GateStatus,
    /// Signed margin: positive (or zero at an edge) when passing.
    pub margin: Option<f64>,
    pub detail: String,
}

impl Gate {
    pub fn passed(&self) -> bool {
        self.status == GateStatus::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Passed,
    GateFailed(GateId),
    /// Everything but `(1.15.1)` holds: a bounded Weyl operator whose
    /// candidate Toeplitz symbol is not certified.
    NotCertifiedToeplitz,
}

/// Numerically estimated multiplicative constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    pub value: Complex64,
    /// `|C(m) − C(2m)|` from grid refinement.
    pub error_bar: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub gates: Vec<Gate>,
    /// Weyl exponents of the factors, in application order.
    pub factor_exponents: Vec<HoloQuadForm>,
    pub weyl_exponent: Option<HoloQuadForm>,
    pub toeplitz_exponent: Option<MixedQuadForm>,
    pub constant_estimate: Option<ConstantEstimate>,
    pub verdict: Verdict,
}

impl PipelineReport {
    pub fn gate(&self, id: GateId) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }

    pub fn first_failure(&self) -> Option<&Gate> {
        self.gates.iter().find(|g| g.status == GateStatus::Fail)
    }

    pub fn all_passed(&self) -> bool {
        self.verdict == Verdict::Passed
    }
}

struct Trail {
    gates: Vec<Gate>,
    failed: Option<GateId>,
}

impl Trail {
    fn new() -> Self {
        Trail {
            gates: Vec::new(),
            failed: None,
        }
    }

    fn ok(&self) -> bool {
        self.failed.is_none()
    }

    fn record(&mut self, id: GateId, passed: bool, margin: f64, detail: String) -> bool {
        if self.failed.is_some() {
            self.skip(id);
            return false;
        }
        self.gates.push(Gate {
            id,
            status: if passed { GateStatus::Pass } else { GateStatus::Fail },
            margin: Some(margin),
            detail,
        });
        if !passed {
            self.failed = Some(id);
        }
        passed
    }

    fn skip(&mut self, id: GateId) {
        self.gates.push(Gate {
            id,
            status: GateStatus::Skipped,
            margin: None,
            detail: String::new(),
        });
    }

    fn verdict(&self) -> Verdict {
        match self.failed {
            None => Verdict::Passed,
            Some(GateId::ToeplitzSymbol) => Verdict::NotCertifiedToeplitz,
            Some(id) => Verdict::GateFailed(id),
        }
    }
}

/// `Φ_herm − Re q` must be positive definite.
fn admissibility(q: &MixedQuadForm, weight: &Weight, tol: f64) -> Result<Definiteness> {
    let gap = weight.herm().real_part().sub(&q.real_part());
    let reference = weight.h().norm_max().max(q.scale_norm());
    gap.classify_scaled(tol, reference)
}

fn definiteness_detail(what: &str, d: &Definiteness) -> String {
    format!("{what}: {} (min eigenvalue/scale {:.3e})", d.status, d.min_relative())
}

fn check_dims(q: &MixedQuadForm, weight: &Weight) -> Result<()> {
    if q.dim() != weight.dim() {
        return Err(Error::Dimension(format!(
            "symbol on C^{} with weight on C^{}",
            q.dim(),
            weight.dim()
        )));
    }
    Ok(())
}

/// Weyl exponent of `Top(e^q)` without any gate: `iF(x, ξᵖⁱ(x, z)) = G(x, z)`
/// with `G = vc_{y,θ}(−4Ψ_herm(x − y, z − θ) + qᵖⁱ(y, θ))`.
pub fn weyl_exponent(q: &MixedQuadForm, weight: &Weight, tol: f64) -> Result<HoloQuadForm> {
    check_dims(q, weight)?;
    let n = weight.dim();
    // variables (x, z, y, θ)
    let diff = CMatrix::from_blocks(
        &CMatrix::identity(2 * n),
        &CMatrix::scalar(2 * n, -ONE),
        &CMatrix::zeros(0, 2 * n),
        &CMatrix::zeros(0, 2 * n),
    );
    let mut tail = CMatrix::zeros(2 * n, 4 * n);
    tail.set_submatrix(0, 2 * n, &CMatrix::identity(2 * n));
    let e = weight
        .psi_herm()
        .pullback(&diff)
        .scale(Complex64::new(-4.0, 0.0))
        .add(&polarize(q).pullback(&tail));
    let eliminate: Vec<usize> = (2 * n..4 * n).collect();
    let g = holo_vc(&e, &eliminate, tol)?.reduced;
    Ok(g.pullback(&weyl_substitution(weight)?).scale(Complex64::new(0.0, -1.0)))
}

/// `(x, ξ) ↦ (x, z)` inverting `ξ = (2/i)(Px + Hᵀz)`.
fn weyl_substitution(weight: &Weight) -> Result<CMatrix> {
    let n = weight.dim();
    let ht_inv = numkernel::inverse(&weight.h().transpose())?;
    Ok(CMatrix::from_blocks(
        &CMatrix::identity(n),
        &CMatrix::zeros(n, n),
        &(&ht_inv * weight.p()).scale_real(-1.0),
        &ht_inv.scale(Complex64::new(0.0, 0.5)),
    ))
}

fn spectral_gate(trail: &mut Trail, id: GateId, f: &FundMatrix, tol: f64) -> Result<()> {
    if !trail.ok() {
        trail.skip(id);
        return Ok(());
    }
    let m = symplectic::spectral_margins(f)?;
    trail.record(
        id,
        m.passes(tol),
        m.min(),
        format!("σ_min/σ_max of 1+𝓕: {:.3e}, of 1−𝓕: {:.3e}", m.plus, m.minus),
    );
    Ok(())
}

fn bounded_gate(trail: &mut Trail, id: GateId, f: &HoloQuadForm, weight: &Weight, tol: f64) -> Result<()> {
    if !trail.ok() {
        trail.skip(id);
        return Ok(());
    }
    let d = restrict_to_lambda(f, weight)?.classify_im(tol)?;
    let edge = if d.status.is_nonnegative() && d.margin == 0.0 {
        " (edge of boundedness)"
    } else {
        ""
    };
    trail.record(
        id,
        d.is_nonnegative(),
        d.min_relative(),
        format!("{}{edge}", definiteness_detail("Im|_Λ", &d)),
    );
    Ok(())
}

/// Runs the admissibility gate, then computes `F` and its fundamental matrix.
fn factor_to_weyl(
    trail: &mut Trail,
    q: &MixedQuadForm,
    weight: &Weight,
    tol: f64,
    admissible: GateId,
    spectral: GateId,
) -> Result<Option<(HoloQuadForm, FundMatrix)>> {
    check_dims(q, weight)?;
    if !trail.ok() {
        trail.skip(admissible);
        trail.skip(spectral);
        return Ok(None);
    }
    let d = admissibility(q, weight, tol)?;
    let pass = d.status == DefinitenessStatus::PosDef;
    trail.record(admissible, pass, d.min_relative(), definiteness_detail("Φ_herm − Re q", &d));
    if !pass {
        trail.skip(spectral);
        return Ok(None);
    }
    let f = weyl_exponent(q, weight, tol)?;
    let fund = symplectic::fundamental_matrix(&f)?;
    spectral_gate(trail, spectral, &fund, tol)?;
    Ok(Some((f, fund)))
}

/// Weyl exponent `F` of `Top(e^q) = C·Op^w(e^{iF})` with gates (1.3), (1.8), (1.11).
pub fn toeplitz_to_weyl(q: &MixedQuadForm, weight: &Weight, tol: f64) -> Result<PipelineReport> {
    let mut trail = Trail::new();
    let factor = factor_to_weyl(&mut trail, q, weight, tol, GateId::Admissible, GateId::Spectral)?;
    match &factor {
        Some((f, _)) => bounded_gate(&mut trail, GateId::Bounded, f, weight, tol)?,
        None => trail.skip(GateId::Bounded),
    }
    let weyl = factor.map(|(f, _)| f);
    Ok(PipelineReport {
        verdict: trail.verdict(),
        gates: trail.gates,
        factor_exponents: weyl.iter().cloned().collect(),
        weyl_exponent: weyl,
        toeplitz_exponent: None,
        constant_estimate: None,
    })
}

/// Toeplitz exponent `Q` of `Op^w(e^{iG})`, gated by the hypotheses of the
/// inversion theorem.
pub fn weyl_to_toeplitz(g: &HoloQuadForm, weight: &Weight, tol: f64) -> Result<PipelineReport> {
    let mut trail = Trail::new();
    let q = weyl_to_toeplitz_gates(&mut trail, g, weight, tol)?;
    Ok(PipelineReport {
        verdict: trail.verdict(),
        gates: trail.gates,
        factor_exponents: Vec::new(),
        weyl_exponent: Some(g.clone()),
        toeplitz_exponent: q,
        constant_estimate: None,
    })
}

fn weyl_to_toeplitz_gates(
    trail: &mut Trail,
    g: &HoloQuadForm,
    weight: &Weight,
    tol: f64,
) -> Result<Option<MixedQuadForm>> {
    let n = weight.dim();
    if g.dim() != 2 * n {
        return Err(Error::Dimension(format!(
            "Weyl exponent on C^{} with weight on C^{n}",
            g.dim()
        )));
    }
    bounded_gate(trail, GateId::WeylBounded, g, weight, tol)?;
    spectral_gate(trail, GateId::WeylSpectral, &symplectic::fundamental_matrix(g)?, tol)?;
    if !trail.ok() {
        trail.skip(GateId::NonDegenerate);
        trail.skip(GateId::ToeplitzSymbol);
        return Ok(None);
    }
    // K(x, z) = iG(x, ξᵖⁱ(x, z)) + 4Ψ_herm(x, z)
    let r = restrict_to_lambda(g, weight)?.polarized;
    let four_psi_herm = weight.psi_herm().scale(Complex64::new(4.0, 0.0));
    let k = r.scale(Complex64::new(0.0, 1.0)).add(&four_psi_herm);
    let margin = numkernel::invertibility_margin(k.hessian())?;
    let nondegenerate = trail.record(
        GateId::NonDegenerate,
        margin > tol,
        margin,
        format!("σ_min/σ_max of the Hessian: {margin:.3e}"),
    );
    if !nondegenerate {
        trail.skip(GateId::ToeplitzSymbol);
        return Ok(None);
    }
    // variables (x, z, y, θ): 4Ψ_herm(x − y, z − θ) + iR(x, z)
    let diff = CMatrix::from_blocks(
        &CMatrix::identity(2 * n),
        &CMatrix::scalar(2 * n, -ONE),
        &CMatrix::zeros(0, 2 * n),
        &CMatrix::zeros(0, 2 * n),
    );
    let mut head = CMatrix::zeros(2 * n, 4 * n);
    head.set_submatrix(0, 0, &CMatrix::identity(2 * n));
    let total = four_psi_herm
        .pullback(&diff)
        .add(&r.scale(Complex64::new(0.0, 1.0)).pullback(&head));
    let eliminate: Vec<usize> = (0..2 * n).collect();
    let q = holo_vc(&total, &eliminate, tol)?.reduced.unpolarize()?;
    let d = admissibility(&q, weight, tol)?;
    trail.record(
        GateId::ToeplitzSymbol,
        d.status == DefinitenessStatus::PosDef,
        d.min_relative(),
        definiteness_detail("Φ_herm − Re Q", &d),
    );
    Ok(Some(q))
}

/// `Top(e^{q̃})∘Top(e^q) = C·Op^w(e^{iF̂})`, followed by the attempt to
/// write the result as `Top(C'e^{q̂})`. The trail lists all twelve gates.
pub fn compose_toeplitz(q: &MixedQuadForm, q_tilde: &MixedQuadForm, weight: &Weight, tol: f64) -> Result<PipelineReport> {
    check_dims(q_tilde, weight)?;
    let mut trail = Trail::new();
    let first = factor_to_weyl(&mut trail, q, weight, tol, GateId::Admissible, GateId::Spectral)?;
    let second = factor_to_weyl(&mut trail, q_tilde, weight, tol, GateId::AdmissibleTilde, GateId::SpectralTilde)?;
    match &first {
        Some((f, _)) => bounded_gate(&mut trail, GateId::Bounded, f, weight, tol)?,
        None => trail.skip(GateId::Bounded),
    }
    match &second {
        Some((f, _)) => bounded_gate(&mut trail, GateId::BoundedTilde, f, weight, tol)?,
        None => trail.skip(GateId::BoundedTilde),
    }
    let factor_exponents: Vec<HoloQuadForm> = first.iter().chain(second.iter()).map(|(f, _)| f.clone()).collect();

    let mut f_hat = None;
    match (&first, &second) {
        (Some((_, fund)), Some((_, fund_tilde))) if trail.ok() => {
            let margin = symplectic::composition_margin(fund, fund_tilde)?;
            if trail.record(
                GateId::Composition,
                margin > tol,
                margin,
                format!("σ_min/σ_max of 1+𝓕̃𝓕: {margin:.3e}"),
            ) {
                let fund_hat = symplectic::compose_fundamental(fund, fund_tilde, tol)?;
                f_hat = Some(symplectic::form_from_fund(&fund_hat)?);
            }
        }
        _ => trail.skip(GateId::Composition),
    }
    match &f_hat {
        Some(f) => bounded_gate(&mut trail, GateId::ComposedBounded, f, weight, tol)?,
        None => trail.skip(GateId::ComposedBounded),
    }
    let q_hat = match &f_hat {
        Some(f) if trail.ok() => weyl_to_toeplitz_gates(&mut trail, f, weight, tol)?,
        _ => {
            for id in [
                GateId::WeylBounded,
                GateId::WeylSpectral,
                GateId::NonDegenerate,
                GateId::ToeplitzSymbol,
            ] {
                trail.skip(id);
            }
            None
        }
    };
    Ok(PipelineReport {
        verdict: trail.verdict(),
        gates: trail.gates,
        factor_exponents,
        weyl_exponent: f_hat,
        toeplitz_exponent: q_hat,
        constant_estimate: None,
    })
}

/// `Φ_herm − Re q` as a real form, exposed for diagnostics.
pub fn admissibility_gap(q: &MixedQuadForm, weight: &Weight) -> Result<RealQuadOnC> {
    check_dims(q, weight)?;
    Ok(weight.herm().real_part().sub(&q.real_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{relative_distance, DEFAULT_REL_TOL, I, ZERO};

    const TOL: f64 = DEFAULT_REL_TOL;

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

    fn holo(rows: &[Vec<Complex64>]) -> HoloQuadForm {
        HoloQuadForm::new(CMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn coeff_x_xi(f: &HoloQuadForm) -> Complex64 {
        // F = k·xξ has Hessian [[0, k], [k, 0]]
        f.hessian()[(0, 1)]
    }

    #[test]
    fn holo_vc_examples() {
        // ½u² + ½v²
        let r = holo_vc(&holo(&[vec![ONE, ZERO], vec![ZERO, ONE]]), &[1], TOL).unwrap();
        assert!((r.reduced.hessian()[(0, 0)] - ONE).norm() < 1e-15);
        // uv + ½v²
        let r = holo_vc(&holo(&[vec![ZERO, ONE], vec![ONE, ONE]]), &[1], TOL).unwrap();
        assert!((r.reduced.hessian()[(0, 0)] + ONE).norm() < 1e-15);
        assert!((r.critical_map[(0, 0)] + ONE).norm() < 1e-15);
        // (x − y)(z − θ) + c·xz over (x, z), c = s/(1−s), s = −2
        let s = c(-2.0, 0.0);
        let cc = s / (1.0 - s);
        let mut m = CMatrix::zeros(4, 4);
        let set = |m: &mut CMatrix, a: usize, b: usize, v: Complex64| {
            m[(a, b)] += v;
            m[(b, a)] += v;
        };
        // variables (x, z, y, θ)
        set(&mut m, 0, 1, ONE + cc);
        set(&mut m, 0, 3, -ONE);
        set(&mut m, 2, 1, -ONE);
        set(&mut m, 2, 3, ONE);
        let r = holo_vc(&HoloQuadForm::new(m).unwrap(), &[0, 1], TOL).unwrap();
        assert!((r.reduced.hessian()[(0, 1)] - s).norm() < 1e-14);
    }

    #[test]
    fn holo_vc_degenerate() {
        let r = holo_vc(&holo(&[vec![ONE, ZERO], vec![ZERO, ZERO]]), &[1], TOL);
        assert!(matches!(r, Err(Error::DegenerateStationaryPhase { .. })));
    }

    #[test]
    fn holo_vc_critical_point_is_stationary() {
        let mut next = lcg(1);
        for _ in 0..50 {
            let dim = 2 + (next().abs() * 4.0) as usize;
            let m = CMatrix::from_fn(dim, dim, |_, _| c(next(), next()));
            let f = HoloQuadForm::new(m).unwrap();
            let elim: Vec<usize> = (0..dim).filter(|k| k % 2 == 1).collect();
            let r = holo_vc(&f, &elim, TOL).unwrap();
            let u: Vec<Complex64> = (0..r.retained.len()).map(|_| c(next(), next())).collect();
            let v = r.critical_map.mul_vec(&u);
            let mut full = vec![ZERO; dim];
            for (k, &i) in r.retained.iter().enumerate() {
                full[i] = u[k];
            }
            for (k, &i) in r.eliminated.iter().enumerate() {
                full[i] = v[k];
            }
            let grad = f.gradient(&full);
            let scale = 1.0 + f.hessian().norm_max() * full.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(r.eliminated.iter().all(|&i| grad[i].norm() < 1e-10 * scale));
            assert!((r.reduced.eval(&u) - f.eval(&full)).norm() < 1e-10 * scale * scale);
        }
    }

    #[test]
    fn legendre_examples() {
        // f = XY, g = ½Y² ⇒ h = −½X²
        let f = holo(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        let h = holo(&[vec![-ONE]]);
        let g = legendre_invert(&f, &h, 1, TOL).unwrap();
        assert!((g.hessian()[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn legendre_round_trip_random() {
        let mut next = lcg(2);
        for _ in 0..100 {
            let nx = 2;
            let f = HoloQuadForm::new(CMatrix::from_fn(2 * nx, 2 * nx, |_, _| c(next(), next()))).unwrap();
            let g = HoloQuadForm::new(CMatrix::from_fn(nx, nx, |_, _| c(next(), next()))).unwrap();
            let mut total = f.hessian().clone();
            let yy = &total.submatrix(nx, nx, nx, nx) + g.hessian();
            total.set_submatrix(nx, nx, &yy);
            let Ok(h) = holo_vc(&HoloQuadForm::new(total).unwrap(), &[2, 3], 1e-6) else { continue };
            let back = legendre_invert(&f, &h.reduced, nx, 1e-9).unwrap();
            assert!(relative_distance(back.hessian(), g.hessian()) < 1e-10);
        }
    }

    #[test]
    fn legendre_on_four_psi_herm_coupling() {
        let w = Weight::model(1);
        let f = w.psi_herm().scale(c(4.0, 0.0));
        let h = holo(&[vec![c(0.3, 0.1)]]);
        assert!(legendre_invert(&f, &h, 1, TOL).is_ok());
    }

    #[test]
    fn gaussian_examples() {
        let tau = 2.0 * std::f64::consts::PI;
        let v = gaussian_value(&CMatrix::identity(1), &[ZERO]).unwrap();
        assert!((v - c(tau.sqrt(), 0.0)).norm() < 1e-14);
        let v = gaussian_value(&CMatrix::identity(2), &[ZERO, ZERO]).unwrap();
        assert!((v - c(tau, 0.0)).norm() < 1e-14);
        let v = gaussian_value(&CMatrix::scalar(1, c(2.0, 0.0)), &[c(0.0, 1.0)]).unwrap();
        assert!((v - c((tau / 2.0).sqrt() * (-0.25f64).exp(), 0.0)).norm() < 1e-14);
        assert!(gaussian_value(&CMatrix::scalar(1, c(-1.0, 0.0)), &[ZERO]).is_err());
    }

    #[test]
    fn radial_weyl_coefficient() {
        let w = Weight::model(1);
        for lambda in [c(-1.0, 0.0), c(0.2, 1.0), c(-0.3, -2.0), c(0.2, 0.4)] {
            let r = toeplitz_to_weyl(&MixedQuadForm::radial(1, lambda), &w, TOL).unwrap();
            let f = r.weyl_exponent.unwrap();
            assert!((coeff_x_xi(&f) - 2.0 * lambda / (1.0 - lambda)).norm() < 1e-12);
            assert!(f.hessian()[(0, 0)].norm() < 1e-14 && f.hessian()[(1, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn zero_symbol_is_identity() {
        let w = Weight::model(2);
        let r = toeplitz_to_weyl(&MixedQuadForm::zero(2), &w, TOL).unwrap();
        assert!(r.all_passed());
        assert!(r.weyl_exponent.unwrap().hessian().norm_max() < 1e-15);
        let r = weyl_to_toeplitz(&HoloQuadForm::zero(4), &w, TOL).unwrap();
        assert!(r.all_passed());
        assert!(r.toeplitz_exponent.unwrap().scale_norm() < 1e-15);
    }

    #[test]
    fn edge_of_boundedness() {
        let w = Weight::model(1);
        let lambda = c(0.2, 0.4);
        let r = toeplitz_to_weyl(&MixedQuadForm::radial(1, lambda), &w, TOL).unwrap();
        assert!(r.all_passed());
        assert!((coeff_x_xi(r.weyl_exponent.as_ref().unwrap()) - I).norm() < 1e-14);
        let g = r.gate(GateId::Bounded).unwrap();
        assert_eq!(g.margin, Some(0.0));
        assert!(g.detail.contains("edge"));
    }

    #[test]
    fn inadmissible_symbol_fails_first_gate() {
        let w = Weight::model(1);
        let r = toeplitz_to_weyl(&MixedQuadForm::radial(1, c(0.3, 0.0)), &w, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::GateFailed(GateId::Admissible));
        assert!(r.weyl_exponent.is_none());
        assert_eq!(r.gates.len(), 3);
        assert_eq!(r.gates[2].status, GateStatus::Skipped);
    }

    #[test]
    fn unbounded_symbol_fails_boundedness() {
        // |1 − 2λ| < 1
        let w = Weight::model(1);
        let r = toeplitz_to_weyl(&MixedQuadForm::radial(1, c(0.2, 0.0)), &w, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::GateFailed(GateId::Bounded));
    }

    #[test]
    fn weyl_to_toeplitz_examples() {
        let w = Weight::model(1);
        let r = weyl_to_toeplitz(&HoloQuadForm::bilinear_x_xi(1, c(0.0, 8.0 / 3.0)), &w, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NotCertifiedToeplitz);
        let q = r.toeplitz_exponent.clone().unwrap();
        assert!((q.c()[(0, 0)].re - 0.64).abs() < 1e-12);
        assert_eq!(r.first_failure().unwrap().id, GateId::ToeplitzSymbol);

        let r = weyl_to_toeplitz(&HoloQuadForm::bilinear_x_xi(1, c(-4.0 / 3.0, 0.0)), &w, TOL).unwrap();
        assert!(r.all_passed());
        assert!((r.toeplitz_exponent.unwrap().c()[(0, 0)] - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn compose_examples() {
        let w = Weight::model(1);
        let r = compose_toeplitz(&MixedQuadForm::radial(1, I), &MixedQuadForm::radial(1, -I), &w, TOL).unwrap();
        assert!(r.all_passed(), "{:?}", r.gates);
        assert_eq!(r.gates.len(), 12);
        assert!((coeff_x_xi(r.weyl_exponent.as_ref().unwrap()) - c(-4.0 / 3.0, 0.0)).norm() < 1e-14);
        let q = r.toeplitz_exponent.unwrap();
        assert!((q.c()[(0, 0)] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!(q.b().norm_max() < 1e-14 && q.d().norm_max() < 1e-14);

        let l = c(0.2, 0.4);
        let r = compose_toeplitz(&MixedQuadForm::radial(1, l), &MixedQuadForm::radial(1, l), &w, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NotCertifiedToeplitz);
        assert!((coeff_x_xi(r.weyl_exponent.as_ref().unwrap()) - c(0.0, 8.0 / 3.0)).norm() < 1e-14);
        assert!((r.toeplitz_exponent.clone().unwrap().c()[(0, 0)] - c(0.64, 0.48)).norm() < 1e-12);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.id.label(), "(1.15.1)");

        let q = MixedQuadForm::new(
            CMatrix::scalar(2, c(0.01, 0.02)),
            CMatrix::from_rows(&[vec![c(-0.5, 0.0), c(0.05, 0.01)], vec![c(0.05, -0.01), c(-0.4, 0.0)]]).unwrap(),
            CMatrix::scalar(2, c(0.01, -0.02)),
        )
        .unwrap();
        let w2 = Weight::model(2);
        let r = compose_toeplitz(&q, &MixedQuadForm::zero(2), &w2, TOL).unwrap();
        assert!(r.all_passed(), "{:?}", r.gates);
        assert!(r.toeplitz_exponent.unwrap().max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn every_gate_appears_once() {
        let w = Weight::model(1);
        for (l, lt) in [(I, -I), (c(0.3, 0.0), c(0.0, 0.0)), (c(0.2, 0.4), c(0.2, 0.4))] {
            let r = compose_toeplitz(&MixedQuadForm::radial(1, l), &MixedQuadForm::radial(1, lt), &w, TOL).unwrap();
            let ids: Vec<GateId> = r.gates.iter().map(|g| g.id).collect();
            assert_eq!(ids, GateId::all().collect::<Vec<_>>());
        }
    }

    #[test]
    fn round_trip_general_weight() {
        let mut next = lcg(3);
        let mut done = 0;
        while done < 20 {
            let n = 1 + (next().abs() * 3.0) as usize;
            let a = CMatrix::from_fn(n, n, |_, _| c(next(), next()));
            let h = &(&a.adjoint() * &a) + &CMatrix::scalar(n, c(0.5, 0.0));
            let w = Weight::new(CMatrix::from_fn(n, n, |_, _| c(0.3 * next(), 0.3 * next())), h).unwrap();
            // Re q ≤ 0 keeps the symbol bounded
            let r = CMatrix::from_fn(n, n, |_, _| c(next(), next()));
            let neg = (&r.adjoint() * &r).scale_real(-0.5);
            let im = CMatrix::from_fn(n, n, |_, _| c(next(), next())).hermitian_part().scale(I);
            let b = CMatrix::from_fn(n, n, |_, _| c(0.1 * next(), 0.1 * next()));
            let q = MixedQuadForm::new(b.clone(), &neg + &im, b.conj()).unwrap();
            let fwd = toeplitz_to_weyl(&q, &w, TOL).unwrap();
            if !fwd.all_passed() {
                continue;
            }
            let back = weyl_to_toeplitz(fwd.weyl_exponent.as_ref().unwrap(), &w, TOL).unwrap();
            assert!(back.all_passed(), "{:?}", back.gates);
            let got = back.toeplitz_exponent.unwrap();
            assert!(got.max_abs_diff(&q) < 1e-10 * (1.0 + q.scale_norm()));
            done += 1;
        }
    }
}
