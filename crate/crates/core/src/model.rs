//! Closed forms for the model weight `Φ₀ = |x|²/4`: the radial family
//! `λ|x|²`, the extended family `λ|x|² + A x̄·x̄`, and their action on
//! coherent states. These are the reference values the general engine is
//! checked against.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, DEFAULT_REL_TOL, ONE};
use crate::qform::{dot, MixedQuadForm};

/// Slack for the non-strict inequalities `|1 − 2λ| ≥ 1` and the factor bounds `4‖A‖ ≤ (1 − |γ|²)/|γ|²`.
pub const EDGE_TOL: f64 = 1e-12;

/// `q(x) = λ|x|²` with `Re λ < ¼`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSymbol {
    lambda: Complex64,
}

impl RadialSymbol {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.re < 0.25) || !lambda.im.is_finite() {
            return Err(Error::Inadmissible(format!(
                "Re λ = {} must be below 1/4",
                lambda.re
            )));
        }
        Ok(RadialSymbol { lambda })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn form(&self, n: usize) -> MixedQuadForm {
        MixedQuadForm::radial(n, self.lambda)
    }
}

/// A point of the circle `|1 − 2λ| = 1`: `λ = (1 − e^{iφ})/2`. It is
/// admissible for `|φ| < π/3`.
pub fn edge_lambda(phi: f64) -> Complex64 {
    (ONE - Complex64::from_polar(1.0, phi)) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialAnalysis {
    /// `c = λ/(1 − λ)`; the Weyl exponent is `F = 2c·xξ`.
    pub weyl_coeff: Complex64,
    /// `|1 − 2λ|`.
    pub modulus: f64,
    /// `|1 − 2λ| ≥ 1`.
    pub bounded: bool,
    /// `Re c = (1 − |1 − 2λ|²)/(4|1 − λ|²)`.
    pub re_weyl: f64,
    /// `γ = 1/(1 − 2λ)`.
    pub gamma: Complex64,
}

pub fn radial_analyze(lambda: Complex64) -> Result<RadialAnalysis> {
    RadialSymbol::new(lambda)?;
    let modulus = (ONE - 2.0 * lambda).norm();
    Ok(RadialAnalysis {
        weyl_coeff: lambda / (ONE - lambda),
        modulus,
        bounded: modulus >= 1.0 - EDGE_TOL,
        re_weyl: (1.0 - modulus * modulus) / (4.0 * (ONE - lambda).norm_sqr()),
        gamma: ONE / (ONE - 2.0 * lambda),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialComposition {
    /// `s = λ + λ̃ − 2λλ̃`.
    pub s: Complex64,
    /// `F̂ = (2s/(1 − s))·xξ`.
    pub fhat_coeff: Complex64,
    /// `Re s < ¼`: the composite is `Top(e^{s|x|²})`.
    pub toeplitz_ok: bool,
    /// Product of the Weyl coefficients `cc̃ ≠ −1`, i.e. `−1 ∉ Spec(𝓕̃𝓕)`.
    pub lemma54_ok: bool,
    pub coefficient_product: Complex64,
}

impl RadialComposition {
    pub fn q_hat(&self, n: usize) -> Option<MixedQuadForm> {
        self.toeplitz_ok.then(|| MixedQuadForm::radial(n, self.s))
    }
}

pub fn radial_compose(lambda: Complex64, lambda_tilde: Complex64) -> Result<RadialComposition> {
    for (name, l) in [("λ", lambda), ("λ̃", lambda_tilde)] {
        let a = radial_analyze(l)?;
        if !a.bounded {
            return Err(Error::Inadmissible(format!(
                "factor {name} = {l} is unbounded: |1 − 2{name}| = {} < 1",
                a.modulus
            )));
        }
    }
    let s = lambda + lambda_tilde - 2.0 * lambda * lambda_tilde;
    let product = (lambda / (ONE - lambda)) * (lambda_tilde / (ONE - lambda_tilde));
    Ok(RadialComposition {
        s,
        fhat_coeff: 2.0 * s / (ONE - s),
        toeplitz_ok: s.re < 0.25,
        lemma54_ok: (product + ONE).norm() > EDGE_TOL,
        coefficient_product: product,
    })
}

/// `q(x) = λ|x|² + A x̄·x̄` with `Re λ + ‖A‖ < ¼`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSymbol {
    lambda: Complex64,
    a: CMatrix,
    a_norm: f64,
}

impl ExtendedSymbol {
    pub fn new(lambda: Complex64, a: CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("A must be square".into()));
        }
        let asym = a.asymmetry();
        if asym > DEFAULT_REL_TOL {
            return Err(Error::NotSymmetric {
                what: "A",
                deviation: asym,
            });
        }
        let a = a.symmetric_part();
        let a_norm = operator_norm(&a)?;
        if !(lambda.re + a_norm < 0.25) {
            return Err(Error::Inadmissible(format!(
                "Re λ + ‖A‖ = {} must be below 1/4",
                lambda.re + a_norm
            )));
        }
        Ok(ExtendedSymbol { lambda, a, a_norm })
    }

    pub fn radial(n: usize, lambda: Complex64) -> Result<Self> {
        Self::new(lambda, CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    /// Euclidean operator norm of `A`.
    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn gamma(&self) -> Complex64 {
        ONE / (ONE - 2.0 * self.lambda)
    }

    pub fn form(&self) -> MixedQuadForm {
        MixedQuadForm::radial_with_antiholomorphic(self.lambda, &self.a)
            .expect("A is square")
    }

    /// Boundedness: `4‖A‖ ≤ (1 − |γ|²)/|γ|²`.
    pub fn boundedness(&self) -> BoundCheck {
        let g2 = self.gamma().norm_sqr();
        BoundCheck::le(4.0 * self.a_norm, (1.0 - g2) / g2)
    }
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    Ok(numkernel::singular_value_bounds(a)?.1)
}

/// `lhs ≤ rhs` (or `<` when strict), with the slack reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub ok: bool,
}

impl BoundCheck {
    fn le(lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            strict: false,
            ok: lhs <= rhs + EDGE_TOL * (1.0 + rhs.abs()),
        }
    }

    fn lt(lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            strict: true,
            ok: lhs < rhs,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedComposition {
    /// `γ̂ = γ̃γ`.
    pub gamma_hat: Complex64,
    /// `Â = Ã + A/γ̃²`.
    pub a_hat: CMatrix,
    /// `λ̂ = λ + λ̃ − 2λλ̃`.
    pub lambda_hat: Complex64,
    /// Factor bounds `4‖A‖ ≤ (1 − |γ|²)/|γ|²` for `q` then `q̃`.
    pub factor_bounds: [BoundCheck; 2],
    /// `Re λ̂ + ‖Â‖ < ¼`: the composite symbol is admissible.
    pub densely_defined: BoundCheck,
    /// `4‖Â‖ ≤ (1 − |γ̂|²)/|γ̂|²`: the composite is bounded.
    pub closure: BoundCheck,
}

impl ExtendedComposition {
    /// `q̂ = λ̂|x|² + Â x̄·x̄`.
    pub fn q_hat(&self) -> MixedQuadForm {
        MixedQuadForm::radial_with_antiholomorphic(self.lambda_hat, &self.a_hat).expect("Â is square")
    }

    /// `Top(e^{q̃})∘Top(e^q) = Top(e^{q̂})` is certified.
    pub fn certified(&self) -> bool {
        self.factor_bounds.iter().all(|b| b.ok) && self.densely_defined.ok && self.closure.ok
    }
}

pub fn extended_compose(q: &ExtendedSymbol, q_tilde: &ExtendedSymbol) -> Result<ExtendedComposition> {
    if q.dim() != q_tilde.dim() {
        return Err(Error::Dimension("extended symbols of different dimension".into()));
    }
    let factor_bounds = [q.boundedness(), q_tilde.boundedness()];
    for (name, b) in ["q", "q̃"].iter().zip(&factor_bounds) {
        if !b.ok {
            return Err(Error::Inadmissible(format!(
                "factor {name} is unbounded: 4‖A‖ = {} exceeds (1 − |γ|²)/|γ|² = {}",
                b.lhs, b.rhs
            )));
        }
    }
    let (g, gt) = (q.gamma(), q_tilde.gamma());
    let gamma_hat = gt * g;
    let a_hat = q_tilde.a() + &q.a().scale(ONE / (gt * gt));
    let lambda_hat = q.lambda + q_tilde.lambda - 2.0 * q.lambda * q_tilde.lambda;
    let a_hat_norm = operator_norm(&a_hat)?;
    let gh2 = gamma_hat.norm_sqr();
    Ok(ExtendedComposition {
        gamma_hat,
        a_hat,
        lambda_hat,
        factor_bounds,
        densely_defined: BoundCheck::lt(lambda_hat.re + a_hat_norm, 0.25),
        closure: BoundCheck::le(4.0 * a_hat_norm, (1.0 - gh2) / gh2),
    })
}

/// `amplitude · exp(x·v/2)`, i.e. `amplitude · e^{2Ψ₀(x, v)}` for `Φ₀ = |x|²/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentGaussian {
    pub amplitude: Complex64,
    pub v: Vec<Complex64>,
}

impl CoherentGaussian {
    /// `e^{2Ψ₀(·, w̄)}`.
    pub fn coherent(w: &[Complex64]) -> Self {
        CoherentGaussian {
            amplitude: ONE,
            v: w.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.amplitude * (dot(x, &self.v) / 2.0).exp()
    }

    /// Applies `Top(e^q)`: `v ↦ γv`, amplitude gains `γⁿ·exp(Aγv·γv)`.
    pub fn apply(&self, sym: &ExtendedSymbol) -> CoherentGaussian {
        assert_eq!(self.v.len(), sym.dim());
        let g = sym.gamma();
        let gv: Vec<Complex64> = self.v.iter().map(|z| g * z).collect();
        let quad = dot(&sym.a.mul_vec(&gv), &gv);
        CoherentGaussian {
            amplitude: self.amplitude * g.powi(sym.dim() as i32) * quad.exp(),
            v: gv,
        }
    }
}

/// `Top(e^q)` applied to `e^{2Ψ₀(·, w̄)}`.
pub fn coherent_action(sym: &ExtendedSymbol, w: &[Complex64]) -> CoherentGaussian {
    CoherentGaussian::coherent(w).apply(sym)
}

/// The composite action read off from the composition data:
/// `γ̂ⁿ e^{2Ψ₀(x, γ̂w̄)} exp(Âγ̂w̄·γ̂w̄)`.
pub fn composite_coherent_action(c: &ExtendedComposition, w: &[Complex64]) -> CoherentGaussian {
    let n = w.len();
    let v: Vec<Complex64> = w.iter().map(|z| c.gamma_hat * z.conj()).collect();
    let quad = dot(&c.a_hat.mul_vec(&v), &v);
    CoherentGaussian {
        amplitude: c.gamma_hat.powi(n as i32) * quad.exp(),
        v,
    }
}
