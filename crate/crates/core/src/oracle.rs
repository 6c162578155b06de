//! Brute-force quadrature on ℂ (n = 1): Bergman projection, Toeplitz
//! operators on sampled functions, and the Weyl-symbol integral.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::{ConstantEstimate, PipelineReport};
use crate::error::{Error, Result};
use crate::numkernel::I;
use crate::qform::{HoloQuadForm, MixedQuadForm, Weight};

pub const MIN_POINTS: usize = 32;
pub const DEFAULT_POINTS: usize = 64;
/// Integrand magnitude at the grid boundary, relative to its peak.
pub const TARGET_EPS: f64 = 1e-10;
const WIDTH_FACTOR: f64 = 1.5;
const UNSTABLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub m: usize,
    /// Fixed half-width; derived from the integrand's decay when `None`.
    pub r: Option<f64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { m: DEFAULT_POINTS, r: None }
    }
}

impl GridOptions {
    pub fn refined(self) -> Self {
        GridOptions { m: 2 * self.m, ..self }
    }
}

/// `ln|f(y)| = c + bᵀt − tᵀSt` with `t = (Re y, Im y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDecay {
    pub s: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl GaussianDecay {
    /// Reads `S` and `b` off second differences of `ln|f|`; exact when `f`
    /// is a Gaussian.
    pub fn probe(f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync)) -> Result<Self> {
        let g = |re: f64, im: f64| -> Result<f64> {
            let v = f(Complex64::new(re, im))?.norm();
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::Quadrature(format!("integrand is {v} at probe point {re}+{im}i")))
            }
        };
        let g0 = g(0.0, 0.0)?;
        let (gx, gmx, gy, gmy, gxy) = (g(1.0, 0.0)?, g(-1.0, 0.0)?, g(0.0, 1.0)?, g(0.0, -1.0)?, g(1.0, 1.0)?);
        let s11 = -(gx + gmx - 2.0 * g0) / 2.0;
        let s22 = -(gy + gmy - 2.0 * g0) / 2.0;
        let s12 = -(gxy - gx - gy + g0) / 2.0;
        Ok(GaussianDecay {
            s: [[s11, s12], [s12, s22]],
            b: [(gx - gmx) / 2.0, (gy - gmy) / 2.0],
        })
    }

    /// Smallest eigenvalue of `S`.
    pub fn min_rate(&self) -> f64 {
        let [[a, b], [_, d]] = self.s;
        let mean = (a + d) / 2.0;
        mean - ((a - d) * (a - d) / 4.0 + b * b).sqrt()
    }

    /// Maximizer of `|f|`; requires `S` positive definite.
    pub fn peak(&self) -> Result<Complex64> {
        if !(self.min_rate() > 0.0) {
            return Err(Error::Quadrature(format!(
                "integrand has no Gaussian decay (smallest rate {:.3e})",
                self.min_rate()
            )));
        }
        let [[a, b], [_, d]] = self.s;
        let det = a * d - b * b;
        let [u, v] = self.b;
        Ok(Complex64::new((d * u - b * v) / (2.0 * det), (a * v - b * u) / (2.0 * det)))
    }

    /// `1.5·sqrt(ln(1/ε)/μ_min)`.
    pub fn half_width(&self) -> Result<f64> {
        self.peak()?;
        Ok(WIDTH_FACTOR * ((1.0 / TARGET_EPS).ln() / self.min_rate()).sqrt())
    }
}

/// Tensor Gauss–Legendre rule on the square `center + [−R, R]²`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    center: Complex64,
    r: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(center: Complex64, r: f64, m: usize) -> Result<Self> {
        Oracle::new(GridOptions { m, r: Some(r) })?.grid(center, r)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.r
    }

    pub fn points_per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        self.center + Complex64::new(self.r * self.nodes[i], self.r * self.nodes[j])
    }

    /// `∫ f dL`; rejects grids on whose boundary `|f|` exceeds `ε·|f(center)|`.
    pub fn integrate(&self, f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync)) -> Result<Complex64> {
        let m = self.nodes.len();
        let rows: Vec<(Complex64, f64)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut edge: f64 = 0.0;
                for j in 0..m {
                    let v = f(self.node(i, j))?;
                    sum += v * self.weights[j];
                    if i == 0 || i + 1 == m || j == 0 || j + 1 == m {
                        edge = edge.max(v.norm());
                    }
                }
                Ok((sum * self.weights[i], edge))
            })
            .collect::<Result<_>>()?;
        let mut total = Complex64::new(0.0, 0.0);
        let mut edge: f64 = 0.0;
        for (s, e) in rows {
            total += s;
            edge = edge.max(e);
        }
        let peak = f(self.center)?.norm();
        if !total.is_finite() || !(edge <= TARGET_EPS * peak) {
            return Err(Error::Quadrature(format!(
                "insufficient decay: boundary/peak magnitude {:.3e} on R = {}",
                edge / peak,
                self.r
            )));
        }
        Ok(total * self.r * self.r)
    }
}

/// `f(y) = b·y² + c·|y|² + d·ȳ²`.
#[derive(Debug, Clone, Copy)]
struct Quad1 {
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Quad1 {
    fn of(q: &MixedQuadForm) -> Result<Self> {
        require_scalar(q.dim())?;
        Ok(Quad1 { b: q.b()[(0, 0)], c: q.c()[(0, 0)], d: q.d()[(0, 0)] })
    }

    fn eval(&self, y: Complex64) -> Complex64 {
        let yb = y.conj();
        self.b * y * y + self.c * yb * y + self.d * yb * yb
    }
}

/// Scalar data of an n = 1 weight: `Φ₀ = Re(p y²) + h|y|²`.
#[derive(Debug, Clone, Copy)]
struct Weight1 {
    p: Complex64,
    h: f64,
}

impl Weight1 {
    fn of(w: &Weight) -> Result<Self> {
        require_scalar(w.dim())?;
        Ok(Weight1 { p: w.p()[(0, 0)], h: w.h()[(0, 0)].re })
    }

    /// `2Ψ₀(x, ȳ) − 2Φ₀(y)`.
    fn kernel_exponent(&self, x: Complex64, y: Complex64) -> Complex64 {
        let yb = y.conj();
        self.p * x * x + 2.0 * self.h * x * yb + self.p.conj() * yb * yb
            - 2.0 * ((self.p * y * y).re + self.h * y.norm_sqr())
    }
}

fn require_scalar(n: usize) -> Result<()> {
    if n == 1 {
        Ok(())
    } else {
        Err(Error::Dimension(format!("the oracle works on C^1, got C^{n}")))
    }
}

pub type Sampled<'a> = &'a (dyn Fn(Complex64) -> Result<Complex64> + Sync);

/// Quadrature driver holding one Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct Oracle {
    opts: GridOptions,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Oracle {
    pub fn new(opts: GridOptions) -> Result<Self> {
        if opts.m < MIN_POINTS {
            return Err(Error::Quadrature(format!("m = {} is below the minimum {MIN_POINTS}", opts.m)));
        }
        if let Some(r) = opts.r {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Quadrature(format!("half-width R = {r} must be positive")));
            }
        }
        let rule = GaussLegendre::new(opts.m.try_into().expect("m ≥ 32"));
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        Ok(Oracle { opts, nodes, weights })
    }

    pub fn options(&self) -> GridOptions {
        self.opts
    }

    fn grid(&self, center: Complex64, r: f64) -> Result<QuadratureGrid> {
        Ok(QuadratureGrid {
            center,
            r,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
        })
    }

    /// Grid centered at the peak of `|f|`, sized from its decay.
    pub fn grid_for(&self, f: Sampled) -> Result<QuadratureGrid> {
        let decay = GaussianDecay::probe(f)?;
        let center = decay.peak()?;
        let r = match self.opts.r {
            Some(r) => r,
            None => decay.half_width()?,
        };
        self.grid(center, r)
    }

    pub fn integrate(&self, f: Sampled) -> Result<Complex64> {
        self.grid_for(f)?.integrate(f)
    }

    /// `Πu(x) = a₀∫ e^{2Ψ₀(x,ȳ)} u(y) e^{−2Φ₀(y)} L(dy)`, `a₀ = 2Φ''_{xx̄}/π`.
    pub fn bergman_apply(&self, weight: &Weight, u: Sampled, x: Complex64) -> Result<Complex64> {
        let w = Weight1::of(weight)?;
        let f = |y: Complex64| Ok(w.kernel_exponent(x, y).exp() * u(y)?);
        Ok(self.integrate(&f)? * (2.0 * w.h / PI))
    }

    /// `Top(e^q)u(x) = Π(e^q u)(x)`.
    pub fn toeplitz_apply(&self, weight: &Weight, q: &MixedQuadForm, u: Sampled, x: Complex64) -> Result<Complex64> {
        let w = Weight1::of(weight)?;
        let q = Quad1::of(q)?;
        let f = |y: Complex64| Ok((w.kernel_exponent(x, y) + q.eval(y)).exp() * u(y)?);
        Ok(self.integrate(&f)? * (2.0 * w.h / PI))
    }

    /// `Top(e^{q_k})⋯Top(e^{q_1})u(x)`, each factor by its own quadrature.
    pub fn toeplitz_chain(&self, weight: &Weight, symbols: &[&MixedQuadForm], u: Sampled, x: Complex64) -> Result<Complex64> {
        match symbols.split_last() {
            None => u(x),
            Some((last, rest)) => {
                let inner = |y: Complex64| self.toeplitz_chain(weight, rest, u, y);
                self.toeplitz_apply(weight, last, &inner, x)
            }
        }
    }

    /// `C_Φ₀∫ exp(−4Φ_herm(x − y)) e^{q(y)} L(dy)` with `C_Φ₀ = 4Φ''_{xx̄}/π`,
    /// so that `q = 0` gives 1.
    pub fn weyl_symbol_numeric(&self, q: &MixedQuadForm, weight: &Weight, x: Complex64) -> Result<Complex64> {
        let w = Weight1::of(weight)?;
        let q = Quad1::of(q)?;
        let f = |y: Complex64| Ok((q.eval(y) - 4.0 * w.h * (x - y).norm_sqr()).exp());
        Ok(self.integrate(&f)? * (4.0 * w.h / PI))
    }
}

/// `e^{2Ψ₀(x, w̄)}`.
pub fn coherent_state(weight: &Weight, w: Complex64) -> Result<impl Fn(Complex64) -> Result<Complex64> + Sync> {
    let Weight1 { p, h } = Weight1::of(weight)?;
    let v = w.conj();
    Ok(move |x: Complex64| Ok((p * x * x + 2.0 * h * x * v + p.conj() * v * v).exp()))
}

/// `|a − b| / max(|b|, 1e-30)`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-30)
}

/// `e^{iF}` restricted to `Λ_Φ₀` at `x`.
pub fn weyl_symbol_on_lambda(f: &HoloQuadForm, weight: &Weight, x: Complex64) -> Complex64 {
    (I * f.eval(&weight.lambda_point(&[x]))).exp()
}

/// Pipeline inputs whose constant can be estimated.
#[derive(Debug, Clone, Copy)]
pub enum Pipeline<'a> {
    /// `Top(e^q) = C·Op^w(e^{iF})`.
    ToeplitzToWeyl { q: &'a MixedQuadForm },
    /// `Op^w(e^{iG}) = C·Top(e^Q)`.
    WeylToToeplitz { g: &'a HoloQuadForm },
    /// `Top(e^{q̃})∘Top(e^q) = C·Top(e^{q̂})`, matched on the coherent state
    /// at the reference point.
    Compose { q: &'a MixedQuadForm, q_tilde: &'a MixedQuadForm },
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if num.norm() < UNSTABLE || den.norm() < UNSTABLE {
        return Err(Error::Quadrature(format!(
            "unstable ratio {num:e} / {den:e} at the reference point"
        )));
    }
    Ok(num / den)
}

fn constant_at(oracle: &Oracle, pipeline: Pipeline, report: &PipelineReport, weight: &Weight, x: Complex64) -> Result<Complex64> {
    let missing = |what: &str| Error::Inadmissible(format!("pipeline produced no {what}"));
    match pipeline {
        Pipeline::ToeplitzToWeyl { q } => {
            let f = report.weyl_exponent.as_ref().ok_or_else(|| missing("Weyl exponent"))?;
            ratio(oracle.weyl_symbol_numeric(q, weight, x)?, weyl_symbol_on_lambda(f, weight, x))
        }
        Pipeline::WeylToToeplitz { g } => {
            let q = report.toeplitz_exponent.as_ref().ok_or_else(|| missing("Toeplitz exponent"))?;
            ratio(weyl_symbol_on_lambda(g, weight, x), oracle.weyl_symbol_numeric(q, weight, x)?)
        }
        Pipeline::Compose { q, q_tilde } => {
            let q_hat = report.toeplitz_exponent.as_ref().ok_or_else(|| missing("Toeplitz exponent"))?;
            let k = coherent_state(weight, x)?;
            let seq = oracle.toeplitz_chain(weight, &[q, q_tilde], &k, x)?;
            ratio(seq, oracle.toeplitz_apply(weight, q_hat, &k, x)?)
        }
    }
}

/// `C` at the reference point, with `|C(m) − C(2m)|` as error bar.
pub fn constant_estimate(
    pipeline: Pipeline,
    report: &PipelineReport,
    weight: &Weight,
    reference: Complex64,
    opts: GridOptions,
) -> Result<ConstantEstimate> {
    let coarse = constant_at(&Oracle::new(opts)?, pipeline, report, weight, reference)?;
    let fine = constant_at(&Oracle::new(opts.refined())?, pipeline, report, weight, reference)?;
    Ok(ConstantEstimate { value: fine, error_bar: (fine - coarse).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{compose_toeplitz, toeplitz_to_weyl, weyl_to_toeplitz};
    use crate::model::{coherent_action, ExtendedSymbol};
    use crate::numkernel::{CMatrix, ONE};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const TOL: f64 = 1e-9;
    const SAMPLES: [Complex64; 5] = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-0.5, 0.7),
        Complex64::new(0.3, -1.2),
        Complex64::new(1.5, 0.5),
    ];

    fn oracle(m: usize) -> Oracle {
        Oracle::new(GridOptions { m, r: None }).unwrap()
    }

    fn one(_: Complex64) -> Result<Complex64> {
        Ok(ONE)
    }

    fn general_weight() -> Weight {
        Weight::new(CMatrix::scalar(1, c(0.1, 0.05)), CMatrix::scalar(1, c(0.4, 0.0))).unwrap()
    }

    #[test]
    fn probe_recovers_gaussian() {
        let f = |y: Complex64| Ok((-(0.7 * y.re * y.re + 0.2 * y.re * y.im + 1.1 * y.im * y.im) + 0.3 * y.re - 0.4 * y.im + c(0.0, 2.0) * y).exp());
        let d = GaussianDecay::probe(&f).unwrap();
        assert!((d.s[0][0] - 0.7).abs() < 1e-12 && (d.s[0][1] - 0.1).abs() < 1e-12 && (d.s[1][1] - 1.1).abs() < 1e-12);
        // Im(2i·y) = 2 Re y adds no modulus; Re(2i·y) = −2 Im y does
        assert!((d.b[0] - 0.3).abs() < 1e-12 && (d.b[1] + 2.4).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_small_m_and_growth() {
        assert!(matches!(Oracle::new(GridOptions { m: 16, r: None }), Err(Error::Quadrature(_))));
        let grow = |y: Complex64| Ok(Complex64::new(y.norm_sqr(), 0.0).exp());
        assert!(matches!(oracle(32).integrate(&grow), Err(Error::Quadrature(_))));
    }

    #[test]
    fn boundary_check_flags_short_grid() {
        let o = Oracle::new(GridOptions { m: 64, r: Some(1.0) }).unwrap();
        let f = |y: Complex64| Ok(Complex64::new(-y.norm_sqr(), 0.0).exp());
        assert!(matches!(o.integrate(&f), Err(Error::Quadrature(_))));
        let v = oracle(64).integrate(&f).unwrap();
        assert!(relative_error(v, c(PI, 0.0)) < 1e-13);
    }

    #[test]
    fn bergman_calibration() {
        let o = oracle(64);
        for w in [Weight::model(1), general_weight()] {
            for x in SAMPLES {
                let v = o.bergman_apply(&w, &one, x).unwrap();
                assert!(relative_error(v, ONE) < TOL);
            }
        }
    }

    #[test]
    fn bergman_reproduces_coherent_states() {
        let o = oracle(64);
        for weight in [Weight::model(1), general_weight()] {
            let k = coherent_state(&weight, c(1.0, -0.5)).unwrap();
            for x in SAMPLES {
                let v = o.bergman_apply(&weight, &k, x).unwrap();
                assert!(relative_error(v, k(x).unwrap()) < TOL);
            }
        }
    }

    #[test]
    fn toeplitz_on_coherent_state_matches_closed_form() {
        let w = Weight::model(1);
        let o = oracle(64);
        let q = MixedQuadForm::radial(1, c(-1.0, 0.0));
        let k = coherent_state(&w, ONE).unwrap();
        for x in SAMPLES {
            let v = o.toeplitz_apply(&w, &q, &k, x).unwrap();
            let expect = (x / 6.0).exp() / 3.0;
            assert!(relative_error(v, expect) < TOL);
        }
        for lambda in [c(-1.0, 0.0), c(-0.5, 0.0), c(0.0, 0.2)] {
            let sym = ExtendedSymbol::radial(1, lambda).unwrap();
            let q = sym.form();
            for w0 in [c(0.0, 0.0), ONE, c(1.0, 1.0)] {
                let k = coherent_state(&w, w0).unwrap();
                let model = coherent_action(&sym, &[w0]);
                for x in SAMPLES {
                    let v = o.toeplitz_apply(&w, &q, &k, x).unwrap();
                    assert!(relative_error(v, model.eval(&[x])) < TOL);
                }
            }
        }
    }

    #[test]
    fn weyl_symbol_of_radial_symbol() {
        let w = Weight::model(1);
        let o = oracle(64);
        assert!(relative_error(o.weyl_symbol_numeric(&MixedQuadForm::zero(1), &w, c(0.4, 0.1)).unwrap(), ONE) < 1e-13);
        let lambda = c(-1.0, 0.0);
        let q = MixedQuadForm::radial(1, lambda);
        for x in SAMPLES {
            let v = o.weyl_symbol_numeric(&q, &w, x).unwrap();
            let expect = (lambda / (1.0 - lambda) * x.norm_sqr()).exp() / (1.0 - lambda);
            assert!(relative_error(v, expect) < TOL);
        }
    }

    #[test]
    fn weyl_symbol_matches_engine_exponent() {
        let w = Weight::model(1);
        let q = MixedQuadForm::radial_with_antiholomorphic(c(-1.0, 0.0), &CMatrix::scalar(1, c(0.1, 0.0))).unwrap();
        let r = toeplitz_to_weyl(&q, &w, 1e-9).unwrap();
        let est = constant_estimate(Pipeline::ToeplitzToWeyl { q: &q }, &r, &w, c(0.0, 0.0), GridOptions::default()).unwrap();
        assert!(est.error_bar < 1e-10);
        let o = oracle(64);
        for x in SAMPLES {
            let ratio = o.weyl_symbol_numeric(&q, &w, x).unwrap() / weyl_symbol_on_lambda(r.weyl_exponent.as_ref().unwrap(), &w, x);
            assert!(relative_error(ratio, est.value) < 1e-8);
        }
    }

    #[test]
    fn constants_for_trivial_and_radial() {
        let w = Weight::model(1);
        let zero = MixedQuadForm::zero(1);
        let r = toeplitz_to_weyl(&zero, &w, 1e-9).unwrap();
        let est = constant_estimate(Pipeline::ToeplitzToWeyl { q: &zero }, &r, &w, c(0.3, 0.2), GridOptions::default()).unwrap();
        assert!(relative_error(est.value, ONE) < 1e-12);

        let lambda = c(-1.0, 0.0);
        let q = MixedQuadForm::radial(1, lambda);
        let r = toeplitz_to_weyl(&q, &w, 1e-9).unwrap();
        for x in [c(0.0, 0.0), c(1.0, 0.5)] {
            let est = constant_estimate(Pipeline::ToeplitzToWeyl { q: &q }, &r, &w, x, GridOptions::default()).unwrap();
            assert!(relative_error(est.value, ONE / (1.0 - lambda)) < 1e-9);
            assert!(est.error_bar < 1e-9);
        }

        let g = r.weyl_exponent.clone().unwrap();
        let back = weyl_to_toeplitz(&g, &w, 1e-9).unwrap();
        let est = constant_estimate(Pipeline::WeylToToeplitz { g: &g }, &back, &w, c(0.5, 0.0), GridOptions::default()).unwrap();
        assert!(relative_error(est.value, 1.0 - lambda) < 1e-9);
    }

    #[test]
    fn bch_composition_constant_is_one() {
        let w = Weight::model(1);
        let (q, qt) = (MixedQuadForm::radial(1, c(0.0, 1.0)), MixedQuadForm::radial(1, c(0.0, -1.0)));
        let r = compose_toeplitz(&q, &qt, &w, 1e-9).unwrap();
        // the chirp e^{±i|y|²} needs m ≈ 96 in the nested integral
        let opts = GridOptions { m: 48, r: None };
        let est = constant_estimate(Pipeline::Compose { q: &q, q_tilde: &qt }, &r, &w, c(0.5, 0.0), opts).unwrap();
        assert!(relative_error(est.value, ONE) < 1e-8, "{:?}", est);
        assert!(est.error_bar < 1e-2);
    }

    #[test]
    fn coherent_state_is_twice_psi0() {
        let w = general_weight();
        let k = coherent_state(&w, c(0.4, -0.9)).unwrap();
        let x = c(-0.3, 0.6);
        let expect = (2.0 * w.psi0().eval(&[x, c(0.4, 0.9)])).exp();
        assert!(relative_error(k(x).unwrap(), expect) < 1e-14);
    }

    #[test]
    fn dimension_is_checked() {
        let o = oracle(32);
        assert!(matches!(o.bergman_apply(&Weight::model(2), &one, ONE), Err(Error::Dimension(_))));
    }

    #[test]
    fn reduction_is_deterministic() {
        let w = Weight::model(1);
        let o = oracle(48);
        let k = coherent_state(&w, c(0.3, 0.9)).unwrap();
        let a = o.bergman_apply(&w, &k, c(0.2, 0.1)).unwrap();
        let b = o.bergman_apply(&w, &k, c(0.2, 0.1)).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reproducing_property(wr in -1.5f64..1.5, wi in -1.5f64..1.5, xr in -1.5f64..1.5, xi in -1.5f64..1.5) {
            let weight = Weight::model(1);
            let k = coherent_state(&weight, c(wr, wi)).unwrap();
            let x = c(xr, xi);
            let v = oracle(48).bergman_apply(&weight, &k, x).unwrap();
            prop_assert!(relative_error(v, k(x).unwrap()) < TOL);
        }
    }
}
