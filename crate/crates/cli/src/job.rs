use metaplectic::numkernel::{CMatrix, DEFAULT_REL_TOL};
use metaplectic::oracle::{GridOptions, DEFAULT_POINTS, MIN_POINTS};
use metaplectic::qform::{HoloQuadForm, MixedQuadForm, Weight};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest accepted dimension n.
pub const MAX_DIM: usize = 32;
/// Largest accepted points per axis.
pub const MAX_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Compose,
    WeylToToeplitz,
    Adjoint,
    Pushforward,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Compose => "compose",
            Command::WeylToToeplitz => "weyl-to-toeplitz",
            Command::Adjoint => "adjoint",
            Command::Pushforward => "pushforward",
            Command::Verify => "verify",
        }
    }
}

/// `q(x) = xᵀBx + x̄ᵀCx + x̄ᵀDx̄`; missing blocks are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub n: usize,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<CMatrix>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<CMatrix>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<CMatrix>,
}

impl FormJson {
    pub fn from_form(q: &MixedQuadForm) -> Self {
        FormJson {
            n: q.dim(),
            b: Some(q.b().clone()),
            c: Some(q.c().clone()),
            d: Some(q.d().clone()),
        }
    }

    pub fn to_form(&self) -> Result<MixedQuadForm, String> {
        check_dim(self.n)?;
        let block = |m: &Option<CMatrix>| m.clone().unwrap_or_else(|| CMatrix::zeros(self.n, self.n));
        let (b, c, d) = (block(&self.b), block(&self.c), block(&self.d));
        if b.rows() != self.n {
            return Err(format!("form declares n = {} but B has {} rows", self.n, b.rows()));
        }
        MixedQuadForm::new(b, c, d).map_err(|e| e.to_string())
    }
}

/// `½uᵀMu` on ℂᴺ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoloJson {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "M")]
    pub m: CMatrix,
}

impl HoloJson {
    pub fn from_form(f: &HoloQuadForm) -> Self {
        HoloJson { dim: f.dim(), m: f.hessian().clone() }
    }

    pub fn to_form(&self) -> Result<HoloQuadForm, String> {
        if self.dim % 2 != 0 {
            return Err(format!("Weyl exponent lives on C^2n, got N = {}", self.dim));
        }
        check_dim(self.dim / 2)?;
        if self.m.rows() != self.dim {
            return Err(format!("form declares N = {} but M has {} rows", self.dim, self.m.rows()));
        }
        HoloQuadForm::new(self.m.clone()).map_err(|e| e.to_string())
    }
}

/// `Φ(x) = Re(xᵀPx) + x̄ᵀHx`; `P` defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJson {
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<CMatrix>,
    #[serde(rename = "H")]
    pub h: CMatrix,
}

impl WeightJson {
    pub fn from_weight(w: &Weight) -> Self {
        WeightJson { p: Some(w.p().clone()), h: w.h().clone() }
    }

    pub fn to_weight(&self) -> Result<Weight, String> {
        let n = self.h.rows();
        check_dim(n)?;
        let p = self.p.clone().unwrap_or_else(|| CMatrix::zeros(n, n));
        Weight::new(p, self.h.clone()).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "R", default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub grid: Grid,
    /// Point at which oracle constants are read off.
    #[serde(default)]
    pub reference: Option<Complex64>,
}

fn default_tol() -> f64 {
    DEFAULT_REL_TOL
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: default_tol(), oracle: false, grid: Grid::default(), reference: None }
    }
}

pub const DEFAULT_REFERENCE: Complex64 = Complex64::new(0.5, 0.0);

impl Options {
    pub fn grid_options(&self) -> Result<GridOptions, String> {
        let m = self.grid.m.unwrap_or(DEFAULT_POINTS);
        if !(MIN_POINTS..=MAX_POINTS).contains(&m) {
            return Err(format!("grid m = {m} must lie in [{MIN_POINTS}, {MAX_POINTS}]"));
        }
        if let Some(r) = self.grid.r {
            if !(r > 0.0 && r.is_finite()) {
                return Err(format!("grid R = {r} must be positive"));
            }
        }
        Ok(GridOptions { m, r: self.grid.r })
    }

    pub fn reference(&self) -> Complex64 {
        self.reference.unwrap_or(DEFAULT_REFERENCE)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(format!("tol = {} must lie in (0, 1)", self.tol));
        }
        if self.reference.is_some_and(|z| !z.is_finite()) {
            return Err("reference point must be finite".into());
        }
        self.grid_options().map(|_| ())
    }
}

/// One invocation: a command, its inputs, and options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    /// Defaults to `|x|²/4` in the dimension of the inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightJson>,
    /// Target weight `Φ₂` of `adjoint`; defaults to `weight`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_out: Option<WeightJson>,
    /// Toeplitz exponents, applied first to last.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<FormJson>,
    /// Weyl exponents.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<HoloJson>,
    /// Canonical map on ℂ²ⁿ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<CMatrix>,
    #[serde(default)]
    pub options: Options,
}

/// Command-line settings that take precedence over the job's options.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub oracle: bool,
    pub grid_m: Option<usize>,
    pub grid_r: Option<f64>,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<JobSpec, String> {
        let job: JobSpec = serde_json::from_str(text).map_err(|e| format!("malformed job: {e}"))?;
        job.validate()?;
        Ok(job)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.tol {
            self.options.tol = t;
        }
        self.options.oracle |= o.oracle;
        if o.grid_m.is_some() {
            self.options.grid.m = o.grid_m;
        }
        if o.grid_r.is_some() {
            self.options.grid.r = o.grid_r;
        }
    }

    /// Checks that the command receives exactly the inputs it uses.
    pub fn validate(&self) -> Result<(), String> {
        self.options.validate()?;
        let (symbols, forms, map) = match self.command {
            Command::Analyze => (1..=1, 0..=0, false),
            Command::Compose => (2..=2, 0..=0, false),
            Command::WeylToToeplitz => (0..=0, 1..=1, false),
            Command::Adjoint | Command::Pushforward => (0..=0, 0..=0, true),
            Command::Verify => (1..=2, 0..=0, false),
        };
        let name = self.command.name();
        if !symbols.contains(&self.symbols.len()) {
            return Err(format!("{name} takes {symbols:?} symbols, got {}", self.symbols.len()));
        }
        if !forms.contains(&self.forms.len()) {
            return Err(format!("{name} takes {forms:?} Weyl forms, got {}", self.forms.len()));
        }
        if map != self.map.is_some() {
            return Err(format!("{name} {} a canonical map", if map { "requires" } else { "does not take" }));
        }
        if self.weight_out.is_some() && self.command != Command::Adjoint {
            return Err(format!("{name} does not take weight_out"));
        }
        self.dimension().map(|_| ())
    }

    /// The dimension n shared by all inputs.
    pub fn dimension(&self) -> Result<usize, String> {
        let doubled = self.forms.iter().map(|f| f.dim).chain(self.map.iter().map(|m| m.rows()));
        if let Some(odd) = doubled.into_iter().find(|d| d % 2 == 1) {
            return Err(format!("forms and maps act on C^2n, got size {odd}"));
        }
        let mut dims = Vec::new();
        dims.extend(self.symbols.iter().map(|s| s.n));
        dims.extend(self.forms.iter().map(|f| f.dim / 2));
        dims.extend(self.map.iter().map(|m| m.rows() / 2));
        dims.extend(self.weight.iter().chain(&self.weight_out).map(|w| w.h.rows()));
        let n = *dims.first().ok_or("job has no inputs")?;
        if dims.iter().any(|&d| d != n) {
            return Err(format!("inconsistent dimensions across inputs: {dims:?}"));
        }
        check_dim(n)?;
        Ok(n)
    }

    pub fn weight(&self, n: usize) -> Result<Weight, String> {
        match &self.weight {
            Some(w) => w.to_weight(),
            None => Ok(Weight::model(n)),
        }
    }
}

fn check_dim(n: usize) -> Result<(), String> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(format!("dimension n = {n} must lie in [1, {MAX_DIM}]"))
    }
}
