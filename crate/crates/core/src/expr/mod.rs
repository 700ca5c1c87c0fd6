//! Expression trees for real-analytic defining functions on `C^n`.
//!
//! A tree mixes the holomorphic coordinates `z1..zn` with conjugation,
//! real/imaginary parts, moduli, and powers, so a defining function is stored
//! in exactly the algebraic shape it is usually written in. The module
//! provides a small text grammar ([`Expr::parse`]), pointwise evaluation
//! ([`Expr::eval`]), and symbolic Wirtinger differentiation
//! ([`Expr::wirtinger`]). There is deliberately no general simplifier: smart
//! constructors fold constants and drop zero/one factors, nothing else.

mod eval;
mod parse;
mod print;
mod wirtinger;

pub use eval::EvalError;
pub use parse::ParseError;
pub use wirtinger::WirtKind;

use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

/// Branch choice for fractional powers.
///
/// `Principal` cuts along `(-inf, 0]` with `arg in (-pi, pi)`; `PosCut` cuts
/// along `[0, +inf)` with `arg in (0, 2*pi)`. Evaluation exactly on the cut is
/// an error, so every fractional power is single-valued and continuous on its
/// domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    PosCut,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Principal => "principal",
            Branch::PosCut => "poscut",
        }
    }
}

/// Named scalar parameters for map families (values substituted before use).
pub type ParamEnv = BTreeMap<String, Complex64>;

/// An expression over `z1..zn`, complex scalars, and named parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Complex literal. Parsed literals are real numbers, `i`, or their negations.
    Lit(Complex64),
    /// Coordinate `z_j`, 1-based.
    Var(usize),
    /// Named scalar parameter, resolved by substitution.
    Param(String),
    Conj(Box<Expr>),
    Re(Box<Expr>),
    Im(Box<Expr>),
    /// `|w|`; differentiable away from `w = 0`.
    Abs(Box<Expr>),
    /// `|w|^2 = w * conj(w)`; smooth everywhere.
    Abs2(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power, any sign; never carries a branch.
    IntPow(Box<Expr>, i32),
    /// Real power of a nonnegative real-valued base (no branch needed).
    RealPow(Box<Expr>, f64),
    /// Rational power with a mandatory branch annotation.
    FracPow {
        base: Box<Expr>,
        num: i32,
        den: i32,
        branch: Branch,
    },
}

impl Expr {
    pub fn lit(x: f64) -> Expr {
        Expr::Lit(Complex64::new(x, 0.0))
    }

    pub fn litc(x: Complex64) -> Expr {
        Expr::Lit(x)
    }

    pub fn var(j: usize) -> Expr {
        Expr::Var(j)
    }

    fn as_lit(&self) -> Option<Complex64> {
        match self {
            Expr::Lit(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_lit() == Some(Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_lit() == Some(Complex64::new(1.0, 0.0))
    }

    /// `a + b` with constant folding.
    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_lit(), b.as_lit()) {
            return Expr::Lit(x + y);
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    /// `a - b` with constant folding.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_lit(), b.as_lit()) {
            return Expr::Lit(x - y);
        }
        if b.is_zero() {
            return a;
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    /// `a * b` with constant folding and zero/one absorption.
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_lit(), b.as_lit()) {
            return Expr::Lit(x * y);
        }
        if a.is_zero() || b.is_zero() {
            return Expr::lit(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// `a / b`; folds constants when the quotient is well defined.
    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_lit(), b.as_lit()) {
            if y.norm() > eval::EPS_DIV {
                return Expr::Lit(x / y);
            }
        }
        if a.is_zero() {
            return Expr::lit(0.0);
        }
        if b.is_one() {
            return a;
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn conj(e: Expr) -> Expr {
        match e {
            Expr::Lit(c) => Expr::Lit(c.conj()),
            Expr::Conj(inner) => *inner,
            other => Expr::Conj(Box::new(other)),
        }
    }

    pub fn re_of(e: Expr) -> Expr {
        match e.as_lit() {
            Some(c) => Expr::lit(c.re),
            None => Expr::Re(Box::new(e)),
        }
    }

    pub fn im_of(e: Expr) -> Expr {
        match e.as_lit() {
            Some(c) => Expr::lit(c.im),
            None => Expr::Im(Box::new(e)),
        }
    }

    pub fn abs_of(e: Expr) -> Expr {
        match e.as_lit() {
            Some(c) => Expr::lit(c.norm()),
            None => Expr::Abs(Box::new(e)),
        }
    }

    pub fn abs2_of(e: Expr) -> Expr {
        match e.as_lit() {
            Some(c) => Expr::lit(c.norm_sqr()),
            None => Expr::Abs2(Box::new(e)),
        }
    }

    pub fn int_pow(e: Expr, k: i32) -> Expr {
        if k == 0 {
            return Expr::lit(1.0);
        }
        if k == 1 {
            return e;
        }
        if let Some(c) = e.as_lit() {
            if k > 0 || c.norm() > eval::EPS_DIV {
                return Expr::Lit(c.powi(k));
            }
        }
        Expr::IntPow(Box::new(e), k)
    }

    pub fn real_pow(e: Expr, alpha: f64) -> Expr {
        Expr::RealPow(Box::new(e), alpha)
    }

    pub fn frac_pow(e: Expr, num: i32, den: i32, branch: Branch) -> Expr {
        Expr::FracPow {
            base: Box::new(e),
            num,
            den,
            branch,
        }
    }

    /// Largest coordinate index appearing in the tree (0 if none).
    pub fn max_var(&self) -> usize {
        self.fold_nodes(0, &mut |acc, e| match e {
            Expr::Var(j) => acc.max(*j),
            _ => acc,
        })
    }

    /// True when no `Var` node appears (constants and parameters only).
    pub fn is_z_free(&self) -> bool {
        self.fold_nodes(true, &mut |acc, e| acc && !matches!(e, Expr::Var(_)))
    }

    /// True when no parameter node appears.
    pub fn is_param_free(&self) -> bool {
        self.fold_nodes(true, &mut |acc, e| acc && !matches!(e, Expr::Param(_)))
    }

    /// Syntactic holomorphy: no conjugation, real/imaginary part, or modulus
    /// node anywhere, and no unresolved parameters.
    pub fn is_holomorphic_syntax(&self) -> bool {
        self.fold_nodes(true, &mut |acc, e| {
            acc && !matches!(
                e,
                Expr::Conj(_)
                    | Expr::Re(_)
                    | Expr::Im(_)
                    | Expr::Abs(_)
                    | Expr::Abs2(_)
                    | Expr::Param(_)
            )
        })
    }

    pub fn contains_frac_pow(&self) -> bool {
        self.fold_nodes(false, &mut |acc, e| {
            acc || matches!(e, Expr::FracPow { .. })
        })
    }

    pub fn node_count(&self) -> usize {
        self.fold_nodes(0usize, &mut |acc, _| acc + 1)
    }

    /// Names of all parameters appearing in the tree.
    pub fn param_names(&self) -> std::collections::BTreeSet<String> {
        self.fold_nodes(std::collections::BTreeSet::new(), &mut |mut acc, e| {
            if let Expr::Param(name) = e {
                acc.insert(name.clone());
            }
            acc
        })
    }

    pub(crate) fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Lit(_) | Expr::Var(_) | Expr::Param(_) => vec![],
            Expr::Conj(a) | Expr::Re(a) | Expr::Im(a) | Expr::Abs(a) | Expr::Abs2(a) => {
                vec![a]
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                vec![a, b]
            }
            Expr::IntPow(a, _) | Expr::RealPow(a, _) => vec![a],
            Expr::FracPow { base, .. } => vec![base],
        }
    }

    pub(crate) fn fold_nodes<T>(&self, init: T, f: &mut impl FnMut(T, &Expr) -> T) -> T {
        let mut acc = f(init, self);
        for c in self.children() {
            acc = c.fold_nodes(acc, f);
        }
        acc
    }
}

/// Errors from domain construction and validation.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("anchor has {got} components but the domain lives in C^{n}")]
    AnchorDimension { n: usize, got: usize },
    #[error("defining function references z{index} but the domain lives in C^{n}")]
    VarOutOfRange { index: usize, n: usize },
    #[error("defining function still contains parameter `{0}`")]
    UnresolvedParameter(String),
    #[error("anchor is not interior: rho(anchor) = {value}")]
    AnchorNotInterior { value: f64 },
    #[error("defining function is not real-valued: |Im rho| = {imag} at a sample point")]
    NotRealValued { imag: f64 },
    #[error("defining function failed to evaluate at the anchor: {0}")]
    AnchorEval(#[from] EvalError),
    #[error("defining function failed to evaluate at {failures} of {samples} sample points")]
    TooManyEvalFailures { failures: usize, samples: usize },
}

/// A domain `{ rho < 0 }` in `C^n` with a marked interior anchor point.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub name: String,
    pub n: usize,
    pub rho: Expr,
    pub anchor: Vec<Complex64>,
    /// `-rho(anchor)`: how deep the anchor sits inside the domain.
    pub interior_margin: f64,
    /// Known boundary points where `rho` is not smooth; analysis near these
    /// reports proximity instead of failing opaquely.
    pub exceptional: Vec<Vec<Complex64>>,
    /// Human-readable claim/location tag carried into reports.
    pub provenance: String,
}

/// Relative tolerance for the real-valuedness certificate.
pub const EPS_REAL: f64 = 1e-12;

impl DomainSpec {
    /// Validates and wraps a defining function.
    ///
    /// Checks that `rho` mentions only `z1..zn` and no parameters, that the
    /// anchor is strictly interior, and that `rho` is real-valued to within
    /// [`EPS_REAL`] (relative) at 1000 deterministic sample points around the
    /// anchor.
    pub fn new(
        name: &str,
        n: usize,
        rho: Expr,
        anchor: Vec<Complex64>,
        provenance: &str,
    ) -> Result<Self, DomainError> {
        if anchor.len() != n {
            return Err(DomainError::AnchorDimension {
                n,
                got: anchor.len(),
            });
        }
        let maxv = rho.max_var();
        if maxv > n {
            return Err(DomainError::VarOutOfRange { index: maxv, n });
        }
        if !rho.is_param_free() {
            let mut name = String::new();
            rho.fold_nodes((), &mut |(), e| {
                if let Expr::Param(p) = e {
                    if name.is_empty() {
                        name = p.clone();
                    }
                }
            });
            return Err(DomainError::UnresolvedParameter(name));
        }

        let at_anchor = rho.eval(&anchor)?;
        if at_anchor.re >= 0.0 || at_anchor.im.abs() > EPS_REAL * (1.0 + at_anchor.norm()) {
            return Err(DomainError::AnchorNotInterior {
                value: at_anchor.re,
            });
        }

        let streams = crate::stream::Streams::new(0x00d0_0a11, &format!("domain.reality.{name}"));
        let samples = 1000usize;
        let mut failures = 0usize;
        for i in 0..samples {
            use rand::Rng;
            let mut rng = streams.rng(i as u64);
            let z: Vec<Complex64> = anchor
                .iter()
                .map(|a| {
                    a + Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
                })
                .collect();
            match rho.eval(&z) {
                Ok(v) => {
                    if v.im.abs() > EPS_REAL * (1.0 + v.norm()) {
                        return Err(DomainError::NotRealValued { imag: v.im.abs() });
                    }
                }
                Err(_) => failures += 1,
            }
        }
        if failures > samples / 5 {
            return Err(DomainError::TooManyEvalFailures { failures, samples });
        }

        Ok(DomainSpec {
            name: name.to_string(),
            n,
            rho,
            anchor,
            interior_margin: -at_anchor.re,
            exceptional: Vec::new(),
            provenance: provenance.to_string(),
        })
    }

    /// Attaches known non-smooth boundary points.
    pub fn with_exceptional(mut self, points: Vec<Vec<Complex64>>) -> Self {
        self.exceptional = points;
        self
    }

    /// Evaluates `rho` and returns its real part.
    pub fn eval_rho(&self, z: &[Complex64]) -> Result<f64, EvalError> {
        Ok(self.rho.eval(z)?.re)
    }

    /// Distance from `z` to the nearest recorded exceptional point, if any.
    pub fn exceptional_distance(&self, z: &[Complex64]) -> Option<f64> {
        self.exceptional
            .iter()
            .map(|p| {
                p.iter()
                    .zip(z)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .min_by(|a, b| a.total_cmp(b))
    }
}
