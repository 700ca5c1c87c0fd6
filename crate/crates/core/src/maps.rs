//! Holomorphic maps, parametric map families, and the residual checks that
//! certify how they interact with a domain.
//!
//! A [`MapFamily`] stores component templates containing named parameters;
//! [`MapFamily::instantiate`] substitutes parameter values, folds the now
//! constant subtrees, and insists the result is syntactically holomorphic in
//! `z` — conjugation and moduli are allowed in templates only over
//! parameter subtrees. The numerical checks all report a maximum residual
//! with a witness point and are bitwise reproducible for a fixed seed.

use crate::expr::{Branch, DomainSpec, EvalError, Expr, ParamEnv};
use crate::levi::{LeviError, LeviProbe};
use crate::stream::{self, Streams};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("family `{family}` maps C^{n} and needs {n} components, got {got}")]
    ComponentCount { family: String, n: usize, got: usize },
    #[error("component {index} references z{var} beyond C^{n}")]
    VarOutOfRange { index: usize, var: usize, n: usize },
    #[error("component {index} applies `{op}` to a subtree that depends on z; components must be holomorphic once parameters are substituted")]
    ConjugateOverZ { index: usize, op: &'static str },
    #[error("template uses undeclared parameter `{name}`")]
    UndeclaredParameter { name: String },
    #[error("missing value for parameter `{0}`")]
    MissingParameter(String),
    #[error("parameter `{name}` = {value} lies outside {range}")]
    ParamOutOfRange {
        name: String,
        value: Complex64,
        range: String,
    },
    #[error("component {index} is not holomorphic after substitution")]
    NotHolomorphic { index: usize },
    #[error("point has {got} components but the map acts on C^{expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("all {requested} samples were skipped")]
    NoUsableSamples { requested: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Levi(#[from] LeviError),
}

/// Admissible values for one map-family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamRange {
    /// Open unit disc in `C`.
    UnitDisc,
    /// Open real interval `(lo, hi)`.
    RealInterval { lo: f64, hi: f64 },
}

impl ParamRange {
    pub fn contains(&self, v: Complex64) -> bool {
        match self {
            ParamRange::UnitDisc => v.norm() < 1.0,
            ParamRange::RealInterval { lo, hi } => {
                v.im.abs() <= 1e-12 && *lo < v.re && v.re < *hi
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Complex64 {
        match self {
            ParamRange::UnitDisc => stream::unit_disc(rng),
            ParamRange::RealInterval { lo, hi } => {
                let width = hi - lo;
                let v = rng.random_range(*lo..*hi).max(lo + 1e-12 * width);
                Complex64::new(v, 0.0)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            ParamRange::UnitDisc => "the open unit disc".into(),
            ParamRange::RealInterval { lo, hi } => format!("the open interval ({lo}, {hi})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: String,
    pub range: ParamRange,
}

impl ParamSpec {
    pub fn new(name: &str, range: ParamRange) -> ParamSpec {
        ParamSpec {
            name: name.to_string(),
            range,
        }
    }
}

/// Maximum-residual summary shared by the sampling checks.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSummary {
    /// Random samples requested.
    pub samples: usize,
    pub used: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub worst_point: Vec<Complex64>,
    /// Parameter values (or angles) behind the worst sample, when the check
    /// draws them per sample.
    pub worst_params: Option<ParamEnv>,
}

/// Outcome of the branch-cut crossing analysis along interior segments.
#[derive(Debug, Clone, Serialize)]
pub struct BranchContinuity {
    pub segments: usize,
    pub used: usize,
    pub skipped: usize,
    /// Cut crossings detected across all refined steps.
    pub crossings: usize,
    /// Largest image jump across a detected crossing; 0 when none.
    pub max_jump: f64,
    pub worst_point: Vec<Complex64>,
}

/// A concrete holomorphic map `C^n -> C^n` with optional metadata:
/// a real multiplier `mu` such that `rho_target(F(z)) = mu(z) *
/// rho_source(z)` (identically 1 when absent), and a denominator whose zero
/// set the map must avoid.
#[derive(Debug, Clone)]
pub struct HoloMap {
    pub name: String,
    pub n: usize,
    pub components: Vec<Expr>,
    pub multiplier: Option<Expr>,
    pub denominator: Option<Expr>,
}

impl HoloMap {
    pub fn identity(n: usize) -> HoloMap {
        HoloMap {
            name: "identity".into(),
            n,
            components: (1..=n).map(Expr::var).collect(),
            multiplier: None,
            denominator: None,
        }
    }

    /// Linear map from matrix rows: component `j` is `sum_k rows[j][k] z_k`.
    pub fn linear(name: &str, rows: &[Vec<Complex64>]) -> HoloMap {
        let n = rows.len();
        let components = rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), n, "linear map needs a square matrix");
                row.iter().enumerate().fold(Expr::lit(0.0), |acc, (k, c)| {
                    Expr::add(acc, Expr::mul(Expr::litc(*c), Expr::var(k + 1)))
                })
            })
            .collect();
        HoloMap {
            name: name.to_string(),
            n,
            components,
            multiplier: None,
            denominator: None,
        }
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>, MapError> {
        if z.len() != self.n {
            return Err(MapError::WrongDimension {
                expected: self.n,
                got: z.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.eval(z))
            .collect::<Result<Vec<_>, _>>()?)
    }

    fn multiplier_at(&self, z: &[Complex64]) -> Result<Complex64, EvalError> {
        match &self.multiplier {
            Some(m) => m.eval(z),
            None => Ok(Complex64::new(1.0, 0.0)),
        }
    }

    /// Residual of `rho_target(F(z)) - mu(z) * rho_source(z)` over random
    /// interior points of the source domain.
    pub fn verify_invariance_identity(
        &self,
        source: &LeviProbe,
        target: &DomainSpec,
        samples: usize,
        seed: u64,
    ) -> Result<ResidualSummary, MapError> {
        let streams = Streams::new(seed, &format!("maps.identity.{}.{}", self.name, target.name));
        let summary = fold_scan(samples, &streams, |rng| {
            let z = source.random_interior_point(rng).ok()?;
            self.identity_residual(&z, source.domain(), target).ok().map(|r| (r, z, None))
        });
        summary.ok_or(MapError::NoUsableSamples { requested: samples })
    }

    fn identity_residual(
        &self,
        z: &[Complex64],
        source: &DomainSpec,
        target: &DomainSpec,
    ) -> Result<f64, MapError> {
        let w = self.apply(z)?;
        let lhs = target.eval_rho(&w)?;
        let mu = self.multiplier_at(z)?;
        let rhs = mu * source.eval_rho(z)?;
        Ok((Complex64::new(lhs, 0.0) - rhs).norm())
    }

    /// `|rho_target(F(z))|` over random boundary points of the source.
    pub fn verify_boundary_preservation(
        &self,
        source: &LeviProbe,
        target: &DomainSpec,
        samples: usize,
        seed: u64,
    ) -> Result<ResidualSummary, MapError> {
        let streams = Streams::new(seed, &format!("maps.boundary.{}.{}", self.name, target.name));
        let summary = fold_scan(samples, &streams, |rng| {
            let hit = source.random_boundary_point(rng).ok()?;
            let w = self.apply(&hit.point).ok()?;
            let r = target.eval_rho(&w).ok()?;
            Some((r.abs(), hit.point, None))
        });
        summary.ok_or(MapError::NoUsableSamples { requested: samples })
    }

    /// Walks straight segments between random interior points and reports
    /// every place where a fractional-power base crosses its branch cut,
    /// together with the largest image jump across a crossing.
    ///
    /// The crossing predicate is geometric (the base segment straddles the
    /// cut ray), refined by bisection, so a map on the correct branch
    /// reports exactly zero crossings.
    pub fn verify_branch_continuity(
        &self,
        source: &LeviProbe,
        segments: usize,
        seed: u64,
    ) -> Result<BranchContinuity, MapError> {
        let mut bases = Vec::new();
        for c in &self.components {
            collect_frac_bases(c, &mut bases);
        }
        if bases.is_empty() {
            return Ok(BranchContinuity {
                segments,
                used: segments,
                skipped: 0,
                crossings: 0,
                max_jump: 0.0,
                worst_point: Vec::new(),
            });
        }

        let streams = Streams::new(seed, &format!("maps.branch.{}", self.name));
        let results: Vec<Option<(usize, f64, Vec<Complex64>)>> = (0..segments)
            .into_par_iter()
            .map(|i| {
                let mut rng = streams.rng(i as u64);
                let za = source.random_interior_point(&mut rng).ok()?;
                let zb = source.random_interior_point(&mut rng).ok()?;
                Some(self.segment_crossings(&za, &zb, &bases))
            })
            .collect();

        let mut used = 0;
        let mut skipped = 0;
        let mut crossings = 0;
        let mut max_jump = 0.0f64;
        let mut worst_point = Vec::new();
        for r in results {
            match r {
                Some((count, jump, point)) => {
                    used += 1;
                    crossings += count;
                    if jump > max_jump {
                        max_jump = jump;
                        worst_point = point;
                    }
                }
                None => skipped += 1,
            }
        }
        if used == 0 {
            return Err(MapError::NoUsableSamples {
                requested: segments,
            });
        }
        Ok(BranchContinuity {
            segments,
            used,
            skipped,
            crossings,
            max_jump,
            worst_point,
        })
    }

    fn segment_crossings(
        &self,
        za: &[Complex64],
        zb: &[Complex64],
        bases: &[(Expr, Branch)],
    ) -> (usize, f64, Vec<Complex64>) {
        const STEPS: usize = 64;
        let at = |t: f64| -> Vec<Complex64> {
            za.iter().zip(zb).map(|(a, b)| a + t * (b - a)).collect()
        };
        let mut crossings = 0usize;
        let mut max_jump = 0.0f64;
        let mut worst = Vec::new();
        for (base, branch) in bases {
            for k in 0..STEPS {
                let t0 = k as f64 / STEPS as f64;
                let t1 = (k + 1) as f64 / STEPS as f64;
                self.refine_crossing(
                    base, *branch, &at, t0, t1, &mut crossings, &mut max_jump, &mut worst,
                );
            }
        }
        (crossings, max_jump, worst)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine_crossing(
        &self,
        base: &Expr,
        branch: Branch,
        at: &impl Fn(f64) -> Vec<Complex64>,
        t0: f64,
        t1: f64,
        crossings: &mut usize,
        max_jump: &mut f64,
        worst: &mut Vec<Complex64>,
    ) {
        let (b0, b1) = match (base.eval(&at(t0)), base.eval(&at(t1))) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return,
        };
        if !straddles_cut(b0, b1, branch) {
            return;
        }
        if t1 - t0 > 1e-12 {
            let mid = 0.5 * (t0 + t1);
            self.refine_crossing(base, branch, at, t0, mid, crossings, max_jump, worst);
            self.refine_crossing(base, branch, at, mid, t1, crossings, max_jump, worst);
            return;
        }
        *crossings += 1;
        let jump = match (self.apply(&at(t0)), self.apply(&at(t1))) {
            (Ok(f0), Ok(f1)) => f0
                .iter()
                .zip(&f1)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            _ => 1e30,
        };
        if jump > *max_jump {
            *max_jump = jump;
            *worst = at(t0);
        }
    }
}

/// Does the straight segment `b0 -> b1` cross the branch cut ray?
fn straddles_cut(b0: Complex64, b1: Complex64, branch: Branch) -> bool {
    let on_ray = |v: Complex64| match branch {
        Branch::Principal => v.im == 0.0 && v.re < 0.0,
        Branch::PosCut => v.im == 0.0 && v.re > 0.0,
    };
    if on_ray(b0) || on_ray(b1) {
        return true;
    }
    if b0.im == 0.0 || b1.im == 0.0 || b0.im.signum() == b1.im.signum() {
        return false;
    }
    let s = b0.im / (b0.im - b1.im);
    let re = b0.re + s * (b1.re - b0.re);
    match branch {
        Branch::Principal => re < 0.0,
        Branch::PosCut => re > 0.0,
    }
}

fn collect_frac_bases(e: &Expr, out: &mut Vec<(Expr, Branch)>) {
    if let Expr::FracPow { base, branch, .. } = e {
        if !base.is_z_free() {
            out.push(((**base).clone(), *branch));
        }
    }
    for c in e.children() {
        collect_frac_bases(c, out);
    }
}

/// A parametric family of holomorphic maps given by component templates.
#[derive(Debug, Clone)]
pub struct MapFamily {
    pub name: String,
    pub n: usize,
    components: Vec<Expr>,
    params: Vec<ParamSpec>,
    multiplier: Option<Expr>,
    denominator: Option<Expr>,
}

impl MapFamily {
    pub fn new(
        name: &str,
        n: usize,
        components: Vec<Expr>,
        params: Vec<ParamSpec>,
    ) -> Result<MapFamily, MapError> {
        if components.len() != n {
            return Err(MapError::ComponentCount {
                family: name.to_string(),
                n,
                got: components.len(),
            });
        }
        for (index, c) in components.iter().enumerate() {
            let maxv = c.max_var();
            if maxv > n {
                return Err(MapError::VarOutOfRange {
                    index,
                    var: maxv,
                    n,
                });
            }
            check_conj_usage(c, index)?;
            for pname in c.param_names() {
                if !params.iter().any(|p| p.name == pname) {
                    return Err(MapError::UndeclaredParameter { name: pname });
                }
            }
        }
        Ok(MapFamily {
            name: name.to_string(),
            n,
            components,
            params,
            multiplier: None,
            denominator: None,
        })
    }

    /// Declares the real multiplier `mu` with `rho(F_a(z)) = mu(z) * rho(z)`.
    pub fn with_multiplier(mut self, m: Expr) -> Self {
        self.multiplier = Some(m);
        self
    }

    /// Declares the denominator whose zeros the family must avoid.
    pub fn with_denominator(mut self, d: Expr) -> Self {
        self.denominator = Some(d);
        self
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn multiplier(&self) -> Option<&Expr> {
        self.multiplier.as_ref()
    }

    pub fn sample_params<R: Rng>(&self, rng: &mut R) -> ParamEnv {
        self.params
            .iter()
            .map(|p| (p.name.clone(), p.range.sample(rng)))
            .collect()
    }

    /// Substitutes parameter values and returns the resulting holomorphic
    /// map. Values are range-checked; leftover parameters or conjugation
    /// over `z` are errors.
    pub fn instantiate(&self, values: &ParamEnv) -> Result<HoloMap, MapError> {
        for spec in &self.params {
            let v = values
                .get(&spec.name)
                .ok_or_else(|| MapError::MissingParameter(spec.name.clone()))?;
            if !spec.range.contains(*v) {
                return Err(MapError::ParamOutOfRange {
                    name: spec.name.clone(),
                    value: *v,
                    range: spec.range.describe(),
                });
            }
        }
        let mut components = Vec::with_capacity(self.n);
        for (index, c) in self.components.iter().enumerate() {
            let inst = c.substitute(values).fold_z_free();
            if !inst.is_holomorphic_syntax() {
                return Err(MapError::NotHolomorphic { index });
            }
            components.push(inst);
        }
        Ok(HoloMap {
            name: self.name.clone(),
            n: self.n,
            components,
            multiplier: self
                .multiplier
                .as_ref()
                .map(|m| m.substitute(values).fold_z_free()),
            denominator: self
                .denominator
                .as_ref()
                .map(|d| d.substitute(values).fold_z_free()),
        })
    }

    /// Invariance identity over random parameter values and random interior
    /// points, one draw of each per sample.
    pub fn verify_family_identity(
        &self,
        source: &LeviProbe,
        target: &DomainSpec,
        samples: usize,
        seed: u64,
    ) -> Result<ResidualSummary, MapError> {
        let streams = Streams::new(seed, &format!("maps.family.{}.{}", self.name, target.name));
        let summary = fold_scan(samples, &streams, |rng| {
            let env = self.sample_params(rng);
            let map = self.instantiate(&env).ok()?;
            let z = source.random_interior_point(rng).ok()?;
            let r = map.identity_residual(&z, source.domain(), target).ok()?;
            Some((r, z, Some(env)))
        });
        summary.ok_or(MapError::NoUsableSamples { requested: samples })
    }

    /// Boundary preservation over random parameter values and random
    /// boundary points.
    pub fn verify_family_boundary(
        &self,
        source: &LeviProbe,
        target: &DomainSpec,
        samples: usize,
        seed: u64,
    ) -> Result<ResidualSummary, MapError> {
        let streams = Streams::new(
            seed,
            &format!("maps.family.boundary.{}.{}", self.name, target.name),
        );
        let summary = fold_scan(samples, &streams, |rng| {
            let env = self.sample_params(rng);
            let map = self.instantiate(&env).ok()?;
            let hit = source.random_boundary_point(rng).ok()?;
            let w = map.apply(&hit.point).ok()?;
            let r = target.eval_rho(&w).ok()?;
            Some((r.abs(), hit.point, Some(env)))
        });
        summary.ok_or(MapError::NoUsableSamples { requested: samples })
    }
}

fn check_conj_usage(e: &Expr, index: usize) -> Result<(), MapError> {
    let op = match e {
        Expr::Conj(a) if !a.is_z_free() => Some("conj"),
        Expr::Re(a) if !a.is_z_free() => Some("re"),
        Expr::Im(a) if !a.is_z_free() => Some("im"),
        Expr::Abs(a) if !a.is_z_free() => Some("abs"),
        Expr::Abs2(a) if !a.is_z_free() => Some("abs2"),
        _ => None,
    };
    if let Some(op) = op {
        return Err(MapError::ConjugateOverZ { index, op });
    }
    for c in e.children() {
        check_conj_usage(c, index)?;
    }
    Ok(())
}

/// Diagonal torus action `z_j -> exp(i * sum_m theta_m * weights[m][j]) z_j`.
#[derive(Debug, Clone)]
pub struct TorusAction {
    pub n: usize,
    pub weights: Vec<Vec<i64>>,
}

impl TorusAction {
    pub fn new(n: usize, weights: Vec<Vec<i64>>) -> TorusAction {
        for row in &weights {
            assert_eq!(row.len(), n, "each weight row must have n entries");
        }
        TorusAction { n, weights }
    }

    /// The circle acting by a common phase on every coordinate.
    pub fn circle(n: usize) -> TorusAction {
        TorusAction::new(n, vec![vec![1; n]])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, thetas: &[f64], z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(thetas.len(), self.weights.len());
        assert_eq!(z.len(), self.n);
        (0..self.n)
            .map(|j| {
                let phase: f64 = thetas
                    .iter()
                    .zip(&self.weights)
                    .map(|(t, row)| t * row[j] as f64)
                    .sum();
                z[j] * Complex64::from_polar(1.0, phase)
            })
            .collect()
    }
}

/// `|rho(action(theta, z)) - rho(z)|` over random interior points and
/// angles. Large residuals demonstrate that the action does not preserve the
/// domain.
pub fn verify_torus_invariance(
    action: &TorusAction,
    probe: &LeviProbe,
    samples: usize,
    seed: u64,
) -> Result<ResidualSummary, MapError> {
    let streams = Streams::new(
        seed,
        &format!("maps.torus.{}.{}", action.dim(), probe.domain().name),
    );
    let summary = fold_scan(samples, &streams, |rng| {
        let z = probe.random_interior_point(rng).ok()?;
        let thetas: Vec<f64> = (0..action.dim())
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let w = action.apply(&thetas, &z);
        let before = probe.domain().eval_rho(&z).ok()?;
        let after = probe.domain().eval_rho(&w).ok()?;
        let env: ParamEnv = thetas
            .iter()
            .enumerate()
            .map(|(m, t)| (format!("theta{}", m + 1), Complex64::new(*t, 0.0)))
            .collect();
        Some(((after - before).abs(), z, Some(env)))
    });
    summary.ok_or(MapError::NoUsableSamples { requested: samples })
}

/// Parallel max-residual fold in sample order; `None` per-sample results are
/// counted as skips. Returns `None` when nothing was usable.
fn fold_scan(
    samples: usize,
    streams: &Streams,
    per: impl Fn(&mut ChaCha8Rng) -> Option<(f64, Vec<Complex64>, Option<ParamEnv>)> + Sync,
) -> Option<ResidualSummary> {
    let results: Vec<Option<(f64, Vec<Complex64>, Option<ParamEnv>)>> = (0..samples)
        .into_par_iter()
        .map(|i| per(&mut streams.rng(i as u64)))
        .collect();
    let mut used = 0;
    let mut skipped = 0;
    let mut max_residual = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    let mut worst_params = None;
    for r in results {
        match r {
            Some((res, point, params)) => {
                used += 1;
                if res > max_residual {
                    max_residual = res;
                    worst_point = point;
                    worst_params = params;
                }
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return None;
    }
    Some(ResidualSummary {
        samples,
        used,
        skipped,
        max_residual,
        worst_point,
        worst_params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::DomainSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disc() -> DomainSpec {
        let rho = Expr::parse("abs2(z1) - 1", 1).unwrap();
        DomainSpec::new("disc", 1, rho, vec![c(0.0, 0.0)], "unit disc").unwrap()
    }

    fn ball2() -> DomainSpec {
        let rho = Expr::parse("abs2(z1) + abs2(z2) - 1", 2).unwrap();
        DomainSpec::new("ball2", 2, rho, vec![c(0.0, 0.0); 2], "unit ball").unwrap()
    }

    fn mobius_family() -> MapFamily {
        MapFamily::new(
            "mobius",
            1,
            vec![Expr::parse("(z1 - a) / (1 - conj(a)*z1)", 1).unwrap()],
            vec![ParamSpec::new("a", ParamRange::UnitDisc)],
        )
        .unwrap()
        .with_multiplier(Expr::parse("(1 - abs2(a)) / abs2(1 - conj(a)*z1)", 1).unwrap())
        .with_denominator(Expr::parse("1 - conj(a)*z1", 1).unwrap())
    }

    #[test]
    fn mobius_identity_holds_to_rounding() {
        let dom = disc();
        let probe = LeviProbe::new(&dom);
        let fam = mobius_family();
        let sum = fam
            .verify_family_identity(&probe, &dom, 200, 11)
            .unwrap();
        assert_eq!(sum.used, 200);
        assert!(sum.max_residual < 1e-12, "residual {}", sum.max_residual);
        let sum = fam.verify_family_boundary(&probe, &dom, 100, 12).unwrap();
        assert!(sum.max_residual < 1e-12, "residual {}", sum.max_residual);
    }

    #[test]
    fn instantiation_folds_parameter_subtrees() {
        let fam = MapFamily::new(
            "scale",
            1,
            vec![Expr::parse("(1 - abs2(a))^(1/4, principal) * z1", 1).unwrap()],
            vec![ParamSpec::new("a", ParamRange::UnitDisc)],
        )
        .unwrap();
        let mut env = ParamEnv::new();
        env.insert("a".into(), c(0.6, 0.0));
        let map = fam.instantiate(&env).unwrap();
        assert!(map.components[0].is_holomorphic_syntax());
        let w = map.apply(&[c(1.0, 0.0)]).unwrap();
        assert!((w[0].re - 0.64f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn conjugation_over_z_is_rejected_up_front() {
        let err = MapFamily::new(
            "bad",
            1,
            vec![Expr::parse("conj(z1)", 1).unwrap()],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, MapError::ConjugateOverZ { op: "conj", .. }));
    }

    #[test]
    fn parameter_values_are_range_checked() {
        let fam = mobius_family();
        let mut env = ParamEnv::new();
        env.insert("a".into(), c(1.5, 0.0));
        assert!(matches!(
            fam.instantiate(&env).unwrap_err(),
            MapError::ParamOutOfRange { .. }
        ));
        let empty = ParamEnv::new();
        assert!(matches!(
            fam.instantiate(&empty).unwrap_err(),
            MapError::MissingParameter(_)
        ));
    }

    #[test]
    fn undeclared_parameters_are_rejected() {
        let err = MapFamily::new(
            "bad",
            1,
            vec![Expr::parse("b * z1", 1).unwrap()],
            vec![ParamSpec::new("a", ParamRange::UnitDisc)],
        )
        .unwrap_err();
        assert!(matches!(err, MapError::UndeclaredParameter { .. }));
    }

    #[test]
    fn linear_rotation_preserves_the_ball() {
        let dom = ball2();
        let probe = LeviProbe::new(&dom);
        let rot = HoloMap::linear(
            "rot",
            &[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
        );
        let sum = rot
            .verify_invariance_identity(&probe, &dom, 100, 3)
            .unwrap();
        assert!(sum.max_residual < 1e-15);
        let sum = rot.verify_boundary_preservation(&probe, &dom, 50, 4).unwrap();
        assert!(sum.max_residual < 1e-13);
    }

    #[test]
    fn torus_invariance_distinguishes_common_from_independent_phases() {
        let rho = Expr::parse("abs2(z1) + abs2(z2) + re(z1 * conj(z2)) - 1", 2).unwrap();
        let dom = DomainSpec::new("slanted", 2, rho, vec![c(0.0, 0.0); 2], "").unwrap();
        let probe = LeviProbe::new(&dom);

        let circle = TorusAction::circle(2);
        let sum = verify_torus_invariance(&circle, &probe, 100, 5).unwrap();
        assert!(sum.max_residual < 1e-14, "residual {}", sum.max_residual);

        let t2 = TorusAction::new(2, vec![vec![1, 0], vec![0, 1]]);
        let sum = verify_torus_invariance(&t2, &probe, 100, 5).unwrap();
        assert!(sum.max_residual > 0.1, "residual {}", sum.max_residual);
    }

    #[test]
    fn branch_crossings_are_detected_on_the_wrong_branch_only() {
        let dom = disc();
        let probe = LeviProbe::new(&dom);
        // base z1 - 2 has Re < 0 on the disc: the principal cut is crossed
        // whenever Im z1 changes sign, the poscut never is.
        let wrong = HoloMap {
            name: "sqrt-principal".into(),
            n: 1,
            components: vec![Expr::parse("(z1 - 2)^(1/2, principal)", 1).unwrap()],
            multiplier: None,
            denominator: None,
        };
        let bad = wrong.verify_branch_continuity(&probe, 32, 9).unwrap();
        assert!(bad.crossings > 0);
        assert!(bad.max_jump > 0.5, "jump {}", bad.max_jump);

        let right = HoloMap {
            name: "sqrt-poscut".into(),
            n: 1,
            components: vec![Expr::parse("(z1 - 2)^(1/2, poscut)", 1).unwrap()],
            multiplier: None,
            denominator: None,
        };
        let good = right.verify_branch_continuity(&probe, 32, 9).unwrap();
        assert_eq!(good.crossings, 0);
        assert_eq!(good.max_jump, 0.0);
    }

    #[test]
    fn summaries_are_bitwise_reproducible() {
        let dom = disc();
        let probe = LeviProbe::new(&dom);
        let fam = mobius_family();
        let a = fam.verify_family_identity(&probe, &dom, 64, 77).unwrap();
        let b = fam.verify_family_identity(&probe, &dom, 64, 77).unwrap();
        assert_eq!(a.max_residual.to_bits(), b.max_residual.to_bits());
        assert_eq!(a.worst_point, b.worst_point);
    }
}
