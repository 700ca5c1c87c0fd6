//! Built-in constructors for the domains, map families, and symmetry
//! generators the toolkit ships with, plus a small text format for loading
//! custom domains.
//!
//! Everything here is assembled from canonical expression strings and
//! validated on construction (real-valued defining functions, interior
//! anchors, holomorphic map components). Entries are addressable through
//! [`resolve`] with references like `builtin:thm1` or
//! `builtin:ellipsoid?alpha=1.5`; any other reference is treated as the path
//! of a TOML domain file.

use crate::expr::{DomainError, DomainSpec, EvalError, Expr, ParseError, WirtKind};
use crate::maps::{HoloMap, MapError, MapFamily, ParamRange, ParamSpec, TorusAction};
use num_complex::Complex64;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("this domain family needs dimension >= 3, got {0}")]
    BadDimension(usize),
    #[error("exponent alpha must be positive, got {0}")]
    BadAlpha(f64),
    #[error("fiber degree m must be >= 1")]
    BadDegree,
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
    #[error("the fiber polynomial may only mention z2")]
    FiberUsesBase,
    #[error("the fiber polynomial is not real-valued on the unit circle (Im = {imag:.3e})")]
    FiberNotReal { imag: f64 },
    #[error("the fiber polynomial is not homogeneous of degree {degree}: at radius {radius} the scaling defect is {defect:.3e}")]
    FiberNotHomogeneous {
        degree: i32,
        radius: f64,
        defect: f64,
    },
    #[error("the fiber profile is not positive away from the origin (min circle value {min:.3e})")]
    FiberNotPositive { min: f64 },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}` needs the query parameter `{key}` (e.g. `builtin:{name}?{key}=...`)")]
    MissingQuery { name: String, key: &'static str },
    #[error("bad value `{value}` for query parameter `{key}`: {reason}")]
    BadQuery {
        key: String,
        value: String,
        reason: String,
    },
    #[error("`{reference}` resolved to a {got}, but a {wanted} was required")]
    WrongPayload {
        reference: String,
        wanted: &'static str,
        got: &'static str,
    },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse `{path}` as a domain file: {source}")]
    Toml {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("in `{context}`: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn parse(src: &str, n: usize) -> Result<Expr, CatalogError> {
    Expr::parse(src, n).map_err(|source| CatalogError::Parse {
        context: src.to_string(),
        source,
    })
}

/// Constant expression (no variables), evaluated to a number.
fn parse_constant(src: &str) -> Result<Complex64, CatalogError> {
    Ok(parse(src, 0)?.eval(&[])?)
}

/// The bounded circular domain in `C^n` (n >= 3) cut out by
/// `sum_{j<=n-2} |z_j|^2 + |z_{n-1}|^4 + |z_n|^4
///  + (conj(z_{n-1}) z_n + conj(z_n) z_{n-1})^2 < 1`.
///
/// It is invariant under the two-parameter torus rotating the first `n-2`
/// coordinates together and the last two together, and under simultaneous
/// rotation of all coordinates, but not under independent rotation of the
/// last two.
pub fn theorem1_domain(n: usize) -> Result<DomainSpec, CatalogError> {
    if n < 3 {
        return Err(CatalogError::BadDimension(n));
    }
    let ball: Vec<String> = (1..=n - 2).map(|j| format!("abs2(z{j})")).collect();
    let a = n - 1;
    let b = n;
    let text = format!(
        "{} + abs2(z{a})^2 + abs2(z{b})^2 + (conj(z{a})*z{b} + conj(z{b})*z{a})^2 - 1",
        ball.join(" + ")
    );
    let rho = parse(&text, n)?;
    let name = if n == 3 {
        "thm1".to_string()
    } else {
        format!("thm1_n{n}")
    };
    Ok(DomainSpec::new(
        &name,
        n,
        rho,
        vec![Complex64::new(0.0, 0.0); n],
        "theorem 1: bounded pseudoconvex circular domain with noncompact automorphism group",
    )?)
}

/// The noncompact automorphism family of the theorem-1 domain: a Moebius map
/// in `z1` with a branch-coherent rescaling of the last two coordinates.
/// Parameter `a` ranges over the open unit disc.
pub fn theorem1_subgroup() -> Result<MapFamily, CatalogError> {
    let scale = "(1 - abs2(a))^(1/4, principal)/(1 - conj(a)*z1)^(1/2, principal)";
    let components = vec![
        parse("(z1 - a)/(1 - conj(a)*z1)", 3)?,
        parse(&format!("{scale}*z2"), 3)?,
        parse(&format!("{scale}*z3"), 3)?,
    ];
    let family = MapFamily::new(
        "thm1_subgroup",
        3,
        components,
        vec![ParamSpec::new("a", ParamRange::UnitDisc)],
    )?
    .with_multiplier(parse("(1 - abs2(a))/abs2(1 - conj(a)*z1)", 3)?)
    .with_denominator(parse("1 - conj(a)*z1", 3)?);
    Ok(family)
}

/// The bounded domain of theorem 2 in `C^2`: `|z1|^2 + |z2|^4
/// + 8 |z1-1|^2 s(z)^2 < 1` where `s` is the real rational expression below.
/// The boundary is real-analytic away from the single point `(1, 0)`, which
/// is recorded as exceptional.
pub fn theorem2_domain() -> Result<DomainSpec, CatalogError> {
    let s = "(z2^2/(z1 - 1) - (3/2)*abs2(z2)/abs(z1 - 1) + conj(z2)^2/(conj(z1) - 1))";
    let text = format!("abs2(z1) + abs2(z2)^2 + 8*abs2(z1 - 1)*{s}^2 - 1");
    let rho = parse(&text, 2)?;
    let spec = DomainSpec::new(
        "thm2",
        2,
        rho,
        vec![Complex64::new(0.0, 0.0); 2],
        "theorem 2: bounded non-pseudoconvex domain, smooth except at one boundary point",
    )?
    .with_exceptional(vec![vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]]);
    Ok(spec)
}

/// The third term of the theorem-2 defining function, `8 |z1-1|^2 s(z)^2`.
/// It is a real square, so it is nonnegative wherever it is defined; that
/// observation is the boundedness certificate for the domain
/// (`|z1|^2 + |z2|^4 < 1` on it).
pub fn theorem2_boundedness_term() -> Result<Expr, CatalogError> {
    let s = "(z2^2/(z1 - 1) - (3/2)*abs2(z2)/abs(z1 - 1) + conj(z2)^2/(conj(z1) - 1))";
    parse(&format!("8*abs2(z1 - 1)*{s}^2"), 2)
}

/// The real-parameter Moebius subgroup of the theorem-2 domain,
/// `a` in `(-1, 1)`.
pub fn theorem2_subgroup() -> Result<MapFamily, CatalogError> {
    let components = vec![
        parse("(z1 - a)/(1 - a*z1)", 2)?,
        parse(
            "(1 - a^2)^(1/4, principal)*z2/(1 - a*z1)^(1/2, principal)",
            2,
        )?,
    ];
    let family = MapFamily::new(
        "thm2_subgroup",
        2,
        components,
        vec![ParamSpec::new(
            "a",
            ParamRange::RealInterval { lo: -1.0, hi: 1.0 },
        )],
    )?
    .with_multiplier(parse("(1 - a^2)/abs2(1 - a*z1)", 2)?)
    .with_denominator(parse("1 - a*z1", 2)?);
    Ok(family)
}

/// The unbounded rigid model `Re z1 + (1/4)|z2|^4
/// + 2 (z2^2 - (3/2)|z2|^2 + conj(z2)^2)^2 < 0`, the image of the bounded
/// theorem-2 domain under [`cayley_transform`].
pub fn theorem2_unbounded() -> Result<DomainSpec, CatalogError> {
    let text = "re(z1) + (1/4)*abs2(z2)^2 + 2*(z2^2 - (3/2)*abs2(z2) + conj(z2)^2)^2";
    let rho = parse(text, 2)?;
    Ok(DomainSpec::new(
        "thm2_unbounded",
        2,
        rho,
        vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        "theorem 2: unbounded rigid model domain (image of the bounded domain)",
    )?)
}

/// The Cayley-type biholomorphism from the bounded theorem-2 domain onto its
/// rigid model: `z1 -> (z1+1)/(z1-1)`, `z2 -> sqrt(2) z2/(z1-1)^{1/2}`.
///
/// The square root uses the branch cut along the positive real axis: on the
/// bounded domain `Re(z1 - 1) < 0`, so the base never crosses that cut. The
/// attached multiplier records the exact transformation law
/// `rho_model(F(z)) = rho(z)/|z1 - 1|^2`.
pub fn cayley_transform() -> Result<HoloMap, CatalogError> {
    Ok(HoloMap {
        name: "cayley".to_string(),
        n: 2,
        components: vec![
            parse("(z1 + 1)/(z1 - 1)", 2)?,
            parse("2^(1/2, principal)*z2/(z1 - 1)^(1/2, poscut)", 2)?,
        ],
        multiplier: Some(parse("1/abs2(z1 - 1)", 2)?),
        denominator: Some(parse("z1 - 1", 2)?),
    })
}

/// A rigid domain `Re z1 + c |z2|^{2m} + Q(z2) < 0` from the generalized
/// family, together with the evidence gathered while validating it.
#[derive(Debug)]
pub struct RemarkFamily {
    pub domain: DomainSpec,
    /// Whether sampled fiber Levi values were somewhere negative — evidence
    /// that the defining function is not plurisubharmonic.
    pub nonpsh_evidence: bool,
    /// Minimum of `c + Q` over the sampled unit circle (the positivity
    /// certificate).
    pub min_circle_value: f64,
    /// Minimum sampled value of the fiber Laplacian-type coefficient.
    pub min_levi_value: f64,
}

const CIRCLE_SAMPLES: usize = 720;

/// Builds the rigid domain `{ Re z1 + c |z2|^{2m} + Q(z2) < 0 }`.
///
/// `Q` must mention only `z2`, be real-valued and homogeneous of degree `2m`
/// in `(z2, conj(z2))`, and keep the full fiber profile `c + Q` positive on
/// the unit circle; all three conditions are certified by deterministic
/// sampling. The returned flag records whether the fiber Levi coefficient is
/// somewhere negative.
pub fn remark_family(m: u32, q: Expr, c: f64) -> Result<RemarkFamily, CatalogError> {
    if m == 0 {
        return Err(CatalogError::BadDegree);
    }
    if c <= 0.0 {
        return Err(CatalogError::BadScale(c));
    }
    let degree = 2 * m as i32;
    let mut uses_base = false;
    q.fold_nodes((), &mut |(), e| {
        if matches!(e, Expr::Var(1)) {
            uses_base = true;
        }
    });
    if uses_base || q.max_var() > 2 {
        return Err(CatalogError::FiberUsesBase);
    }

    let zero = Complex64::new(0.0, 0.0);
    let at = |z2: Complex64| q.eval(&[zero, z2]);
    let mut min_profile = f64::INFINITY;
    for k in 0..CIRCLE_SAMPLES {
        let z2 = Complex64::from_polar(1.0, TAU * k as f64 / CIRCLE_SAMPLES as f64);
        let v = at(z2)?;
        if v.im.abs() > 1e-12 * (1.0 + v.norm()) {
            return Err(CatalogError::FiberNotReal { imag: v.im.abs() });
        }
        for radius in [0.5f64, 1.7] {
            let scaled = at(z2 * radius)?;
            let expected = v * radius.powi(degree);
            let defect = (scaled - expected).norm();
            if defect > 1e-9 * (1.0 + expected.norm()) {
                return Err(CatalogError::FiberNotHomogeneous {
                    degree,
                    radius,
                    defect,
                });
            }
        }
        min_profile = min_profile.min(c + v.re);
    }
    if min_profile <= 0.0 {
        return Err(CatalogError::FiberNotPositive { min: min_profile });
    }

    let profile = Expr::add(
        Expr::mul(Expr::lit(c), Expr::int_pow(Expr::abs2_of(Expr::var(2)), degree / 2)),
        q.clone(),
    );
    let fiber_levi = profile
        .wirtinger(2, WirtKind::Holo)
        .wirtinger(2, WirtKind::Anti);
    let mut min_levi = f64::INFINITY;
    for k in 0..CIRCLE_SAMPLES {
        for radius in [0.7f64, 1.0, 1.3] {
            let z2 = Complex64::from_polar(radius, TAU * k as f64 / CIRCLE_SAMPLES as f64);
            if let Ok(v) = fiber_levi.eval(&[zero, z2]) {
                min_levi = min_levi.min(v.re);
            }
        }
    }

    let rho = Expr::add(Expr::re_of(Expr::var(1)), profile);
    let domain = DomainSpec::new(
        &format!("remark5_m{m}"),
        2,
        rho,
        vec![Complex64::new(-1.0, 0.0), zero],
        "generalized rigid family: prescribed homogeneous fiber profile over a half-plane",
    )?;
    Ok(RemarkFamily {
        domain,
        nonpsh_evidence: min_levi < -1e-9,
        min_circle_value: min_profile,
        min_levi_value: min_levi,
    })
}

/// The generalized unbounding transform `z1 -> (z1+1)/(z1-1)`,
/// `z2 -> scale * z2 / (z1-1)^{1/m}` with the positive-axis branch cut.
/// The scale is a free choice; no exact multiplier is attached, so image
/// behavior is checked numerically per instance.
pub fn remark_transform(m: u32, scale: f64) -> Result<HoloMap, CatalogError> {
    if m == 0 {
        return Err(CatalogError::BadDegree);
    }
    if scale <= 0.0 {
        return Err(CatalogError::BadScale(scale));
    }
    Ok(HoloMap {
        name: format!("remark5_transform_m{m}"),
        n: 2,
        components: vec![
            parse("(z1 + 1)/(z1 - 1)", 2)?,
            parse(&format!("{scale:?}*z2/(z1 - 1)^(1/{m}, poscut)"), 2)?,
        ],
        multiplier: None,
        denominator: Some(parse("z1 - 1", 2)?),
    })
}

/// The complex ellipsoid `{ |z1|^2 + |z2|^{2 alpha} < 1 }` in `C^2`. The
/// `z2` exponent is a real power of the nonnegative real `|z2|^2`, so no
/// branch choice is involved.
pub fn ellipsoid(alpha: f64) -> Result<DomainSpec, CatalogError> {
    if alpha <= 0.0 {
        return Err(CatalogError::BadAlpha(alpha));
    }
    let rho = Expr::sub(
        Expr::add(
            Expr::abs2_of(Expr::var(1)),
            Expr::real_pow(Expr::abs2_of(Expr::var(2)), alpha),
        ),
        Expr::lit(1.0),
    );
    Ok(DomainSpec::new(
        &format!("ellipsoid_alpha_{alpha}"),
        2,
        rho,
        vec![Complex64::new(0.0, 0.0); 2],
        "complex ellipsoid model family in C^2",
    )?)
}

/// The finite linear symmetries of the theorem-1 domain (swapping the last
/// two coordinates; negating the last) together with its invariance torus
/// (common rotation of the first block, common rotation of the last two).
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub discrete: Vec<HoloMap>,
    pub torus: TorusAction,
}

pub fn theorem1_linear_generators() -> GeneratorSet {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let swap = HoloMap::linear(
        "swap_z2_z3",
        &[
            vec![one, zero, zero],
            vec![zero, zero, one],
            vec![zero, one, zero],
        ],
    );
    let negate = HoloMap::linear(
        "negate_z3",
        &[
            vec![one, zero, zero],
            vec![zero, one, zero],
            vec![zero, zero, -one],
        ],
    );
    GeneratorSet {
        discrete: vec![swap, negate],
        torus: TorusAction::new(3, vec![vec![1, 0, 0], vec![0, 1, 1]]),
    }
}

/// What a catalog reference resolved to.
#[derive(Debug)]
pub enum CatalogPayload {
    Domain(DomainSpec),
    Map(HoloMap),
    Family(MapFamily),
    Action(TorusAction),
    Generators(GeneratorSet),
}

impl CatalogPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogPayload::Domain(_) => "domain",
            CatalogPayload::Map(_) => "map",
            CatalogPayload::Family(_) => "map",
            CatalogPayload::Action(_) => "action",
            CatalogPayload::Generators(_) => "generator-set",
        }
    }
}

#[derive(Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: &'static str,
    pub provenance: String,
    pub payload: CatalogPayload,
}

impl CatalogEntry {
    fn from_domain(d: DomainSpec) -> CatalogEntry {
        CatalogEntry {
            name: d.name.clone(),
            kind: "domain",
            provenance: d.provenance.clone(),
            payload: CatalogPayload::Domain(d),
        }
    }
}

fn parse_query(query: &str) -> BTreeMap<String, String> {
    query
        .split('&')
        .filter(|kv| !kv.is_empty())
        .map(|kv| match kv.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => (kv.to_string(), String::new()),
        })
        .collect()
}

fn query_f64(
    query: &BTreeMap<String, String>,
    name: &str,
    key: &'static str,
) -> Result<f64, CatalogError> {
    let raw = query.get(key).ok_or_else(|| CatalogError::MissingQuery {
        name: name.to_string(),
        key,
    })?;
    raw.parse().map_err(|e: std::num::ParseFloatError| {
        CatalogError::BadQuery {
            key: key.to_string(),
            value: raw.clone(),
            reason: e.to_string(),
        }
    })
}

fn query_u32(
    query: &BTreeMap<String, String>,
    name: &str,
    key: &'static str,
) -> Result<u32, CatalogError> {
    let raw = query.get(key).ok_or_else(|| CatalogError::MissingQuery {
        name: name.to_string(),
        key,
    })?;
    raw.parse().map_err(|e: std::num::ParseIntError| {
        CatalogError::BadQuery {
            key: key.to_string(),
            value: raw.clone(),
            reason: e.to_string(),
        }
    })
}

/// The quartic fiber polynomial of the theorem-2 model, the worked example
/// of the generalized family.
fn model_fiber_polynomial() -> Result<Expr, CatalogError> {
    parse("2*(z2^2 - (3/2)*abs2(z2) + conj(z2)^2)^2", 2)
}

fn builtin(name: &str, query: &BTreeMap<String, String>) -> Result<CatalogEntry, CatalogError> {
    match name {
        "thm1" => Ok(CatalogEntry::from_domain(theorem1_domain(3)?)),
        "thm2" => Ok(CatalogEntry::from_domain(theorem2_domain()?)),
        "thm2_unbounded" => Ok(CatalogEntry::from_domain(theorem2_unbounded()?)),
        "ellipsoid" => {
            let alpha = query_f64(query, name, "alpha")?;
            Ok(CatalogEntry::from_domain(ellipsoid(alpha)?))
        }
        "remark5" => {
            let m = query_u32(query, name, "m")?;
            // m = 2 is the worked model with its quartic fiber polynomial;
            // other degrees default to the plurisubharmonic profile Q = 0.
            let family = if m == 2 {
                remark_family(2, model_fiber_polynomial()?, 0.25)?
            } else {
                remark_family(m, Expr::lit(0.0), 1.0)?
            };
            Ok(CatalogEntry::from_domain(family.domain))
        }
        "thm1_subgroup" => {
            let family = theorem1_subgroup()?;
            Ok(CatalogEntry {
                name: family.name.clone(),
                kind: "map",
                provenance:
                    "theorem 1: noncompact Moebius family with branch-coherent rescaling"
                        .to_string(),
                payload: CatalogPayload::Family(family),
            })
        }
        "thm2_subgroup" => {
            let family = theorem2_subgroup()?;
            Ok(CatalogEntry {
                name: family.name.clone(),
                kind: "map",
                provenance: "theorem 2: real-parameter Moebius subgroup".to_string(),
                payload: CatalogPayload::Family(family),
            })
        }
        "cayley" => {
            let map = cayley_transform()?;
            Ok(CatalogEntry {
                name: map.name.clone(),
                kind: "map",
                provenance: "theorem 2: unbounding biholomorphism onto the rigid model"
                    .to_string(),
                payload: CatalogPayload::Map(map),
            })
        }
        "thm1_generators" => Ok(CatalogEntry {
            name: "thm1_generators".to_string(),
            kind: "generator-set",
            provenance: "theorem 1: finite linear symmetries and invariance torus".to_string(),
            payload: CatalogPayload::Generators(theorem1_linear_generators()),
        }),
        other => {
            if let Some(rest) = other.strip_prefix("thm1_n") {
                if let Ok(n) = rest.parse::<usize>() {
                    return Ok(CatalogEntry::from_domain(theorem1_domain(n)?));
                }
            }
            Err(CatalogError::UnknownBuiltin(other.to_string()))
        }
    }
}

/// Shape of a custom domain file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    name: String,
    dimension: usize,
    /// Defining function in the expression grammar.
    rho: String,
    /// Anchor coordinates, each a constant expression like `"0"` or
    /// `"1/2 + 3*i"`.
    anchor: Vec<String>,
    /// Optional exceptional boundary points, same component format.
    #[serde(default)]
    exceptional: Vec<Vec<String>>,
    #[serde(default)]
    provenance: Option<String>,
}

/// Loads a domain from the TOML text format.
pub fn load_domain_file(path: &str) -> Result<DomainSpec, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.to_string(),
        source,
    })?;
    let file: DomainFile = toml::from_str(&text).map_err(|source| CatalogError::Toml {
        path: path.to_string(),
        source: Box::new(source),
    })?;
    let rho = parse(&file.rho, file.dimension)?;
    let anchor = file
        .anchor
        .iter()
        .map(|s| parse_constant(s))
        .collect::<Result<Vec<_>, _>>()?;
    let provenance = file
        .provenance
        .unwrap_or_else(|| format!("file:{path}"));
    let mut spec = DomainSpec::new(&file.name, file.dimension, rho, anchor, &provenance)?;
    if !file.exceptional.is_empty() {
        let pts = file
            .exceptional
            .iter()
            .map(|p| p.iter().map(|s| parse_constant(s)).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        spec = spec.with_exceptional(pts);
    }
    Ok(spec)
}

/// Resolves a reference: `builtin:<name>[?key=value]` for shipped entries,
/// anything else as a path to a TOML domain file.
pub fn resolve(reference: &str) -> Result<CatalogEntry, CatalogError> {
    if let Some(rest) = reference.strip_prefix("builtin:") {
        let (name, query) = match rest.split_once('?') {
            Some((n, q)) => (n, parse_query(q)),
            None => (rest, BTreeMap::new()),
        };
        return builtin(name, &query);
    }
    Ok(CatalogEntry::from_domain(load_domain_file(reference)?))
}

/// Resolves a reference that must name a domain.
pub fn resolve_domain(reference: &str) -> Result<DomainSpec, CatalogError> {
    let entry = resolve(reference)?;
    match entry.payload {
        CatalogPayload::Domain(d) => Ok(d),
        other => Err(CatalogError::WrongPayload {
            reference: reference.to_string(),
            wanted: "domain",
            got: other.kind(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ParamEnv;
    use crate::levi::LeviProbe;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quartic_domain_hits_its_landmark_values() {
        let d = theorem1_domain(3).unwrap();
        assert_eq!(d.eval_rho(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), -1.0);
        assert_eq!(d.eval_rho(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
        assert_eq!(d.eval_rho(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
        // 2t^4 + (2t^2)^2 = 6t^4 = 1 on the diagonal ray.
        let t = 6.0f64.powf(-0.25);
        let r = d.eval_rho(&[c(0.0, 0.0), c(t, 0.0), c(t, 0.0)]).unwrap();
        assert!(r.abs() < 1e-15, "rho = {r}");

        let d4 = theorem1_domain(4).unwrap();
        assert_eq!(
            d4.eval_rho(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                .unwrap(),
            0.0
        );
        assert!(matches!(theorem1_domain(2), Err(CatalogError::BadDimension(2))));
    }

    #[test]
    fn quartic_subgroup_degenerates_to_the_identity_at_zero() {
        let fam = theorem1_subgroup().unwrap();
        let mut env = ParamEnv::new();
        env.insert("a".into(), c(0.0, 0.0));
        let map = fam.instantiate(&env).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.5)];
        let w = map.apply(&z).unwrap();
        for (a, b) in z.iter().zip(&w) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn quartic_subgroup_sends_the_parameter_to_the_origin() {
        let fam = theorem1_subgroup().unwrap();
        let a = c(0.3, 0.2);
        let mut env = ParamEnv::new();
        env.insert("a".into(), a);
        let map = fam.instantiate(&env).unwrap();
        let w = map.apply(&[a, c(0.1, 0.0), c(0.0, 0.2)]).unwrap();
        assert!(w[0].norm() < 1e-15);
    }

    #[test]
    fn quartic_subgroup_satisfies_the_exact_multiplier_identity() {
        let domain = theorem1_domain(3).unwrap();
        let probe = LeviProbe::new(&domain);
        let fam = theorem1_subgroup().unwrap();
        let summary = fam
            .verify_family_identity(&probe, &domain, 300, 7)
            .unwrap();
        assert!(
            summary.max_residual < 1e-12,
            "residual {}",
            summary.max_residual
        );
    }

    #[test]
    fn quartic_subgroup_composes_to_the_identity_with_opposite_parameters() {
        let fam = theorem1_subgroup().unwrap();
        let a = c(0.41, -0.27);
        let mut env = ParamEnv::new();
        env.insert("a".into(), a);
        let forward = fam.instantiate(&env).unwrap();
        env.insert("a".into(), -a);
        let backward = fam.instantiate(&env).unwrap();
        for z in [
            [c(0.1, 0.2), c(0.3, -0.1), c(-0.2, 0.05)],
            [c(-0.4, 0.1), c(0.0, 0.45), c(0.3, 0.3)],
        ] {
            let w = backward.apply(&forward.apply(&z).unwrap()).unwrap();
            for (zi, wi) in z.iter().zip(&w) {
                assert!((zi - wi).norm() < 1e-14, "moved {zi} -> {wi}");
            }
        }
    }

    #[test]
    fn bounded_theorem2_domain_and_its_subgroup_agree() {
        let domain = theorem2_domain().unwrap();
        assert_eq!(domain.eval_rho(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), -1.0);
        assert_eq!(domain.exceptional.len(), 1);

        let probe = LeviProbe::new(&domain);
        let fam = theorem2_subgroup().unwrap();
        let summary = fam
            .verify_family_identity(&probe, &domain, 300, 11)
            .unwrap();
        assert!(
            summary.max_residual < 1e-12,
            "residual {}",
            summary.max_residual
        );
    }

    #[test]
    fn rigid_model_vanishes_at_the_distinguished_corner_point() {
        let d = theorem2_unbounded().unwrap();
        let r = d.eval_rho(&[c(-0.75, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(r.abs() < 1e-15, "rho = {r}");
        assert_eq!(d.eval_rho(&[c(-1.0, 0.0), c(0.0, 0.0)]).unwrap(), -1.0);
    }

    #[test]
    fn cayley_transform_carries_the_bounded_domain_onto_the_model() {
        let map = cayley_transform().unwrap();
        let w = map.apply(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((w[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(w[1].norm() < 1e-15);

        let source = theorem2_domain().unwrap();
        let target = theorem2_unbounded().unwrap();
        let probe = LeviProbe::new(&source);
        let identity = map
            .verify_invariance_identity(&probe, &target, 300, 3)
            .unwrap();
        assert!(
            identity.max_residual < 1e-12,
            "identity residual {}",
            identity.max_residual
        );
        let boundary = map
            .verify_boundary_preservation(&probe, &target, 100, 3)
            .unwrap();
        assert!(
            boundary.max_residual < 1e-9,
            "boundary residual {}",
            boundary.max_residual
        );
        let continuity = map.verify_branch_continuity(&probe, 40, 3).unwrap();
        assert_eq!(continuity.crossings, 0);
        assert_eq!(continuity.max_jump, 0.0);
    }

    #[test]
    fn generalized_family_reproduces_the_model_at_degree_two() {
        let family = remark_family(2, model_fiber_polynomial().unwrap(), 0.25).unwrap();
        assert!(family.nonpsh_evidence);
        assert!(family.min_circle_value > 0.0);
        let model = theorem2_unbounded().unwrap();
        for z in [
            [c(-0.75, 0.0), c(1.0, 0.0)],
            [c(0.3, -1.2), c(0.4, 0.9)],
            [c(-2.0, 0.5), c(-1.1, 0.7)],
        ] {
            let a = family.domain.eval_rho(&z).unwrap();
            let b = model.eval_rho(&z).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn generalized_family_validation_rejects_bad_fiber_polynomials() {
        // Siegel-type profile: plurisubharmonic, no negative Levi values.
        let siegel = remark_family(1, Expr::lit(0.0), 1.0).unwrap();
        assert!(!siegel.nonpsh_evidence);
        assert!(siegel.min_levi_value >= -1e-12);

        // Q = -|z2|^4 cancels the profile: positivity fails.
        let neg = Expr::sub(Expr::lit(0.0), Expr::int_pow(Expr::abs2_of(Expr::var(2)), 2));
        assert!(matches!(
            remark_family(2, neg, 1.0),
            Err(CatalogError::FiberNotPositive { .. })
        ));

        // Not real-valued.
        assert!(matches!(
            remark_family(2, Expr::int_pow(Expr::var(2), 4), 1.0),
            Err(CatalogError::FiberNotReal { .. })
        ));

        // Wrong homogeneity degree.
        assert!(matches!(
            remark_family(2, Expr::abs2_of(Expr::var(2)), 1.0),
            Err(CatalogError::FiberNotHomogeneous { .. })
        ));

        // Mentions the base variable.
        assert!(matches!(
            remark_family(2, Expr::abs2_of(Expr::var(1)), 1.0),
            Err(CatalogError::FiberUsesBase)
        ));
    }

    #[test]
    fn generalized_transform_specializes_to_the_cayley_map() {
        let generic = remark_transform(2, 2.0f64.sqrt()).unwrap();
        let cayley = cayley_transform().unwrap();
        for z in [[c(0.2, 0.3), c(0.1, -0.4)], [c(-0.5, 0.0), c(0.3, 0.3)]] {
            let a = generic.apply(&z).unwrap();
            let b = cayley.apply(&z).unwrap();
            assert!((a[0] - b[0]).norm() < 1e-15);
            assert!((a[1] - b[1]).norm() < 1e-15);
        }
        assert!(matches!(remark_transform(0, 1.0), Err(CatalogError::BadDegree)));
    }

    #[test]
    fn ellipsoids_interpolate_the_ball() {
        let ball = ellipsoid(1.0).unwrap();
        let r = ball.eval_rho(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!(r.abs() < 1e-15);
        for alpha in [0.5, 1.0, 2.0, 3.7] {
            let d = ellipsoid(alpha).unwrap();
            let r = d.eval_rho(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
            assert!(r.abs() < 1e-15, "alpha {alpha}: rho = {r}");
        }
        // alpha = 2: |z2|^4 at 2^{-1/4} is 1/2.
        let d = ellipsoid(2.0).unwrap();
        let r = d
            .eval_rho(&[c(0.0, 0.0), c(2.0f64.powf(-0.25), 0.0)])
            .unwrap();
        assert!((r + 0.5).abs() < 1e-15, "rho = {r}");
        assert!(matches!(ellipsoid(0.0), Err(CatalogError::BadAlpha(_))));
    }

    #[test]
    fn linear_generators_are_involutions_preserving_the_domain() {
        let gens = theorem1_linear_generators();
        let z = [c(0.2, 0.1), c(0.3, -0.2), c(-0.1, 0.4)];
        for map in &gens.discrete {
            let twice = map.apply(&map.apply(&z).unwrap()).unwrap();
            for (a, b) in z.iter().zip(&twice) {
                assert!((a - b).norm() < 1e-15, "{} is not an involution", map.name);
            }
        }
        let domain = theorem1_domain(3).unwrap();
        let probe = LeviProbe::new(&domain);
        for map in &gens.discrete {
            let summary = map
                .verify_invariance_identity(&probe, &domain, 200, 5)
                .unwrap();
            assert!(
                summary.max_residual < 1e-13,
                "{}: residual {}",
                map.name,
                summary.max_residual
            );
        }
        assert_eq!(gens.torus.dim(), 2);
        assert_eq!(gens.torus.weights, vec![vec![1, 0, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn references_resolve_to_validated_entries() {
        assert_eq!(resolve_domain("builtin:thm1").unwrap().n, 3);
        assert_eq!(resolve_domain("builtin:thm1_n5").unwrap().n, 5);
        assert_eq!(resolve_domain("builtin:thm2").unwrap().name, "thm2");
        assert_eq!(
            resolve_domain("builtin:thm2_unbounded").unwrap().name,
            "thm2_unbounded"
        );
        assert!(resolve_domain("builtin:ellipsoid?alpha=1.5").is_ok());
        assert!(resolve_domain("builtin:remark5?m=2").is_ok());
        assert!(resolve_domain("builtin:remark5?m=1").is_ok());

        assert!(matches!(
            resolve("builtin:ellipsoid"),
            Err(CatalogError::MissingQuery { key: "alpha", .. })
        ));
        assert!(matches!(
            resolve("builtin:ellipsoid?alpha=banana"),
            Err(CatalogError::BadQuery { .. })
        ));
        assert!(matches!(
            resolve("builtin:nonsense"),
            Err(CatalogError::UnknownBuiltin(_))
        ));
        assert!(matches!(
            resolve_domain("builtin:cayley"),
            Err(CatalogError::WrongPayload { wanted: "domain", .. })
        ));
        assert_eq!(resolve("builtin:thm1_generators").unwrap().kind, "generator-set");
    }

    #[test]
    fn custom_domains_load_from_the_text_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ball.toml");
        std::fs::write(
            &path,
            r#"
name = "unit-ball"
dimension = 2
rho = "abs2(z1) + abs2(z2) - 1"
anchor = ["0", "0"]
exceptional = [["1", "0"]]
"#,
        )
        .unwrap();
        let spec = resolve_domain(path.to_str().unwrap()).unwrap();
        assert_eq!(spec.name, "unit-ball");
        assert_eq!(spec.n, 2);
        assert_eq!(spec.eval_rho(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap(), 0.0);
        assert_eq!(spec.exceptional.len(), 1);

        std::fs::write(&path, "name = 3").unwrap();
        assert!(matches!(
            resolve(path.to_str().unwrap()),
            Err(CatalogError::Toml { .. })
        ));
        assert!(matches!(
            resolve("/definitely/not/a/file.toml"),
            Err(CatalogError::Io { .. })
        ));
    }
}
