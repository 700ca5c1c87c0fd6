//! Normalized Reinhardt forms: the automorphism-dimension count, exhaustive
//! enumeration of achievable dimensions, and the quantitative Cauchy-type
//! derivative bound on the model domain.
//!
//! A [`NormalForm`] splits the coordinates of `C^n` into blocks of three
//! roles: ball blocks (`i <= s`), affine blocks (`s < j <= t`), and rotation
//! blocks (`t < k <= p`). The identity component of the automorphism group
//! acts ball-automorphically on the first kind, by unitary-affine maps on
//! the second, and by unitaries on the third, giving the real dimension
//! `sum(n_i^2 + 2 n_i) + sum(n_j^2 + 2 n_j) + sum(n_k^2)`. Rotation blocks
//! live in a product of discs and annuli after rescaling by
//! `(1 - |z^i|^2)^alpha` and `exp(-beta |z^j|^2)` factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReinhardtError {
    #[error("block sizes {sizes:?} do not partition n = {n}")]
    BadPartition { n: usize, sizes: Vec<usize> },
    #[error("role indices must satisfy 0 <= s <= t <= p (= number of blocks); got s={s}, t={t}, p={p}")]
    BadRoles { s: usize, t: usize, p: usize },
    #[error("exponent table `{which}` must be {rows} x {cols}, got {got_rows} x {got_cols}")]
    BadExponents {
        which: &'static str,
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("need one base block per rotation block ({expected}), got {got}")]
    BadBaseBlocks { expected: usize, got: usize },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("enumeration is guarded to 1 <= n <= 8, got {0}")]
    GuardRange(usize),
    #[error("|mu| must be < 1, got {0}")]
    MuOutOfRange(f64),
    #[error("|rho| = {rho} exceeds R/2 = {half_r}")]
    RhoTooLarge { rho: f64, half_r: f64 },
    #[error("|rho| = {rho} is not below R_mu = {r_mu}; the bound has a pole there")]
    RhoBeyondPole { rho: f64, r_mu: f64 },
    #[error("point has {got} components but the form lives in C^{expected}")]
    WrongDimension { expected: usize, got: usize },
}

/// One factor of the base domain a rotation block is scaled into: a disc or
/// an annulus in the block modulus (inner radius 0 gives a punctured disc).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaseBlock {
    Disc { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl BaseBlock {
    fn contains(&self, modulus: f64) -> bool {
        match self {
            BaseBlock::Disc { radius } => modulus < *radius,
            BaseBlock::Annulus { inner, outer } => *inner < modulus && modulus < *outer,
        }
    }

    fn validate(&self) -> Result<(), ReinhardtError> {
        match self {
            BaseBlock::Disc { radius } => {
                if *radius <= 0.0 {
                    return Err(ReinhardtError::NonPositive {
                        what: "disc radius",
                        value: *radius,
                    });
                }
            }
            BaseBlock::Annulus { inner, outer } => {
                if *outer <= 0.0 || *outer <= *inner || *inner < 0.0 {
                    return Err(ReinhardtError::NonPositive {
                        what: "annulus width",
                        value: outer - inner,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A normalized Reinhardt form: block sizes, role split `(s, t, p)`,
/// rescaling exponents, and base blocks for the rotation part.
#[derive(Debug, Clone, Serialize)]
pub struct NormalForm {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub sizes: Vec<usize>,
    /// `alpha[i][k]`: exponent of `(1 - |z^i|^2)` on rotation block `k`
    /// (`i < s`, `k < p - t`).
    pub alpha: Vec<Vec<f64>>,
    /// `beta[j][k]`: coefficient of `|z^j|^2` in the exponential factor on
    /// rotation block `k` (`j < t - s`, `k < p - t`).
    pub beta: Vec<Vec<f64>>,
    /// One factor per rotation block.
    pub base: Vec<BaseBlock>,
}

impl NormalForm {
    pub fn new(
        s: usize,
        t: usize,
        sizes: Vec<usize>,
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
        base: Vec<BaseBlock>,
    ) -> Result<NormalForm, ReinhardtError> {
        let p = sizes.len();
        let n: usize = sizes.iter().sum();
        if sizes.is_empty() || sizes.iter().any(|&k| k == 0) {
            return Err(ReinhardtError::BadPartition { n, sizes });
        }
        if !(s <= t && t <= p) {
            return Err(ReinhardtError::BadRoles { s, t, p });
        }
        let k = p - t;
        if alpha.len() != s || alpha.iter().any(|row| row.len() != k) {
            return Err(ReinhardtError::BadExponents {
                which: "alpha",
                rows: s,
                cols: k,
                got_rows: alpha.len(),
                got_cols: alpha.first().map_or(k, Vec::len),
            });
        }
        if beta.len() != t - s || beta.iter().any(|row| row.len() != k) {
            return Err(ReinhardtError::BadExponents {
                which: "beta",
                rows: t - s,
                cols: k,
                got_rows: beta.len(),
                got_cols: beta.first().map_or(k, Vec::len),
            });
        }
        if base.len() != k {
            return Err(ReinhardtError::BadBaseBlocks {
                expected: k,
                got: base.len(),
            });
        }
        for b in &base {
            b.validate()?;
        }
        Ok(NormalForm {
            n,
            s,
            t,
            sizes,
            alpha,
            beta,
            base,
        })
    }

    /// Form with all exponents zero and unit-disc base blocks; enough for
    /// dimension counting, where exponents never matter.
    pub fn with_zero_exponents(
        s: usize,
        t: usize,
        sizes: Vec<usize>,
    ) -> Result<NormalForm, ReinhardtError> {
        let p = sizes.len();
        let k = p.saturating_sub(t);
        NormalForm::new(
            s,
            t,
            sizes,
            vec![vec![0.0; k]; s],
            vec![vec![0.0; k]; t.saturating_sub(s)],
            vec![BaseBlock::Disc { radius: 1.0 }; k],
        )
    }

    pub fn p(&self) -> usize {
        self.sizes.len()
    }

    /// Real dimension of the identity component of the automorphism group:
    /// `n^2 + 2n` per ball and affine block, `n^2` per rotation block.
    pub fn dim_aut0(&self) -> usize {
        self.sizes
            .iter()
            .enumerate()
            .map(|(idx, &nb)| {
                if idx < self.t {
                    nb * nb + 2 * nb
                } else {
                    nb * nb
                }
            })
            .sum()
    }

    fn block_range(&self, idx: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..idx].iter().sum();
        start..start + self.sizes[idx]
    }

    /// Membership test: ball blocks inside the unit sphere, affine blocks
    /// free, rotation blocks inside their base factor after rescaling by the
    /// `(1 - |z^i|^2)^alpha` and `exp(-beta |z^j|^2)` factors.
    pub fn contains(&self, z: &[Complex64]) -> Result<bool, ReinhardtError> {
        if z.len() != self.n {
            return Err(ReinhardtError::WrongDimension {
                expected: self.n,
                got: z.len(),
            });
        }
        let block_norm_sqr = |idx: usize| -> f64 {
            z[self.block_range(idx)].iter().map(|c| c.norm_sqr()).sum()
        };
        for i in 0..self.s {
            if block_norm_sqr(i) >= 1.0 {
                return Ok(false);
            }
        }
        for (k, block) in self.base.iter().enumerate() {
            let mut scale = 1.0f64;
            for i in 0..self.s {
                scale *= (1.0 - block_norm_sqr(i)).powf(self.alpha[i][k]);
            }
            for j in self.s..self.t {
                scale *= (-self.beta[j - self.s][k] * block_norm_sqr(j)).exp();
            }
            let modulus = block_norm_sqr(self.t + k).sqrt() * scale;
            if !block.contains(modulus) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The model domain `{ |z1| < 1, |z2| < R / (1 - |z1|^2)^gamma }` used for
/// the quantitative derivative bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaADomain {
    pub r: f64,
    pub gamma: f64,
}

impl LemmaADomain {
    pub fn new(r: f64, gamma: f64) -> Result<LemmaADomain, ReinhardtError> {
        if r <= 0.0 {
            return Err(ReinhardtError::NonPositive {
                what: "radius R",
                value: r,
            });
        }
        if gamma <= 0.0 {
            return Err(ReinhardtError::NonPositive {
                what: "exponent gamma",
                value: gamma,
            });
        }
        Ok(LemmaADomain { r, gamma })
    }

    pub fn contains(&self, z: &[Complex64]) -> Result<bool, ReinhardtError> {
        if z.len() != 2 {
            return Err(ReinhardtError::WrongDimension {
                expected: 2,
                got: z.len(),
            });
        }
        let m1 = z[0].norm();
        if m1 >= 1.0 {
            return Ok(false);
        }
        Ok(z[1].norm() < self.r / (1.0 - m1 * m1).powf(self.gamma))
    }

    /// Safe radius around `z2 = 0` on the fiber over `mu`:
    /// `R_mu = R / (2 (1 - |mu|^2)^gamma)`.
    pub fn safe_radius(&self, mu: Complex64) -> Result<f64, ReinhardtError> {
        let m = mu.norm();
        if m >= 1.0 {
            return Err(ReinhardtError::MuOutOfRange(m));
        }
        Ok(self.r / (2.0 * (1.0 - m * m).powf(self.gamma)))
    }

    /// Cauchy-estimate bound `M * R_mu / (R_mu - |rho|)^2` for the
    /// `z2`-derivative of a function bounded by `M`, at the point
    /// `(mu, rho)` with `|rho| <= R/2`.
    ///
    /// Because `R_mu` grows without bound as `|mu| -> 1`, the bound decays
    /// to zero along any fixed `rho`; errors at the pole `|rho| >= R_mu`.
    pub fn derivative_bound(
        &self,
        m: f64,
        mu: Complex64,
        rho: Complex64,
    ) -> Result<f64, ReinhardtError> {
        if m <= 0.0 {
            return Err(ReinhardtError::NonPositive {
                what: "sup bound M",
                value: m,
            });
        }
        let rho_abs = rho.norm();
        if rho_abs > self.r / 2.0 {
            return Err(ReinhardtError::RhoTooLarge {
                rho: rho_abs,
                half_r: self.r / 2.0,
            });
        }
        let r_mu = self.safe_radius(mu)?;
        if rho_abs >= r_mu {
            return Err(ReinhardtError::RhoBeyondPole {
                rho: rho_abs,
                r_mu,
            });
        }
        Ok(m * r_mu / ((r_mu - rho_abs) * (r_mu - rho_abs)))
    }
}

/// Reason a block structure is dropped when the hyperbolicity exclusions are
/// applied.
pub const EXCLUSION_NON_HYPERBOLIC: &str =
    "non-hyperbolic: affine blocks present (s < t) with no rotation block (p = t)";

/// Reason a pure-rotation structure is dropped: with no ball or affine block
/// there is no exponent available to realize an unbounded rescaled fiber, and
/// the identity component is compact-type.
pub const EXCLUSION_ROTATION_ONLY: &str =
    "rotation-only: no ball or affine block to carry an unbounded (negative-exponent) rescaling";

/// One block structure achieving some dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub s: usize,
    pub t: usize,
    pub p: usize,
    pub sizes: Vec<usize>,
    /// Set when the structure is ruled out by the hyperbolicity exclusions.
    pub excluded: Option<String>,
}

impl Witness {
    fn dedup_key(&self) -> Vec<(u8, usize)> {
        let mut key: Vec<(u8, usize)> = self
            .sizes
            .iter()
            .enumerate()
            .map(|(idx, &nb)| {
                let role = if idx < self.s {
                    0u8
                } else if idx < self.t {
                    1
                } else {
                    2
                };
                (role, nb)
            })
            .collect();
        key.sort_unstable();
        key
    }

    fn describe(&self) -> String {
        format!(
            "(s={}, t={}, p={}, sizes={:?})",
            self.s, self.t, self.p, self.sizes
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimRow {
    pub dim: usize,
    pub witnesses: Vec<Witness>,
}

/// Achievable automorphism dimensions in a fixed ambient dimension, with one
/// witness per distinct role/size multiset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimTable {
    pub n: usize,
    /// Whether excluded structures were dropped rather than flagged.
    pub exclusions_applied: bool,
    pub rows: Vec<DimRow>,
}

impl DimTable {
    pub fn achievable(&self) -> BTreeSet<usize> {
        self.rows.iter().map(|r| r.dim).collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Achievable dim Aut0 for Reinhardt forms in C^{} ({}):\n\n",
            self.n,
            if self.exclusions_applied {
                "hyperbolicity exclusions applied"
            } else {
                "all structures"
            }
        ));
        out.push_str("| dim | structure | status |\n|----:|-----------|--------|\n");
        for row in &self.rows {
            for w in &row.witnesses {
                let status = match &w.excluded {
                    Some(reason) => reason.as_str(),
                    None => "ok",
                };
                out.push_str(&format!("| {} | {} | {} |\n", row.dim, w.describe(), status));
            }
        }
        out
    }
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for first in 1..=rem {
            cur.push(first);
            rec(rem - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

fn exclusion_reason(s: usize, t: usize, p: usize) -> Option<String> {
    if p == t && s < t {
        return Some(EXCLUSION_NON_HYPERBOLIC.to_string());
    }
    if t == 0 {
        return Some(EXCLUSION_ROTATION_ONLY.to_string());
    }
    None
}

/// Enumerates every block structure in `C^n` (compositions of `n`, all role
/// splits `0 <= s <= t <= p`) and its automorphism dimension.
///
/// With `apply_exclusions` the structures ruled out by hyperbolicity are
/// dropped; otherwise they are kept and flagged. Witnesses are deduplicated
/// by the multiset of `(role, size)` pairs, which determines the dimension.
pub fn enumerate_dims(n: usize, apply_exclusions: bool) -> Result<DimTable, ReinhardtError> {
    if n == 0 || n > 8 {
        return Err(ReinhardtError::GuardRange(n));
    }
    let mut seen: BTreeSet<Vec<(u8, usize)>> = BTreeSet::new();
    let mut rows: BTreeMap<usize, Vec<Witness>> = BTreeMap::new();
    for sizes in compositions(n) {
        let p = sizes.len();
        for t in 0..=p {
            for s in 0..=t {
                let excluded = exclusion_reason(s, t, p);
                if apply_exclusions && excluded.is_some() {
                    continue;
                }
                let witness = Witness {
                    s,
                    t,
                    p,
                    sizes: sizes.clone(),
                    excluded,
                };
                if !seen.insert(witness.dedup_key()) {
                    continue;
                }
                let form = NormalForm::with_zero_exponents(s, t, sizes.clone())?;
                rows.entry(form.dim_aut0()).or_default().push(witness);
            }
        }
    }
    Ok(DimTable {
        n,
        exclusions_applied: apply_exclusions,
        rows: rows
            .into_iter()
            .map(|(dim, witnesses)| DimRow { dim, witnesses })
            .collect(),
    })
}
