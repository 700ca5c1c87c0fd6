//! Levi forms, complex tangent spaces, and boundary scans.
//!
//! For a domain `{ rho < 0 }` the complex Hessian `H[j][k] = d^2 rho /
//! (dz_j dzbar_k)` restricted to the complex tangent space `{ w : sum_j
//! grad_j w_j = 0 }` is the Levi form. [`LeviProbe`] caches the symbolic
//! gradient and Hessian of a defining function and evaluates rank, signature,
//! and eigenvalues at boundary points, locates boundary points along rays
//! from the anchor, and runs randomized boundary scans for the smallest
//! restricted eigenvalue.
//!
//! All randomized entry points are keyed by explicit seeds and fold results
//! in sample order, so outputs are bitwise reproducible regardless of thread
//! count.

use crate::expr::{DomainSpec, EvalError, Expr, WirtKind};
use crate::stream::{self, Streams};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Gradients with norm below this are degenerate: the complex tangent space
/// is undefined there.
pub const EPS_GRAD: f64 = 1e-10;
/// Rank threshold for restricted eigenvalues, relative to the spectral norm
/// (with an absolute floor of the same size for near-zero forms).
pub const EPS_RANK: f64 = 1e-8;
/// Rays from the anchor are followed at most this far before the domain is
/// declared unbounded in that direction.
pub const T_MAX: f64 = 1e6;
/// Points closer than this to a recorded exceptional boundary point are not
/// analyzed numerically: derivative expressions degrade catastrophically
/// there, so the probe reports proximity instead.
pub const EXCEPTIONAL_GUARD: f64 = 1e-3;
const BISECT_MAX: usize = 200;

#[derive(Debug, Clone, Error)]
pub enum LeviError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("point has {got} components but the domain lives in C^{expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("gradient is degenerate (|grad| = {grad_norm:.3e}){}",
        match .exceptional_distance {
            Some(d) => format!(", {d:.3e} away from a recorded exceptional boundary point"),
            None => String::new(),
        })]
    DegenerateGradient {
        grad_norm: f64,
        exceptional_distance: Option<f64>,
    },
    #[error("complex Hessian is not Hermitian (asymmetry {asymmetry:.3e}); the defining function is not real-analytic-real-valued here")]
    NotHermitian { asymmetry: f64 },
    #[error("no boundary within t = {t_max:.1e} along the sampled ray; the domain is unbounded in that direction")]
    NoBoundary { t_max: f64 },
    #[error("all {requested} scan samples were skipped (rays kept hitting singular or degenerate sets)")]
    AllSamplesSkipped { requested: usize },
    #[error("could not sample a usable point after {tries} tries")]
    SamplingFailed { tries: usize },
    #[error("{0}")]
    NotSupported(String),
}

/// Inertia of a Hermitian form: counts of eigenvalues above, below, and
/// within the rank threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

/// Levi data at a single boundary point.
#[derive(Debug, Clone)]
pub struct LeviReport {
    pub point: Vec<Complex64>,
    /// `rho` at the point; near zero when the point sits on the boundary.
    pub residual: f64,
    pub grad: Vec<Complex64>,
    /// Full complex Hessian, Hermitized.
    pub hessian: Vec<Vec<Complex64>>,
    /// Orthonormal basis of the complex tangent space, one row per vector.
    pub tangent_basis: Vec<Vec<Complex64>>,
    /// Levi form in the tangent basis: `restricted[r][s] = L(b_r, b_s)`.
    pub restricted: Vec<Vec<Complex64>>,
    /// Restricted eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub signature: Signature,
}

impl Serialize for LeviReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LeviReport", 7)?;
        st.serialize_field("point", &self.point)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("grad", &self.grad)?;
        st.serialize_field("hessian", &self.hessian)?;
        st.serialize_field("eigenvalues", &self.eigenvalues)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("signature", &self.signature)?;
        st.end()
    }
}

/// A boundary point found along a ray from the anchor.
#[derive(Debug, Clone)]
pub struct BoundaryHit {
    pub point: Vec<Complex64>,
    pub residual: f64,
    /// Ray parameter: `point = anchor + t * direction`.
    pub t: f64,
}

/// Result of a randomized boundary scan.
#[derive(Debug, Clone, Serialize)]
pub struct LeviScan {
    /// Random samples requested.
    pub samples: usize,
    /// Points that produced a Levi report (random plus caller-supplied).
    pub used: usize,
    /// Random samples skipped because the ray hit a singular or degenerate set.
    pub skipped: usize,
    pub min_eigenvalue: f64,
    /// Where the minimum was attained.
    pub min_point: Vec<Complex64>,
    /// Largest `|rho|` among the boundary points that were analyzed.
    pub max_residual: f64,
}

/// Hermitian inner product `sum_k x_k * conj(y_k)`.
fn hdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn l2_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic orthonormal basis of `{ w : sum_j grad_j w_j = 0 }`.
///
/// The constraint says `w` is Hermitian-orthogonal to `conj(grad)`. The basis
/// drops the coordinate axis most aligned with that normal and Gram-Schmidts
/// the remaining axes in index order, so the result depends only on `grad`.
pub fn tangent_basis(grad: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = grad.len();
    let gnorm = l2_norm(grad);
    assert!(gnorm > 0.0, "tangent_basis needs a nonzero gradient");
    let u: Vec<Complex64> = grad.iter().map(|g| g.conj() / gnorm).collect();

    let mut drop = 0;
    for (j, uj) in u.iter().enumerate() {
        if uj.norm() > u[drop].norm() {
            drop = j;
        }
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
    for j in 0..n {
        if j == drop {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[j] = Complex64::new(1.0, 0.0);
        let proj = hdot(&v, &u);
        for (vk, uk) in v.iter_mut().zip(&u) {
            *vk -= proj * uk;
        }
        for b in &basis {
            let proj = hdot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= proj * bk;
            }
        }
        let vnorm = l2_norm(&v);
        debug_assert!(vnorm > 1e-8, "coordinate axes lost independence");
        for vk in &mut v {
            *vk /= vnorm;
        }
        basis.push(v);
    }
    basis
}

/// Symbolic gradient/Hessian of a defining function plus the point analyses
/// built on them.
#[derive(Debug, Clone)]
pub struct LeviProbe {
    domain: DomainSpec,
    grad: Vec<Expr>,
    hess: Vec<Vec<Expr>>,
}

impl LeviProbe {
    pub fn new(domain: &DomainSpec) -> LeviProbe {
        let n = domain.n;
        let grad = domain.rho.wirtinger_gradient(n, WirtKind::Holo);
        let hess = grad
            .iter()
            .map(|g| (1..=n).map(|k| g.wirtinger(k, WirtKind::Anti)).collect())
            .collect();
        LeviProbe {
            domain: domain.clone(),
            grad,
            hess,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn check_dim(&self, z: &[Complex64]) -> Result<(), LeviError> {
        if z.len() != self.domain.n {
            return Err(LeviError::WrongDimension {
                expected: self.domain.n,
                got: z.len(),
            });
        }
        Ok(())
    }

    /// `(d rho/dz_1, ..., d rho/dz_n)` at `z`.
    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>, LeviError> {
        self.check_dim(z)?;
        Ok(self
            .grad
            .iter()
            .map(|e| e.eval(z))
            .collect::<Result<Vec<_>, _>>()?)
    }

    /// Hermitized complex Hessian at `z`; errors if the raw Hessian is not
    /// Hermitian to rounding accuracy.
    pub fn hessian(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>, LeviError> {
        self.check_dim(z)?;
        let n = self.domain.n;
        let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for j in 0..n {
            for k in 0..n {
                h[j][k] = self.hess[j][k].eval(z)?;
            }
        }
        let scale = h
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let mut asym = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                asym = asym.max((h[j][k] - h[k][j].conj()).norm());
            }
        }
        if asym > 1e-8 * scale.max(1.0) {
            return Err(LeviError::NotHermitian { asymmetry: asym });
        }
        for j in 0..n {
            for k in j..n {
                let avg = 0.5 * (h[j][k] + h[k][j].conj());
                h[j][k] = avg;
                h[k][j] = avg.conj();
            }
        }
        Ok(h)
    }

    /// Levi form applied to a single vector: `sum_{j,k} H[j][k] w_j conj(w_k)`.
    ///
    /// Real for Hermitian `H`; the imaginary part is returned so callers can
    /// assert it vanishes.
    pub fn form_value(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64, LeviError> {
        self.check_dim(z)?;
        self.check_dim(w)?;
        let h = self.hessian(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            for (k, wk) in w.iter().enumerate() {
                acc += h[j][k] * wj * wk.conj();
            }
        }
        Ok(acc)
    }

    /// Levi form on the tangent vector `(-g_2/g_1, 1)` in `C^2`.
    ///
    /// This is the coefficient that appears when the tangent space is written
    /// as a graph over the `z_2` axis; unlike the orthonormal-basis
    /// eigenvalue it is not scaled by the frame, which is the normalization
    /// used for quoted closed-form values.
    pub fn graph_frame_coefficient(&self, z: &[Complex64]) -> Result<f64, LeviError> {
        if self.domain.n != 2 {
            return Err(LeviError::NotSupported(
                "graph-frame coefficient is defined for domains in C^2".into(),
            ));
        }
        self.exceptional_guard(z)?;
        let g = self.gradient(z)?;
        if g[0].norm() < EPS_GRAD {
            return Err(LeviError::DegenerateGradient {
                grad_norm: g[0].norm(),
                exceptional_distance: self.domain.exceptional_distance(z),
            });
        }
        let w = [-g[1] / g[0], Complex64::new(1.0, 0.0)];
        Ok(self.form_value(z, &w)?.re)
    }

    /// Degeneracy error when `z` sits within [`EXCEPTIONAL_GUARD`] of a
    /// recorded exceptional boundary point.
    fn exceptional_guard(&self, z: &[Complex64]) -> Result<(), LeviError> {
        if let Some(d) = self.domain.exceptional_distance(z) {
            if d <= EXCEPTIONAL_GUARD {
                let grad_norm = self.gradient(z).map(|g| l2_norm(&g)).unwrap_or(0.0);
                return Err(LeviError::DegenerateGradient {
                    grad_norm,
                    exceptional_distance: Some(d),
                });
            }
        }
        Ok(())
    }

    /// Full Levi analysis at a point.
    pub fn report(&self, z: &[Complex64]) -> Result<LeviReport, LeviError> {
        self.check_dim(z)?;
        self.exceptional_guard(z)?;
        let n = self.domain.n;
        let residual = self.domain.eval_rho(z)?;
        let grad = self.gradient(z)?;
        let gnorm = l2_norm(&grad);
        if gnorm < EPS_GRAD {
            return Err(LeviError::DegenerateGradient {
                grad_norm: gnorm,
                exceptional_distance: self.domain.exceptional_distance(z),
            });
        }
        let hessian = self.hessian(z)?;
        let basis = tangent_basis(&grad);

        let m = n - 1;
        let mut restricted = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for (r, br) in basis.iter().enumerate() {
            for (s, bs) in basis.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    for k in 0..n {
                        acc += hessian[j][k] * br[j] * bs[k].conj();
                    }
                }
                restricted[r][s] = acc;
            }
        }

        let mut eigenvalues: Vec<f64> = if m == 0 {
            Vec::new()
        } else {
            let mat = DMatrix::from_fn(m, m, |r, s| restricted[r][s]);
            mat.symmetric_eigen().eigenvalues.iter().copied().collect()
        };
        eigenvalues.sort_by(f64::total_cmp);

        let spectral = eigenvalues.iter().map(|l| l.abs()).fold(0.0f64, f64::max);
        let thresh = EPS_RANK * spectral.max(1.0);
        let pos = eigenvalues.iter().filter(|&&l| l > thresh).count();
        let neg = eigenvalues.iter().filter(|&&l| l < -thresh).count();
        let signature = Signature {
            pos,
            neg,
            zero: m - pos - neg,
        };

        Ok(LeviReport {
            point: z.to_vec(),
            residual,
            grad,
            hessian,
            tangent_basis: basis,
            restricted,
            eigenvalues,
            rank: pos + neg,
            signature,
        })
    }

    /// Walks from the anchor along `direction` until `rho` changes sign,
    /// then bisects to floating-point exhaustion.
    pub fn locate_boundary(&self, direction: &[Complex64]) -> Result<BoundaryHit, LeviError> {
        self.check_dim(direction)?;
        let at = |t: f64| -> Vec<Complex64> {
            self.domain
                .anchor
                .iter()
                .zip(direction)
                .map(|(a, d)| a + t * d)
                .collect()
        };
        let rho_at = |t: f64| -> Result<f64, EvalError> { self.domain.eval_rho(&at(t)) };

        let mut lo = 0.0f64;
        let mut f_lo = rho_at(0.0)?;
        debug_assert!(f_lo < 0.0, "anchor must be interior");
        let mut hi = 1.0f64;
        let mut f_hi;
        loop {
            match rho_at(hi) {
                Ok(v) if v >= 0.0 => {
                    f_hi = v;
                    break;
                }
                Ok(v) => {
                    lo = hi;
                    f_lo = v;
                    hi *= 2.0;
                }
                Err(e) => return Err(LeviError::Eval(e)),
            }
            if hi > T_MAX {
                return Err(LeviError::NoBoundary { t_max: T_MAX });
            }
        }

        for _ in 0..BISECT_MAX {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = rho_at(mid)?;
            if f_mid >= 0.0 {
                hi = mid;
                f_hi = f_mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }

        let (t, residual) = if f_lo.abs() <= f_hi.abs() {
            (lo, f_lo)
        } else {
            (hi, f_hi)
        };
        Ok(BoundaryHit {
            point: at(t),
            residual,
            t,
        })
    }

    /// Boundary point along a random ray; retries directions that hit
    /// singular sets.
    pub fn random_boundary_point<R: rand::Rng>(
        &self,
        rng: &mut R,
    ) -> Result<BoundaryHit, LeviError> {
        const TRIES: usize = 32;
        for _ in 0..TRIES {
            let d = stream::unit_direction(rng, self.domain.n);
            if let Ok(hit) = self.locate_boundary(&d) {
                return Ok(hit);
            }
        }
        Err(LeviError::SamplingFailed { tries: TRIES })
    }

    /// Strictly interior point, biased toward moderate depth. Falls back to
    /// stepping a bounded distance along rays that never exit (unbounded
    /// domains).
    pub fn random_interior_point<R: rand::Rng>(
        &self,
        rng: &mut R,
    ) -> Result<Vec<Complex64>, LeviError> {
        const TRIES: usize = 32;
        for _ in 0..TRIES {
            let d = stream::unit_direction(rng, self.domain.n);
            let t = match self.locate_boundary(&d) {
                Ok(hit) => hit.t * rng.random_range(0.05..0.95),
                Err(LeviError::NoBoundary { .. }) => rng.random_range(0.05..10.0),
                Err(_) => continue,
            };
            let z: Vec<Complex64> = self
                .domain
                .anchor
                .iter()
                .zip(&d)
                .map(|(a, dk)| a + t * dk)
                .collect();
            if let Ok(r) = self.domain.eval_rho(&z) {
                if r < -1e-12 {
                    return Ok(z);
                }
            }
        }
        Err(LeviError::SamplingFailed { tries: TRIES })
    }

    /// Randomized boundary scan for the smallest restricted eigenvalue.
    ///
    /// Random rays that hit singular or degenerate sets are skipped and
    /// counted; `extra` points (assumed on or near the boundary) are always
    /// analyzed and errors from them propagate. The fold is in sample order,
    /// so the result is identical for any thread count.
    pub fn scan(
        &self,
        samples: usize,
        seed: u64,
        extra: &[Vec<Complex64>],
    ) -> Result<LeviScan, LeviError> {
        if self.domain.n < 2 {
            return Err(LeviError::NotSupported(
                "boundary scans need a domain in C^2 or higher".into(),
            ));
        }
        let streams = Streams::new(seed, &format!("levi.scan.{}", self.domain.name));
        let results: Vec<Option<(f64, Vec<Complex64>, f64)>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = streams.rng(i as u64);
                let d = stream::unit_direction(&mut rng, self.domain.n);
                let hit = match self.locate_boundary(&d) {
                    Ok(h) => h,
                    Err(_) => return None,
                };
                match self.report(&hit.point) {
                    Ok(rep) => {
                        let min = rep.eigenvalues.first().copied().unwrap_or(f64::INFINITY);
                        Some((min, rep.point, rep.residual))
                    }
                    Err(_) => None,
                }
            })
            .collect();

        let mut used = 0usize;
        let mut skipped = 0usize;
        let mut min_eigenvalue = f64::INFINITY;
        let mut min_point = Vec::new();
        let mut max_residual = 0.0f64;
        for r in results {
            match r {
                Some((min, point, residual)) => {
                    used += 1;
                    max_residual = max_residual.max(residual.abs());
                    if min < min_eigenvalue {
                        min_eigenvalue = min;
                        min_point = point;
                    }
                }
                None => skipped += 1,
            }
        }
        for z in extra {
            let rep = self.report(z)?;
            used += 1;
            max_residual = max_residual.max(rep.residual.abs());
            if let Some(&min) = rep.eigenvalues.first() {
                if min < min_eigenvalue {
                    min_eigenvalue = min;
                    min_point = rep.point;
                }
            }
        }
        if used == 0 {
            return Err(LeviError::AllSamplesSkipped { requested: samples });
        }

        Ok(LeviScan {
            samples,
            used,
            skipped,
            min_eigenvalue,
            min_point,
            max_residual,
        })
    }
}
