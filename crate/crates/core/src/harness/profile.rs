//! Exploratory profile of the bounded domain near its exceptional boundary
//! point `(1, 0)`: how far the `z2` fibers extend over base points at
//! distance `eps` from the point, and the empirical growth exponent of that
//! extent as `eps` shrinks. Produces a table, not pass/fail checks.

use super::HarnessError;
use crate::catalog;
use crate::expr::DomainSpec;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Base-circle resolution: directions `phi` for `z1 = 1 + eps e^{i phi}`.
const PHI_STEPS: usize = 96;
/// Fiber-phase resolution: directions `psi` for `z2 = r e^{i psi}`.
const PSI_STEPS: usize = 32;
/// Bisection refinements for each boundary radius.
const REFINE: usize = 80;
/// Cap for the outward doubling; beyond any bound certificate of the domain.
const R_CAP: f64 = 4.0;

/// Fiber extent over base points at one distance from the exceptional point.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    /// Distance `|z1 - 1|` of the sampled base circle.
    pub eps: f64,
    /// Largest boundary fiber radius found over the circle, when any base
    /// direction was interior.
    pub max_z2: Option<f64>,
    /// Log-log slope of `max_z2` against `eps` relative to the previous row.
    pub slope: Option<f64>,
    /// Grid directions `(phi, psi)` that produced a boundary radius.
    pub samples_hit: usize,
}

/// Fiber-extent profile over a decreasing sequence of base distances.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileTable {
    pub rows: Vec<ProfileRow>,
}

impl ProfileTable {
    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "Fiber extent near the exceptional boundary point (1, 0):\n\n\
             | eps | max |z2| | log-log slope | grid hits |\n\
             |----:|---------:|--------------:|----------:|\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "| {:.3e} | {} | {} | {} |\n",
                row.eps,
                row.max_z2
                    .map_or_else(|| "—".to_string(), |v| format!("{v:.6e}")),
                row.slope
                    .map_or_else(|| "—".to_string(), |v| format!("{v:.4}")),
                row.samples_hit,
            ));
        }
        out
    }
}

/// Profiles the largest `z2` fiber radius of the bounded domain over base
/// circles `z1 = 1 + eps e^{i phi}`, for each `eps` in the given strictly
/// decreasing positive list, and estimates the growth exponent between
/// consecutive distances.
pub fn profile_exceptional(eps_list: &[f64]) -> Result<ProfileTable, HarnessError> {
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(HarnessError::BadInput(format!(
                "profile distances must be positive, got {eps}"
            )));
        }
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(HarnessError::BadInput(
            "profile distances must be strictly decreasing".to_string(),
        ));
    }

    let domain = catalog::theorem2_domain()?;
    let mut rows: Vec<ProfileRow> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let (max_z2, samples_hit) = circle_extent(&domain, eps);
        let slope = match (rows.last(), max_z2) {
            (
                Some(ProfileRow {
                    eps: prev_eps,
                    max_z2: Some(prev_max),
                    ..
                }),
                Some(cur_max),
            ) if *prev_max > 0.0 && cur_max > 0.0 => {
                Some((cur_max / prev_max).ln() / (eps / prev_eps).ln())
            }
            _ => None,
        };
        rows.push(ProfileRow {
            eps,
            max_z2,
            slope,
            samples_hit,
        });
    }
    Ok(ProfileTable { rows })
}

/// Largest boundary fiber radius over the base circle at distance `eps`,
/// plus the number of grid directions that yielded one.
fn circle_extent(domain: &DomainSpec, eps: f64) -> (Option<f64>, usize) {
    let per_phi: Vec<(Option<f64>, usize)> = (0..PHI_STEPS)
        .into_par_iter()
        .map(|i| {
            let phi = TAU * i as f64 / PHI_STEPS as f64;
            let z1 = Complex64::new(1.0, 0.0) + Complex64::from_polar(eps, phi);
            match domain.eval_rho(&[z1, Complex64::new(0.0, 0.0)]) {
                Ok(v) if v < 0.0 => {}
                _ => return (None, 0),
            }
            let mut best: Option<f64> = None;
            let mut hits = 0usize;
            for j in 0..PSI_STEPS {
                let psi = TAU * j as f64 / PSI_STEPS as f64;
                if let Some(r) = fiber_radius(domain, z1, psi) {
                    hits += 1;
                    best = Some(best.map_or(r, |b: f64| b.max(r)));
                }
            }
            (best, hits)
        })
        .collect();

    let mut max_z2: Option<f64> = None;
    let mut samples_hit = 0usize;
    for (best, hits) in per_phi {
        samples_hit += hits;
        if let Some(r) = best {
            max_z2 = Some(max_z2.map_or(r, |b| b.max(r)));
        }
    }
    (max_z2, samples_hit)
}

/// Boundary radius along `z2 = r e^{i psi}` over the fixed base point:
/// doubles outward from a radius comparable to the base distance, then
/// bisects the first sign change to floating-point exhaustion.
fn fiber_radius(domain: &DomainSpec, z1: Complex64, psi: f64) -> Option<f64> {
    let rho_at = |r: f64| -> Option<f64> {
        domain
            .eval_rho(&[z1, Complex64::from_polar(r, psi)])
            .ok()
            .filter(|v| v.is_finite())
    };
    let mut lo = 0.0f64;
    let mut hi = 1e-6;
    loop {
        match rho_at(hi) {
            Some(v) if v < 0.0 => {
                lo = hi;
                hi *= 2.0;
                if hi > R_CAP {
                    return None;
                }
            }
            Some(_) => break,
            None => return None,
        }
    }
    for _ in 0..REFINE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match rho_at(mid) {
            Some(v) if v < 0.0 => lo = mid,
            Some(_) => hi = mid,
            None => return None,
        }
    }
    Some(0.5 * (lo + hi))
}
