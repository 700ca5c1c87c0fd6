//! Checks for the dimension-count reduction in `C^2` and the model fibered
//! domain behind it: the full dimension table, the two structures that
//! survive the hyperbolicity exclusions at dimension 4, fiber-disc
//! containment, and the decay of the Cauchy derivative bound.

use super::{parallel_worst, Ctx, HarnessError, Outcome, RunConfig};
use crate::reinhardt::{enumerate_dims, LemmaADomain};
use crate::stream::{self, Streams};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;
use std::collections::BTreeSet;

/// Runs the scenario: dimension enumeration in `C^2` plus the quantitative
/// facts about the fibered model domain.
pub fn run_lemma_a(cfg: &RunConfig) -> Result<super::Report, HarnessError> {
    let mut ctx = Ctx::new(cfg);
    let seed = cfg.seed;

    ctx.run(
        "la.dims-full",
        "without exclusions the achievable Reinhardt automorphism dimensions in C^2 are exactly {2, 4, 6, 8}",
        "lemma A: full dimension table for Reinhardt structures in C^2",
        0.5,
        |_| match enumerate_dims(2, false) {
            Ok(table) => {
                let dims = table.achievable();
                let expected: BTreeSet<usize> = [2, 4, 6, 8].into();
                let mismatches = dims.symmetric_difference(&expected).count()
                    + usize::from(!dims.contains(&4));
                Outcome::Residual {
                    value: mismatches as f64,
                    witness: json!({
                        "achievable": dims.iter().copied().collect::<Vec<_>>(),
                        "contains_four": dims.contains(&4),
                    }),
                }
            }
            Err(e) => Outcome::Skip {
                note: format!("enumeration failed: {e}"),
            },
        },
    );

    ctx.run(
        "la.dims-reduction",
        "with the hyperbolicity exclusions, dimension 4 in C^2 is witnessed only by the two scaled-fiber structures (s=0 or 1, t=1, two blocks of size 1)",
        "lemma A: reduction of the dimension-4 case to the fibered normal forms",
        0.5,
        |_| match enumerate_dims(2, true) {
            Ok(table) => {
                let survivors: BTreeSet<(usize, usize, usize, Vec<usize>)> = table
                    .rows
                    .iter()
                    .find(|row| row.dim == 4)
                    .map(|row| {
                        row.witnesses
                            .iter()
                            .map(|w| (w.s, w.t, w.p, w.sizes.clone()))
                            .collect()
                    })
                    .unwrap_or_default();
                let expected: BTreeSet<(usize, usize, usize, Vec<usize>)> = [
                    (0, 1, 2, vec![1, 1]),
                    (1, 1, 2, vec![1, 1]),
                ]
                .into();
                let mismatches = survivors.symmetric_difference(&expected).count();
                Outcome::Residual {
                    value: mismatches as f64,
                    witness: json!({
                        "dimension_4_structures": survivors
                            .iter()
                            .map(|(s, t, p, sizes)| json!({
                                "s": s, "t": t, "p": p, "sizes": sizes,
                            }))
                            .collect::<Vec<_>>(),
                    }),
                }
            }
            Err(e) => Outcome::Skip {
                note: format!("enumeration failed: {e}"),
            },
        },
    );

    let domain = match LemmaADomain::new(2.0, 1.0) {
        Ok(d) => d,
        Err(e) => return Err(HarnessError::BadInput(format!("model domain: {e}"))),
    };

    ctx.run(
        "la.containment",
        "fiber points of modulus R/2 over any base point stay inside the model domain",
        "lemma A: fiber discs of radius R/2 embed in the fibered domain over every base point",
        0.5,
        |_| {
            let streams = Streams::new(seed, "harness.la.containment");
            let half_r = domain.r / 2.0;
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.tenth_samples(), &streams, |rng| {
                    let mu = stream::unit_disc(rng);
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    let z = vec![mu, Complex64::from_polar(half_r, phase)];
                    match domain.contains(&z) {
                        Ok(true) => Some((0.0, json!({ "z": z }))),
                        Ok(false) => Some((1.0, json!({ "z": z, "outside": true }))),
                        Err(_) => None,
                    }
                });
            if used == 0 {
                return Outcome::Skip {
                    note: format!("all {skipped} membership tests failed"),
                };
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    ctx.run(
        "la.decay",
        "the Cauchy derivative bound at fixed |rho| = R/4 is strictly decreasing in |mu| and drops below 1e-2 by |mu| = 0.999",
        "lemma A: derivative bound decays to zero as the base point approaches the unit circle",
        0.5,
        |_| {
            let rho = Complex64::new(0.5, 0.0);
            let mut values = Vec::new();
            for m in [0.0, 0.9, 0.99, 0.999] {
                match domain.derivative_bound(1.0, Complex64::new(m, 0.0), rho) {
                    Ok(b) => values.push((m, b)),
                    Err(e) => {
                        return Outcome::Skip {
                            note: format!("bound failed at |mu| = {m}: {e}"),
                        }
                    }
                }
            }
            let decreasing = values.windows(2).all(|w| w[1].1 < w[0].1);
            let small_tail = values.last().is_some_and(|&(_, b)| b <= 1e-2);
            Outcome::Residual {
                value: f64::from(!(decreasing && small_tail)),
                witness: json!({
                    "bounds": values
                        .iter()
                        .map(|(m, b)| json!({ "mu": m, "bound": b }))
                        .collect::<Vec<_>>(),
                    "strictly_decreasing": decreasing,
                    "final_below_1e-2": small_tail,
                }),
            }
        },
    );

    Ok(ctx.finish("lemma_a"))
}
