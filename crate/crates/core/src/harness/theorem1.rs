//! Checks for the bounded circular quartic domain in `C^3`: symmetry,
//! invariance of the defining function under the noncompact family,
//! pseudoconvexity, the Levi-rank stratification of its boundary, and the
//! dimension-count argument.

use super::{parallel_worst, Ctx, HarnessError, Outcome, RunConfig};
use crate::catalog;
use crate::expr::DomainSpec;
use crate::levi::LeviProbe;
use crate::maps::{verify_torus_invariance, TorusAction};
use crate::reinhardt::enumerate_dims;
use crate::stream::{self, Streams};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

/// Runs the scenario against the shipped domain.
pub fn run_theorem1(cfg: &RunConfig) -> Result<super::Report, HarnessError> {
    let domain = catalog::theorem1_domain(3)?;
    run_theorem1_on(&domain, cfg)
}

/// Runs the scenario against a caller-supplied domain in `C^3` — the same
/// battery of checks, so a perturbed defining function demonstrably trips
/// the symmetry and invariance checks.
pub fn run_theorem1_on(
    domain: &DomainSpec,
    cfg: &RunConfig,
) -> Result<super::Report, HarnessError> {
    let probe = LeviProbe::new(domain);
    let family = catalog::theorem1_subgroup()?;
    let generators = catalog::theorem1_linear_generators();
    let claim = domain.provenance.clone();
    let family_claim =
        "theorem 1: noncompact Moebius family with branch-coherent rescaling".to_string();
    let mut ctx = Ctx::new(cfg);
    let seed = cfg.seed;
    let n = domain.n;

    ctx.run(
        "t1.reality",
        "defining function is real-valued at random points around the anchor",
        &claim,
        1e-12,
        |_| {
            let streams = Streams::new(seed, "harness.t1.reality");
            let (worst, witness, used, _) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let z = box_sample(rng, &domain.anchor);
                    let v = domain.rho.eval(&z).ok()?;
                    Some((v.im.abs() / (1.0 + v.norm()), json!({ "z": z })))
                });
            if used == 0 {
                return Outcome::Skip {
                    note: "no sample evaluated cleanly".into(),
                };
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    let radius_bound = (n as f64).sqrt() + 1.0;
    ctx.run(
        "t1.bounded",
        "every located boundary point lies inside the certificate radius sqrt(n)+1",
        &claim,
        1e-9,
        |_| {
            let streams = Streams::new(seed, "harness.t1.bounded");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.tenth_samples(), &streams, |rng| {
                    let dir = stream::unit_direction(rng, n);
                    match probe.locate_boundary(&dir) {
                        Ok(hit) => {
                            let r = l2(&hit.point);
                            Some(((r - radius_bound).max(0.0), json!({ "z": hit.point, "radius": r })))
                        }
                        Err(_) => Some((f64::INFINITY, json!({ "direction": dir }))),
                    }
                });
            if used == 0 {
                return Outcome::Skip {
                    note: format!("all {skipped} rays failed to locate the boundary"),
                };
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    ctx.run(
        "t1.invariance",
        "rho(F_a(z)) |1 - conj(a) z1|^2 equals (1 - |a|^2) rho(z) for random interior z and |a| < 1",
        &family_claim,
        1e-10,
        |_| {
            let streams = Streams::new(seed, "harness.t1.invariance");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let env = family.sample_params(rng);
                    let a = env["a"];
                    let map = family.instantiate(&env).ok()?;
                    let z = probe.random_interior_point(rng).ok()?;
                    let w = map.apply(&z).ok()?;
                    let weight = (Complex64::new(1.0, 0.0) - a.conj() * z[0]).norm_sqr();
                    let lhs = domain.eval_rho(&w).ok()? * weight;
                    let rhs = (1.0 - a.norm_sqr()) * domain.eval_rho(&z).ok()?;
                    let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
                    Some((rel, json!({ "a": a, "z": z })))
                });
            if used == 0 {
                return Outcome::Skip {
                    note: format!("all {skipped} samples failed to evaluate"),
                };
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    let torus_checks: [(&str, &str, TorusAction); 2] = [
        (
            "t1.torus2",
            "invariance under the two-parameter torus rotating the first block and the last two coordinates together",
            generators.torus.clone(),
        ),
        (
            "t1.circular",
            "invariance under simultaneous rotation of all coordinates",
            TorusAction::circle(n),
        ),
    ];
    for (id, description, action) in torus_checks {
        ctx.run(id, description, &claim, 1e-10, |_| {
            match verify_torus_invariance(&action, &probe, cfg.identity_samples(), seed) {
                Ok(summary) => Outcome::Residual {
                    value: summary.max_residual,
                    witness: json!({
                        "worst_point": summary.worst_point,
                        "angles": summary.worst_params,
                    }),
                },
                Err(e) => Outcome::Skip {
                    note: format!("sampling failed: {e}"),
                },
            }
        });
    }

    ctx.run(
        "t1.torus3",
        "independent rotation of each coordinate must be detected as a broken symmetry (worst residual exceeds the tolerance)",
        "theorem 1: the domain is circular and torus-invariant but not Reinhardt",
        0.1,
        |_| {
            let action = TorusAction::new(n, identity_weights(n));
            let scanned = match verify_torus_invariance(&action, &probe, cfg.identity_samples(), seed)
            {
                Ok(summary) => summary.max_residual,
                Err(_) => 0.0,
            };
            // Deterministic witness on the diagonal ray: rotating z2 alone by
            // pi/2 kills the cross term, shifting rho by 4 t^4.
            let t = 0.9 * 6.0f64.powf(-0.25);
            let z = diag_point(n, t);
            let mut thetas = vec![0.0; n];
            thetas[n - 2] = FRAC_PI_2;
            let rotated = action.apply(&thetas, &z);
            let probe_residual = match (domain.eval_rho(&z), domain.eval_rho(&rotated)) {
                (Ok(a), Ok(b)) => (a - b).abs(),
                _ => 0.0,
            };
            Outcome::Exceeds {
                value: scanned.max(probe_residual),
                witness: json!({
                    "scanned_max": scanned,
                    "diagonal_probe": probe_residual,
                    "probe_point": z,
                }),
            }
        },
    );

    ctx.run(
        "t1.generators",
        "coordinate swap and sign involutions preserve the defining function and square to the identity",
        "theorem 1: finite linear symmetries of the domain",
        1e-12,
        |_| {
            let mut worst = 0.0f64;
            let mut witness = Value::Null;
            for map in &generators.discrete {
                match map.verify_invariance_identity(&probe, domain, cfg.tenth_samples(), seed) {
                    Ok(summary) => {
                        if summary.max_residual > worst {
                            worst = summary.max_residual;
                            witness = json!({
                                "map": map.name,
                                "worst_point": summary.worst_point,
                            });
                        }
                    }
                    Err(e) => {
                        return Outcome::Skip {
                            note: format!("sampling failed: {e}"),
                        }
                    }
                }
                let streams = Streams::new(seed, &format!("harness.t1.involution.{}", map.name));
                let mut rng = streams.rng(0);
                for _ in 0..20 {
                    let z: Vec<Complex64> =
                        (0..n).map(|_| stream::unit_disc(&mut rng)).collect();
                    let Ok(once) = map.apply(&z) else { continue };
                    let Ok(twice) = map.apply(&once) else { continue };
                    let dev = z
                        .iter()
                        .zip(&twice)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0f64, f64::max);
                    if dev > worst {
                        worst = dev;
                        witness = json!({ "map": map.name, "point": z });
                    }
                }
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    let t = 6.0f64.powf(-0.25);
    let rank_cases: Vec<(&str, &str, Vec<Vec<Complex64>>, usize)> = vec![
        (
            "t1.rank0",
            "Levi form vanishes on the complex tangent space along the distinguished circle",
            vec![
                circle_point(n, 0.0),
                circle_point(n, 0.7),
                circle_point(n, 2.3),
            ],
            0,
        ),
        (
            "t1.rank2",
            "Levi form has full rank 2 at the flat-direction pole",
            vec![axis_point(n)],
            2,
        ),
    ];
    for (id, description, points, expected) in rank_cases {
        ctx.run(id, description, &claim, 0.5, |_| {
            rank_outcome(&probe, &points, expected)
        });
    }

    ctx.run(
        "t1.rank1",
        "Levi rank is exactly 1 on the diagonal boundary rays (z1, w, +/-w) with w nonzero",
        &claim,
        0.5,
        |_| {
            let mut points = vec![diag_point(n, t)];
            let streams = Streams::new(seed, "harness.t1.rank1");
            let mut rng = streams.rng(0);
            for k in 0..10 {
                let z1 = stream::unit_disc(&mut rng);
                let base = n - 2;
                let modulus = ((1.0 - z1.norm_sqr()) / 6.0).powf(0.25);
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                let w = Complex64::from_polar(modulus, phase);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let mut z = vec![Complex64::new(0.0, 0.0); n];
                z[0] = z1;
                z[base] = w;
                z[base + 1] = sign * w;
                points.push(z);
            }
            rank_outcome(&probe, &points, 1)
        },
    );

    ctx.run(
        "t1.psh-scan",
        "restricted Levi form stays positive semidefinite over random boundary samples",
        &claim,
        1e-8,
        |_| {
            let extras = vec![circle_point(n, 0.0), axis_point(n), diag_point(n, t)];
            match probe.scan(cfg.scan_samples(), seed, &extras) {
                Ok(scan) => Outcome::Residual {
                    value: (-scan.min_eigenvalue).max(0.0),
                    witness: json!({
                        "min_eigenvalue": scan.min_eigenvalue,
                        "min_point": scan.min_point,
                        "used": scan.used,
                        "skipped": scan.skipped,
                    }),
                },
                Err(e) => Outcome::Skip {
                    note: format!("scan failed: {e}"),
                },
            }
        },
    );

    ctx.run(
        "t1.dims",
        "achievable Reinhardt automorphism dimensions in C^3 are {3,5,7,9,11,15}; dimension 4 is unattainable",
        "theorem 1: no Reinhardt structure in C^3 achieves automorphism dimension 4",
        0.5,
        |_| match enumerate_dims(3, false) {
            Ok(table) => {
                let dims = table.achievable();
                let expected: BTreeSet<usize> = [3, 5, 7, 9, 11, 15].into();
                let mismatches = dims.symmetric_difference(&expected).count()
                    + usize::from(dims.contains(&4));
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

    Ok(ctx.finish("theorem1"))
}

fn rank_outcome(probe: &LeviProbe, points: &[Vec<Complex64>], expected: usize) -> Outcome {
    let mut worst = 0.0f64;
    let mut witness = Value::Null;
    for z in points {
        match probe.report(z) {
            Ok(report) => {
                let dev = (report.rank as f64 - expected as f64).abs();
                if dev > worst || witness.is_null() {
                    worst = worst.max(dev);
                    witness = json!({
                        "z": z,
                        "rank": report.rank,
                        "boundary_residual": report.residual,
                        "eigenvalues": report.eigenvalues,
                    });
                }
            }
            Err(e) => {
                return Outcome::Residual {
                    value: f64::INFINITY,
                    witness: json!({ "z": z, "error": e.to_string() }),
                }
            }
        }
    }
    Outcome::Residual {
        value: worst,
        witness,
    }
}

fn box_sample(rng: &mut rand_chacha::ChaCha8Rng, anchor: &[Complex64]) -> Vec<Complex64> {
    anchor
        .iter()
        .map(|a| a + Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect()
}

fn identity_weights(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|j| (0..n).map(|k| i64::from(j == k)).collect())
        .collect()
}

/// `(e^{i alpha}, 0, ..., 0)`.
fn circle_point(n: usize, alpha: f64) -> Vec<Complex64> {
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    z[0] = Complex64::from_polar(1.0, alpha);
    z
}

/// `(0, ..., 1, 0)`: unit point on the first quartic coordinate.
fn axis_point(n: usize) -> Vec<Complex64> {
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    z[n - 2] = Complex64::new(1.0, 0.0);
    z
}

/// `(0, ..., t, t)`: the diagonal ray through the last two coordinates.
fn diag_point(n: usize, t: f64) -> Vec<Complex64> {
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    z[n - 2] = Complex64::new(t, 0.0);
    z[n - 1] = Complex64::new(t, 0.0);
    z
}

fn l2(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
