//! Checks for the bounded rigid domain in `C^2`: boundedness certificate,
//! invariance under the real Moebius subgroup, the unbounding transform onto
//! the rigid model, the negative Levi direction at the corner point, the
//! boundary gradient identity, and the exceptional-point guard.

use super::{parallel_worst, Ctx, HarnessError, Outcome, RunConfig};
use crate::catalog;
use crate::levi::{LeviError, LeviProbe};
use crate::stream::Streams;
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Runs the scenario: the bounded domain, its real one-parameter subgroup,
/// and the transform onto the unbounded rigid model.
pub fn run_theorem2(cfg: &RunConfig) -> Result<super::Report, HarnessError> {
    let domain = catalog::theorem2_domain()?;
    let unbounded = catalog::theorem2_unbounded()?;
    let family = catalog::theorem2_subgroup()?;
    let cayley = catalog::cayley_transform()?;
    let bounded_term = catalog::theorem2_boundedness_term()?;
    let probe = LeviProbe::new(&domain);
    let model_probe = LeviProbe::new(&unbounded);
    let claim = domain.provenance.clone();
    let model_claim = unbounded.provenance.clone();
    let mut ctx = Ctx::new(cfg);
    let seed = cfg.seed;

    ctx.run(
        "t2.reality",
        "defining function is real-valued at random points around the anchor",
        &claim,
        1e-12,
        |_| {
            let streams = Streams::new(seed, "harness.t2.reality");
            let (worst, witness, used, _) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let z = box_sample(rng);
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

    ctx.run(
        "t2.bounded-term",
        "the rational square term of the defining function is real and nonnegative, so membership forces |z1|^2 + |z2|^4 < 1",
        &claim,
        1e-12,
        |_| {
            let streams = Streams::new(seed, "harness.t2.bounded-term");
            let (worst, witness, used, _) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let z = box_sample(rng);
                    let v = bounded_term.eval(&z).ok()?;
                    let scale = 1.0 + v.norm();
                    let rel = v.im.abs().max((-v.re).max(0.0)) / scale;
                    Some((rel, json!({ "z": z, "term": v })))
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

    let radius_bound = 2.0f64.sqrt() + 1.0;
    ctx.run(
        "t2.bounded-radius",
        "every located boundary point lies inside the certificate radius sqrt(2)+1",
        &claim,
        1e-9,
        |_| {
            let streams = Streams::new(seed, "harness.t2.bounded-radius");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.tenth_samples(), &streams, |rng| {
                    let hit = probe.random_boundary_point(rng).ok()?;
                    let r = l2(&hit.point);
                    Some(((r - radius_bound).max(0.0), json!({ "z": hit.point, "radius": r })))
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
        "t2.invariance",
        "rho(F_a(z)) |1 - a z1|^2 equals (1 - a^2) rho(z) for random interior z and real a in (-1, 1)",
        "theorem 2: real-parameter Moebius subgroup",
        1e-10,
        |_| {
            let streams = Streams::new(seed, "harness.t2.invariance");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let env = family.sample_params(rng);
                    let a = env["a"];
                    let map = family.instantiate(&env).ok()?;
                    let z = probe.random_interior_point(rng).ok()?;
                    let w = map.apply(&z).ok()?;
                    let weight = (ONE - a.conj() * z[0]).norm_sqr();
                    let lhs = domain.eval_rho(&w).ok()? * weight;
                    let rhs = (1.0 - a.norm_sqr()) * domain.eval_rho(&z).ok()?;
                    let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
                    Some((rel, json!({ "a": a.re, "z": z })))
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

    ctx.run(
        "t2.retraction",
        "scaling z2 by tau in [0, 1] never increases the defining function (the fiber term is homogeneous of positive degree)",
        &claim,
        1e-12,
        |_| {
            let streams = Streams::new(seed, "harness.t2.retraction");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let z = probe.random_interior_point(rng).ok()?;
                    let tau: f64 = rng.random_range(0.0..=1.0);
                    let scaled = vec![z[0], tau * z[1]];
                    let before = domain.eval_rho(&z).ok()?;
                    let after = domain.eval_rho(&scaled).ok()?;
                    Some((
                        (after - before).max(0.0),
                        json!({ "z": z, "tau": tau, "before": before, "after": after }),
                    ))
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

    ctx.run(
        "t2.transform-interior",
        "the unbounding transform maps every sampled interior point into the rigid model (image defining function stays negative)",
        &model_claim,
        1e-9,
        |_| {
            let streams = Streams::new(seed, "harness.t2.transform-interior");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.identity_samples(), &streams, |rng| {
                    let z = probe.random_interior_point(rng).ok()?;
                    let w = cayley.apply(&z).ok()?;
                    let val = unbounded.eval_rho(&w).ok()?;
                    Some((val, json!({ "z": z, "image": w, "rho_image": val })))
                });
            if used == 0 {
                return Outcome::Skip {
                    note: format!("all {skipped} samples failed to evaluate"),
                };
            }
            Outcome::Residual {
                value: worst.max(0.0),
                witness,
            }
        },
    );

    ctx.run(
        "t2.transform-boundary",
        "the unbounding transform carries located boundary points onto the model boundary",
        &model_claim,
        1e-8,
        |_| {
            let streams = Streams::new(seed, "harness.t2.transform-boundary");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.tenth_samples(), &streams, |rng| {
                    let hit = probe.random_boundary_point(rng).ok()?;
                    let w = cayley.apply(&hit.point).ok()?;
                    let val = unbounded.eval_rho(&w).ok()?;
                    Some((val.abs(), json!({ "z": hit.point, "image": w })))
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

    ctx.run(
        "t2.branch",
        "the fractional power in the transform never crosses its branch cut along interior segments",
        &model_claim,
        1e-6,
        |_| match cayley.verify_branch_continuity(&probe, 100, seed) {
            Ok(bc) => Outcome::Residual {
                value: bc.max_jump,
                witness: json!({
                    "segments": bc.segments,
                    "used": bc.used,
                    "skipped": bc.skipped,
                    "crossings": bc.crossings,
                    "worst_point": bc.worst_point,
                }),
            },
            Err(e) => Outcome::Skip {
                note: format!("segment sampling failed: {e}"),
            },
        },
    );

    let corner = vec![Complex64::new(-0.75, 0.0), Complex64::new(1.0, 0.0)];
    ctx.run(
        "t2.corner-membership",
        "the corner point (-3/4, 1) lies exactly on the model boundary",
        &model_claim,
        1e-12,
        |_| match unbounded.eval_rho(&corner) {
            Ok(v) => Outcome::Residual {
                value: v.abs(),
                witness: json!({ "z": corner, "rho": v }),
            },
            Err(e) => Outcome::Skip {
                note: format!("evaluation failed: {e}"),
            },
        },
    );

    ctx.run(
        "t2.corner-levi",
        "restricted Levi form at (-3/4, 1) is negative: the coefficient in the graph frame (-g2/g1, 1) is exactly -1 (the orthonormal-frame eigenvalue is the same value scaled by the frame norm, -1/10)",
        "theorem 2: the model domain is not pseudoconvex at the corner point",
        1e-9,
        |_| {
            let coeff = match model_probe.graph_frame_coefficient(&corner) {
                Ok(c) => c,
                Err(e) => {
                    return Outcome::Skip {
                        note: format!("graph-frame coefficient failed: {e}"),
                    }
                }
            };
            let report = match model_probe.report(&corner) {
                Ok(r) => r,
                Err(e) => {
                    return Outcome::Skip {
                        note: format!("Levi analysis failed: {e}"),
                    }
                }
            };
            Outcome::Residual {
                value: (coeff + 1.0).abs(),
                witness: json!({
                    "graph_frame_coefficient": coeff,
                    "orthonormal_eigenvalues": report.eigenvalues,
                    "gradient": report.grad,
                    "boundary_residual": report.residual,
                }),
            }
        },
    );

    ctx.run(
        "t2.gradient-identity",
        "on the boundary away from (1, 0), d(rho)/dz1 equals (1/(z1-1)) (-(z2/2) d(rho)/dz2 + 1 - conj(z1))",
        &claim,
        1e-9,
        |_| {
            let streams = Streams::new(seed, "harness.t2.gradient");
            let (worst, witness, used, skipped) =
                parallel_worst(cfg.tenth_samples(), &streams, |rng| {
                    let hit = probe.random_boundary_point(rng).ok()?;
                    let z = hit.point;
                    let from_exceptional =
                        ((z[0] - ONE).norm_sqr() + z[1].norm_sqr()).sqrt();
                    if from_exceptional < 0.05 {
                        return None;
                    }
                    let g = probe.gradient(&z).ok()?;
                    let rhs = (ONE / (z[0] - ONE)) * (-(z[1] / 2.0) * g[1] + ONE - z[0].conj());
                    let rel = (g[0] - rhs).norm() / g[0].norm().max(1.0);
                    Some((rel, json!({ "z": z, "lhs": g[0], "rhs": rhs })))
                });
            if used == 0 {
                return Outcome::Skip {
                    note: format!("all {skipped} boundary samples were unusable"),
                };
            }
            Outcome::Residual {
                value: worst,
                witness,
            }
        },
    );

    ctx.run(
        "t2.exceptional",
        "Levi analysis refuses to run at and near the exceptional boundary point (1, 0), reporting a degenerate gradient instead of numbers",
        &claim,
        0.5,
        |_| {
            let mut failures = 0u32;
            let mut grade = |refused: Option<String>, other: String| match refused {
                Some(msg) => format!("refused: {msg}"),
                None => {
                    failures += 1;
                    other
                }
            };
            let w1 = match probe.report(&[ONE, Complex64::new(0.0, 0.0)]) {
                Err(e @ LeviError::DegenerateGradient { .. }) => grade(Some(e.to_string()), String::new()),
                Err(e) => grade(None, format!("wrong error: {e}")),
                Ok(_) => grade(None, "analysis ran and returned numbers".into()),
            };
            let w2 = match probe.graph_frame_coefficient(&[
                Complex64::new(1.0 - 5e-4, 0.0),
                Complex64::new(1e-4, 0.0),
            ]) {
                Err(e @ LeviError::DegenerateGradient { .. }) => grade(Some(e.to_string()), String::new()),
                Err(e) => grade(None, format!("wrong error: {e}")),
                Ok(c) => grade(None, format!("analysis ran and returned {c}")),
            };
            Outcome::Residual {
                value: f64::from(failures),
                witness: json!({ "at_exceptional": w1, "near_exceptional": w2 }),
            }
        },
    );

    ctx.run(
        "t2.orbit",
        "the subgroup orbit of the origin accumulates at the smooth boundary point (-1, 0): images for a = +/-(1 - 1e-8) land within 1e-6 of (-/+1, 0), which is on the boundary with a nondegenerate gradient",
        "theorem 2: orbit accumulation at a smooth boundary point",
        1e-6,
        |_| {
            let mut worst = 0.0f64;
            let mut images = Vec::new();
            for sign in [1.0f64, -1.0] {
                let a = sign * (1.0 - 1e-8);
                let mut env = crate::expr::ParamEnv::new();
                env.insert("a".to_string(), Complex64::new(a, 0.0));
                let map = match family.instantiate(&env) {
                    Ok(m) => m,
                    Err(e) => {
                        return Outcome::Skip {
                            note: format!("instantiation failed at a = {a}: {e}"),
                        }
                    }
                };
                let img = match map.apply(&[Complex64::new(0.0, 0.0); 2]) {
                    Ok(w) => w,
                    Err(e) => {
                        return Outcome::Skip {
                            note: format!("application failed at a = {a}: {e}"),
                        }
                    }
                };
                let target = [Complex64::new(-sign, 0.0), Complex64::new(0.0, 0.0)];
                let dist = img
                    .iter()
                    .zip(&target)
                    .map(|(u, v)| (u - v).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(dist);
                images.push(json!({ "a": a, "image": img, "distance": dist }));
            }
            let limit = [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)];
            let on_boundary = match domain.eval_rho(&limit) {
                Ok(v) => v.abs(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(on_boundary);
            let grad_norm = match probe.gradient(&limit) {
                Ok(g) => l2(&g),
                Err(_) => 0.0,
            };
            if grad_norm < 1e-3 {
                worst = f64::INFINITY;
            }
            Outcome::Residual {
                value: worst,
                witness: json!({
                    "images": images,
                    "rho_at_limit": on_boundary,
                    "gradient_norm_at_limit": grad_norm,
                }),
            }
        },
    );

    Ok(ctx.finish("theorem2"))
}

fn box_sample(rng: &mut rand_chacha::ChaCha8Rng) -> Vec<Complex64> {
    (0..2)
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect()
}

fn l2(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
