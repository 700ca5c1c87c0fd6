//! Negative control: the scenario checks must actually be able to fail.
//! A small non-invariant perturbation of the theorem-1 defining function is
//! run through the same scenario, and the symmetry checks must flag it.

use domkit::expr::{DomainSpec, Expr};
use domkit::harness::{run_theorem1_on, CheckStatus, RunConfig};
use domkit::Complex64;

/// The theorem-1 defining function plus `0.1 |z2|^2 Re(z2)`, which breaks
/// every rotation acting on `z2` while keeping the function real-valued and
/// the origin interior.
fn corrupted_domain() -> DomainSpec {
    let text = "abs2(z1) + abs2(z2)^2 + abs2(z3)^2 \
                + (conj(z2)*z3 + conj(z3)*z2)^2 \
                + (1/10)*abs2(z2)*re(z2) - 1";
    let rho = Expr::parse(text, 3).expect("perturbed text parses");
    DomainSpec::new(
        "thm1_perturbed",
        3,
        rho,
        vec![Complex64::new(0.0, 0.0); 3],
        "negative control: non-circular perturbation",
    )
    .expect("perturbed domain is a valid spec")
}

#[test]
fn perturbed_domain_fails_the_torus_invariance_checks() {
    let cfg = RunConfig {
        samples: Some(2_000),
        ..RunConfig::default()
    };
    let report = run_theorem1_on(&corrupted_domain(), &cfg).expect("scenario still runs");

    assert_eq!(
        report.overall,
        CheckStatus::Fail,
        "a non-invariant domain must fail the scenario"
    );

    let torus2 = report
        .checks
        .iter()
        .find(|c| c.id == "t1.torus2")
        .expect("torus check present");
    assert_eq!(
        torus2.status,
        CheckStatus::Fail,
        "rotating z2 and z3 together no longer preserves rho: {:?}",
        torus2.max_residual
    );
    assert!(
        torus2.max_residual.unwrap_or(0.0) > 1e-10,
        "the broken symmetry must leave a visible residual"
    );

    let circular = report
        .checks
        .iter()
        .find(|c| c.id == "t1.circular")
        .expect("circle check present");
    assert_eq!(
        circular.status,
        CheckStatus::Fail,
        "simultaneous rotation is broken too"
    );
}

#[test]
fn perturbed_domain_still_passes_the_checks_its_perturbation_preserves() {
    let cfg = RunConfig {
        samples: Some(2_000),
        ..RunConfig::default()
    };
    let report = run_theorem1_on(&corrupted_domain(), &cfg).expect("scenario still runs");

    for id in ["t1.reality", "t1.bounded"] {
        let check = report
            .checks
            .iter()
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("{id} present"));
        assert_eq!(
            check.status,
            CheckStatus::Pass,
            "{id} should survive a real-valued bounded perturbation: {:?}",
            check.max_residual
        );
    }
}
