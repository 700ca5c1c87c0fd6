//! Property tests: randomized structural invariants of the expression
//! calculus, the Levi machinery, the map families, and the quantitative
//! lemmas, checked over generated inputs rather than fixed samples.

use domkit::expr::{Expr, ParamEnv, WirtKind};
use domkit::levi::tangent_basis;
use domkit::maps::TorusAction;
use domkit::reinhardt::{BaseBlock, LemmaADomain, NormalForm};
use domkit::Complex64;
use proptest::prelude::*;

const N: usize = 2;

/// Random smooth expression in `z1..zN`: polynomial-type operations plus the
/// non-holomorphic but Wirtinger-smooth ones (conj, re, im, abs2). Division,
/// abs, and fractional powers are excluded so finite differences stay clean.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => (-2.0..2.0f64).prop_map(Expr::lit),
        4 => (1..=N).prop_map(Expr::var),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::conj),
            inner.clone().prop_map(Expr::re_of),
            inner.clone().prop_map(Expr::im_of),
            inner.clone().prop_map(Expr::abs2_of),
            (inner, 2..=3i32).prop_map(|(a, k)| Expr::int_pow(a, k)),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), N)
        .prop_map(|parts| parts.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Central-difference Wirtinger derivative: `1/2 (d/dx -+ i d/dy)`.
fn fd_wirtinger(e: &Expr, z: &[Complex64], j: usize, kind: WirtKind) -> Option<Complex64> {
    const H: f64 = 1e-5;
    let shifted = |dre: f64, dim: f64| -> Option<Complex64> {
        let mut w = z.to_vec();
        w[j - 1] += Complex64::new(dre, dim);
        e.eval(&w).ok()
    };
    let fx = (shifted(H, 0.0)? - shifted(-H, 0.0)?) / (2.0 * H);
    let fy = (shifted(0.0, H)? - shifted(0.0, -H)?) / (2.0 * H);
    let i = Complex64::new(0.0, 1.0);
    Some(match kind {
        WirtKind::Holo => 0.5 * (fx - i * fy),
        WirtKind::Anti => 0.5 * (fx + i * fy),
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wirtinger_derivatives_match_finite_differences(e in arb_expr(), z in arb_point(), j in 1..=N) {
        for kind in [WirtKind::Holo, WirtKind::Anti] {
            let symbolic = e.wirtinger(j, kind);
            let (Ok(sym), Some(fd)) = (symbolic.eval(&z), fd_wirtinger(&e, &z, j, kind)) else {
                continue;
            };
            prop_assume!(sym.norm() < 1e6 && fd.norm() < 1e6);
            prop_assert!(
                close(sym, fd, 1e-4),
                "d{kind:?}/dz{j} of {e}: symbolic {sym}, finite difference {fd}"
            );
        }
    }

    #[test]
    fn conjugating_an_expression_swaps_the_derivative_kinds(e in arb_expr(), z in arb_point(), j in 1..=N) {
        let conj_e = Expr::conj(e.clone());
        let lhs = conj_e.wirtinger(j, WirtKind::Anti);
        let rhs = e.wirtinger(j, WirtKind::Holo);
        if let (Ok(a), Ok(b)) = (lhs.eval(&z), rhs.eval(&z)) {
            prop_assert!(
                close(a, b.conj(), 1e-10),
                "anti-derivative of conj {a} vs conj of derivative {b}"
            );
        }
    }

    #[test]
    fn printed_expressions_reparse_to_the_same_values(e in arb_expr(), z in arb_point()) {
        let text = e.to_string();
        let reparsed = Expr::parse(&text, N);
        prop_assert!(reparsed.is_ok(), "printer emitted unparseable `{text}`");
        let reparsed = reparsed.unwrap();
        if let (Ok(a), Ok(b)) = (e.eval(&z), reparsed.eval(&z)) {
            prop_assert!(close(a, b, 1e-12), "`{text}` evals {a} then {b}");
        }
    }

    #[test]
    fn mixed_second_derivatives_of_real_expressions_are_hermitian(e in arb_expr(), z in arb_point()) {
        let real = Expr::add(e.clone(), Expr::conj(e));
        for j in 1..=N {
            for k in 1..=N {
                let h_jk = real.wirtinger(j, WirtKind::Holo).wirtinger(k, WirtKind::Anti);
                let h_kj = real.wirtinger(k, WirtKind::Holo).wirtinger(j, WirtKind::Anti);
                if let (Ok(a), Ok(b)) = (h_jk.eval(&z), h_kj.eval(&z)) {
                    prop_assert!(
                        close(a, b.conj(), 1e-9),
                        "H[{j}][{k}] = {a} is not the conjugate of H[{k}][{j}] = {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn tangent_bases_are_orthonormal_and_tangent(
        parts in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2..=5)
    ) {
        let grad: Vec<Complex64> = parts.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let norm: f64 = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let basis = tangent_basis(&grad);
        prop_assert_eq!(basis.len(), grad.len() - 1);
        let hdot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
        };
        for (r, br) in basis.iter().enumerate() {
            let pairing: Complex64 = grad.iter().zip(br).map(|(g, w)| g * w).sum();
            prop_assert!(pairing.norm() <= 1e-8 * norm, "basis vector {r} is not tangent");
            for (s, bs) in basis.iter().enumerate() {
                let expected = if r == s { 1.0 } else { 0.0 };
                prop_assert!(
                    (hdot(br, bs).norm() - expected).abs() <= 1e-8,
                    "basis vectors {r}, {s} are not orthonormal"
                );
            }
        }
    }

    #[test]
    fn torus_actions_with_declared_weights_preserve_the_quartic_domain(
        z in proptest::collection::vec((-0.6..0.6f64, -0.6..0.6f64), 3),
        thetas in proptest::collection::vec(0.0..std::f64::consts::TAU, 2)
    ) {
        let domain = domkit::catalog::theorem1_domain(3).unwrap();
        let action = TorusAction::new(3, vec![vec![1, 0, 0], vec![0, 1, 1]]);
        let z: Vec<Complex64> = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let rotated = action.apply(&thetas, &z);
        let (Ok(a), Ok(b)) = (domain.eval_rho(&z), domain.eval_rho(&rotated)) else {
            return Ok(());
        };
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "rho {a} became {b}");
    }

    #[test]
    fn moebius_family_members_invert_each_other(
        a_parts in (-0.95..0.95f64, -0.95..0.95f64),
        z in proptest::collection::vec((-0.4..0.4f64, -0.4..0.4f64), 3)
    ) {
        let a = Complex64::new(a_parts.0, a_parts.1);
        prop_assume!(a.norm() < 0.95);
        let family = domkit::catalog::theorem1_subgroup().unwrap();
        let mut env = ParamEnv::new();
        env.insert("a".into(), a);
        let forward = family.instantiate(&env).unwrap();
        env.insert("a".into(), -a);
        let backward = family.instantiate(&env).unwrap();

        let z: Vec<Complex64> = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let there = backward.apply(&z).unwrap();
        let back = forward.apply(&there).unwrap();
        for (orig, roundtrip) in z.iter().zip(&back) {
            prop_assert!(
                (orig - roundtrip).norm() <= 1e-10,
                "round trip moved {orig} to {roundtrip}"
            );
        }
    }

    #[test]
    fn scaling_down_the_fiber_never_increases_the_defining_function(
        z in proptest::collection::vec((-0.6..0.6f64, -0.6..0.6f64), 2),
        tau in 0.0..1.0f64
    ) {
        let domain = domkit::catalog::theorem2_domain().unwrap();
        let z: Vec<Complex64> = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let scaled = vec![z[0], tau * z[1]];
        let (Ok(before), Ok(after)) = (domain.eval_rho(&z), domain.eval_rho(&scaled)) else {
            return Ok(());
        };
        prop_assert!(
            after <= before + 1e-12 * (1.0 + before.abs()),
            "tau = {tau} raised rho from {before} to {after}"
        );
    }

    #[test]
    fn derivative_bound_grows_with_rho_and_decays_with_mu(
        mu1 in 0.0..0.99f64,
        mu2 in 0.0..0.99f64,
        rho1 in 0.0..=1.0f64,
        rho2 in 0.0..=1.0f64,
        phase in 0.0..std::f64::consts::TAU
    ) {
        let domain = LemmaADomain::new(2.0, 1.0).unwrap();
        let bound = |mu: f64, rho: f64, psi: f64| {
            domain
                .derivative_bound(1.0, Complex64::new(mu, 0.0), Complex64::from_polar(rho, psi))
                .unwrap()
        };
        // Depends only on |rho|, not its phase.
        let b_phase = bound(mu1, rho1, phase);
        let b_axis = bound(mu1, rho1, 0.0);
        prop_assert!((b_phase - b_axis).abs() <= 1e-12 * (1.0 + b_axis));

        // Monotone increasing in |rho| at fixed mu.
        let (lo, hi) = if rho1 <= rho2 { (rho1, rho2) } else { (rho2, rho1) };
        prop_assert!(bound(mu1, lo, 0.0) <= bound(mu1, hi, 0.0) * (1.0 + 1e-12));

        // Monotone decreasing in |mu| at fixed rho.
        let (near, far) = if mu1 <= mu2 { (mu1, mu2) } else { (mu2, mu1) };
        prop_assert!(bound(far, rho1, 0.0) <= bound(near, rho1, 0.0) * (1.0 + 1e-12));
    }

    #[test]
    fn reinhardt_membership_depends_only_on_coordinate_moduli(
        z in proptest::collection::vec((-1.5..1.5f64, -1.5..1.5f64), 2),
        phases in proptest::collection::vec(0.0..std::f64::consts::TAU, 2)
    ) {
        let z: Vec<Complex64> = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let rotated: Vec<Complex64> = z
            .iter()
            .zip(&phases)
            .map(|(c, &t)| c * Complex64::from_polar(1.0, t))
            .collect();

        let fibered = NormalForm::new(
            1,
            1,
            vec![1, 1],
            vec![vec![0.7]],
            vec![],
            vec![BaseBlock::Disc { radius: 2.0 }],
        )
        .unwrap();
        prop_assert_eq!(fibered.contains(&z).unwrap(), fibered.contains(&rotated).unwrap());

        let lemma = LemmaADomain::new(2.0, 1.0).unwrap();
        prop_assert_eq!(lemma.contains(&z).unwrap(), lemma.contains(&rotated).unwrap());
    }
}
