//! Symbolic Wirtinger derivatives.
//!
//! With `z = x + i*y`, the Wirtinger operators are
//! `d/dz = (d/dx - i*d/dy)/2` and `d/dzbar = (d/dx + i*d/dy)/2`. They act on
//! the expression trees by the usual rules plus
//! `d/dz conj(u) = conj(d/dzbar u)`, which is what lets a tree mix
//! holomorphic and antiholomorphic structure. Results are built with the
//! smart constructors, so derivatives of large polynomial-like trees collapse
//! rather than balloon.

use super::Expr;

/// Which Wirtinger operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WirtKind {
    /// `d/dz_j`
    Holo,
    /// `d/dzbar_j`
    Anti,
}

impl WirtKind {
    pub fn flip(self) -> WirtKind {
        match self {
            WirtKind::Holo => WirtKind::Anti,
            WirtKind::Anti => WirtKind::Holo,
        }
    }
}

impl Expr {
    /// Wirtinger derivative with respect to `z_j` (1-based).
    ///
    /// `Abs` contributes a singularity where its argument vanishes, and
    /// `FracPow` derivatives divide by the base; both evaluate fine away from
    /// those sets and error through [`super::EvalError`] on them.
    pub fn wirtinger(&self, j: usize, kind: WirtKind) -> Expr {
        match self {
            Expr::Lit(_) | Expr::Param(_) => Expr::lit(0.0),
            Expr::Var(k) => {
                if *k == j && kind == WirtKind::Holo {
                    Expr::lit(1.0)
                } else {
                    Expr::lit(0.0)
                }
            }
            Expr::Conj(a) => Expr::conj(a.wirtinger(j, kind.flip())),
            Expr::Re(a) => {
                // re(u) = (u + conj(u))/2
                let du = a.wirtinger(j, kind);
                let dc = Expr::conj(a.wirtinger(j, kind.flip()));
                Expr::mul(Expr::lit(0.5), Expr::add(du, dc))
            }
            Expr::Im(a) => {
                // im(u) = (u - conj(u))/(2i)
                let du = a.wirtinger(j, kind);
                let dc = Expr::conj(a.wirtinger(j, kind.flip()));
                Expr::mul(
                    Expr::Lit(num_complex::Complex64::new(0.0, -0.5)),
                    Expr::sub(du, dc),
                )
            }
            Expr::Abs2(a) => {
                // abs2(u) = u * conj(u)
                let du = a.wirtinger(j, kind);
                let dc = Expr::conj(a.wirtinger(j, kind.flip()));
                Expr::add(
                    Expr::mul(du, Expr::conj((**a).clone())),
                    Expr::mul((**a).clone(), dc),
                )
            }
            Expr::Abs(a) => {
                // abs(u) = abs2(u)^(1/2); singular where u = 0
                let du = a.wirtinger(j, kind);
                let dc = Expr::conj(a.wirtinger(j, kind.flip()));
                let numer = Expr::add(
                    Expr::mul(du, Expr::conj((**a).clone())),
                    Expr::mul((**a).clone(), dc),
                );
                Expr::div(
                    numer,
                    Expr::mul(Expr::lit(2.0), Expr::abs_of((**a).clone())),
                )
            }
            Expr::Add(a, b) => Expr::add(a.wirtinger(j, kind), b.wirtinger(j, kind)),
            Expr::Sub(a, b) => Expr::sub(a.wirtinger(j, kind), b.wirtinger(j, kind)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.wirtinger(j, kind), (**b).clone()),
                Expr::mul((**a).clone(), b.wirtinger(j, kind)),
            ),
            Expr::Div(a, b) => {
                let da = a.wirtinger(j, kind);
                let db = b.wirtinger(j, kind);
                let numer = Expr::sub(
                    Expr::mul(da, (**b).clone()),
                    Expr::mul((**a).clone(), db),
                );
                Expr::div(numer, Expr::int_pow((**b).clone(), 2))
            }
            Expr::IntPow(a, k) => {
                let du = a.wirtinger(j, kind);
                Expr::mul(
                    Expr::mul(Expr::lit(f64::from(*k)), Expr::int_pow((**a).clone(), k - 1)),
                    du,
                )
            }
            Expr::RealPow(a, alpha) => {
                let du = a.wirtinger(j, kind);
                Expr::mul(
                    Expr::mul(
                        Expr::lit(*alpha),
                        Expr::real_pow((**a).clone(), alpha - 1.0),
                    ),
                    du,
                )
            }
            Expr::FracPow { base, num, den, .. } => {
                // (p/q) * u^(p/q) * du / u keeps the branch of the original
                // power instead of introducing u^(p/q - 1) on a new branch.
                let du = base.wirtinger(j, kind);
                Expr::mul(
                    Expr::mul(
                        Expr::lit(f64::from(*num) / f64::from(*den)),
                        self.clone(),
                    ),
                    Expr::div(du, (**base).clone()),
                )
            }
        }
    }

    /// Gradient row `(d rho/dz_1, ..., d rho/dz_n)`.
    pub fn wirtinger_gradient(&self, n: usize, kind: WirtKind) -> Vec<Expr> {
        (1..=n).map(|j| self.wirtinger(j, kind)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::WirtKind;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Central-difference Wirtinger derivative from plain evaluation.
    fn wirt_fd(e: &Expr, z: &[Complex64], j: usize, kind: WirtKind) -> Complex64 {
        let h = 1e-5;
        let f = |dz: Complex64| {
            let mut w = z.to_vec();
            w[j - 1] += dz;
            e.eval(&w).unwrap()
        };
        let fx = (f(c(h, 0.0)) - f(c(-h, 0.0))) / (2.0 * h);
        let fy = (f(c(0.0, h)) - f(c(0.0, -h))) / (2.0 * h);
        let i = Complex64::i();
        match kind {
            WirtKind::Holo => 0.5 * (fx - i * fy),
            WirtKind::Anti => 0.5 * (fx + i * fy),
        }
    }

    fn check_against_fd(src: &str, n: usize, z: &[Complex64]) {
        let e = Expr::parse(src, n).unwrap();
        for j in 1..=n {
            for kind in [WirtKind::Holo, WirtKind::Anti] {
                let sym = e.wirtinger(j, kind).eval(z).unwrap();
                let fd = wirt_fd(&e, z, j, kind);
                let scale = 1.0 + sym.norm();
                assert!(
                    (sym - fd).norm() <= 1e-6 * scale,
                    "{src}: d/d{:?} z{j} symbolic {sym} vs fd {fd}",
                    kind
                );
            }
        }
    }

    #[test]
    fn matches_finite_differences_on_mixed_expressions() {
        let z2 = [c(0.31, -0.47), c(-0.23, 0.11)];
        check_against_fd("abs2(z1) + abs2(z2)^2 - 1", 2, &z2);
        check_against_fd("z1 * conj(z2) + re(z1 * z2)", 2, &z2);
        check_against_fd("im(z1^2) + abs(z1 - z2)", 2, &z2);
        check_against_fd("abs2(z1)^1.5 + abs2(z2)^0.5", 2, &z2);
        check_against_fd("re(conj(z1)*z2 + conj(z2)*z1)^2", 2, &z2);
        let z1 = [c(0.4, 0.8)];
        check_against_fd("(z1 - 2)^(1/2, principal) + 1/(z1 - 2)", 1, &z1);
        check_against_fd("(z1 - 2)^(-3/2, principal)", 1, &z1);
    }

    #[test]
    fn holomorphic_expressions_have_zero_antiholomorphic_derivative() {
        let e = Expr::parse("(z1 - 1)^3 / (z1 + 2) + z2^2", 2).unwrap();
        for j in 1..=2 {
            let d = e.wirtinger(j, WirtKind::Anti);
            let v = d.eval(&[c(0.3, 0.2), c(-0.1, 0.5)]).unwrap();
            assert_eq!(v, c(0.0, 0.0));
        }
    }

    #[test]
    fn abs2_derivative_collapses_to_the_conjugate() {
        let e = Expr::parse("abs2(z1)", 1).unwrap();
        let d = e.wirtinger(1, WirtKind::Holo);
        assert_eq!(d, Expr::conj(Expr::var(1)));
        let d = e.wirtinger(1, WirtKind::Anti);
        assert_eq!(d, Expr::var(1));
    }

    #[test]
    fn conjugation_duality_holds_numerically() {
        let e = Expr::parse("abs2(z1)^2 + re(z1*z2) + im(conj(z1)*z2^2)", 2).unwrap();
        let z = [c(0.7, -0.2), c(0.3, 0.6)];
        for j in 1..=2 {
            let holo = e.wirtinger(j, WirtKind::Holo).eval(&z).unwrap();
            let anti = e.wirtinger(j, WirtKind::Anti).eval(&z).unwrap();
            // For real-valued expressions the two derivatives are conjugate.
            assert!((holo - anti.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn second_derivatives_commute_numerically() {
        let e = Expr::parse("abs2(z1)^2 + abs2(z2)^2 + re(conj(z1)*z2)^2", 2).unwrap();
        let z = [c(0.25, 0.5), c(-0.4, 0.3)];
        let h12 = e
            .wirtinger(1, WirtKind::Holo)
            .wirtinger(2, WirtKind::Anti)
            .eval(&z)
            .unwrap();
        let h21 = e
            .wirtinger(2, WirtKind::Anti)
            .wirtinger(1, WirtKind::Holo)
            .eval(&z)
            .unwrap();
        assert!((h12 - h21).norm() < 1e-12);
    }
}
