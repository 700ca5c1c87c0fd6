//! Pointwise evaluation and parameter substitution.

use super::{Branch, Expr, ParamEnv, EPS_REAL};
use num_complex::Complex64;
use thiserror::Error;

/// Magnitudes at or below this are treated as exact zeros in denominators.
pub(crate) const EPS_DIV: f64 = 1e-300;

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("fractional power evaluated exactly on its {branch} branch cut")]
    OnBranchCut { branch: &'static str },
    #[error("real power applied to a non-real base (|Im| = {imag:.3e})")]
    NonRealBase { imag: f64 },
    #[error("real power applied to a negative base ({value:.6e})")]
    NegativeBase { value: f64 },
    #[error("zero raised to a non-positive power")]
    ZeroToNonPositive,
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("expression references z{index} but only {have} coordinates were supplied")]
    VarOutOfRange { index: usize, have: usize },
}

impl Expr {
    /// Evaluates at `z` with no parameters in scope.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, EvalError> {
        self.eval_with(z, &ParamEnv::new())
    }

    /// Evaluates at `z`, resolving parameters from `params`.
    pub fn eval_with(&self, z: &[Complex64], params: &ParamEnv) -> Result<Complex64, EvalError> {
        match self {
            Expr::Lit(c) => Ok(*c),
            Expr::Var(j) => z
                .get(j - 1)
                .copied()
                .ok_or(EvalError::VarOutOfRange {
                    index: *j,
                    have: z.len(),
                }),
            Expr::Param(name) => params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter(name.clone())),
            Expr::Conj(a) => Ok(a.eval_with(z, params)?.conj()),
            Expr::Re(a) => Ok(Complex64::new(a.eval_with(z, params)?.re, 0.0)),
            Expr::Im(a) => Ok(Complex64::new(a.eval_with(z, params)?.im, 0.0)),
            Expr::Abs(a) => Ok(Complex64::new(a.eval_with(z, params)?.norm(), 0.0)),
            Expr::Abs2(a) => Ok(Complex64::new(a.eval_with(z, params)?.norm_sqr(), 0.0)),
            Expr::Add(a, b) => Ok(a.eval_with(z, params)? + b.eval_with(z, params)?),
            Expr::Sub(a, b) => Ok(a.eval_with(z, params)? - b.eval_with(z, params)?),
            Expr::Mul(a, b) => Ok(a.eval_with(z, params)? * b.eval_with(z, params)?),
            Expr::Div(a, b) => {
                let den = b.eval_with(z, params)?;
                if den.norm() <= EPS_DIV {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(a.eval_with(z, params)? / den)
            }
            Expr::IntPow(a, k) => {
                let v = a.eval_with(z, params)?;
                if *k < 0 && v.norm() <= EPS_DIV {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(v.powi(*k))
            }
            Expr::RealPow(a, alpha) => {
                let v = a.eval_with(z, params)?;
                let tol = EPS_REAL * (1.0 + v.norm());
                if v.im.abs() > tol {
                    return Err(EvalError::NonRealBase { imag: v.im.abs() });
                }
                if v.re < -tol {
                    return Err(EvalError::NegativeBase { value: v.re });
                }
                let x = v.re.max(0.0);
                if x == 0.0 {
                    if *alpha > 0.0 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    return Err(EvalError::ZeroToNonPositive);
                }
                Ok(Complex64::new(x.powf(*alpha), 0.0))
            }
            Expr::FracPow {
                base,
                num,
                den,
                branch,
            } => {
                let v = base.eval_with(z, params)?;
                frac_pow_value(v, *num, *den, *branch)
            }
        }
    }

    /// Evaluates coordinate-free, parameter-free subtrees into literals.
    ///
    /// Subtrees that fail to evaluate (a constant sitting exactly on a
    /// branch cut, a constant division by zero) are left untouched so the
    /// error still surfaces at evaluation time.
    pub fn fold_z_free(&self) -> Expr {
        if self.is_z_free() && self.is_param_free() {
            if let Ok(v) = self.eval(&[]) {
                return Expr::Lit(v);
            }
        }
        match self {
            Expr::Lit(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Conj(a) => Expr::conj(a.fold_z_free()),
            Expr::Re(a) => Expr::re_of(a.fold_z_free()),
            Expr::Im(a) => Expr::im_of(a.fold_z_free()),
            Expr::Abs(a) => Expr::abs_of(a.fold_z_free()),
            Expr::Abs2(a) => Expr::abs2_of(a.fold_z_free()),
            Expr::Add(a, b) => Expr::add(a.fold_z_free(), b.fold_z_free()),
            Expr::Sub(a, b) => Expr::sub(a.fold_z_free(), b.fold_z_free()),
            Expr::Mul(a, b) => Expr::mul(a.fold_z_free(), b.fold_z_free()),
            Expr::Div(a, b) => Expr::div(a.fold_z_free(), b.fold_z_free()),
            Expr::IntPow(a, k) => Expr::int_pow(a.fold_z_free(), *k),
            Expr::RealPow(a, alpha) => Expr::real_pow(a.fold_z_free(), *alpha),
            Expr::FracPow {
                base,
                num,
                den,
                branch,
            } => Expr::frac_pow(base.fold_z_free(), *num, *den, *branch),
        }
    }

    /// Replaces bound parameters by literals, refolding as it rebuilds.
    pub fn substitute(&self, params: &ParamEnv) -> Expr {
        match self {
            Expr::Lit(c) => Expr::Lit(*c),
            Expr::Var(j) => Expr::Var(*j),
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Lit(*v),
                None => Expr::Param(name.clone()),
            },
            Expr::Conj(a) => Expr::conj(a.substitute(params)),
            Expr::Re(a) => Expr::re_of(a.substitute(params)),
            Expr::Im(a) => Expr::im_of(a.substitute(params)),
            Expr::Abs(a) => Expr::abs_of(a.substitute(params)),
            Expr::Abs2(a) => Expr::abs2_of(a.substitute(params)),
            Expr::Add(a, b) => Expr::add(a.substitute(params), b.substitute(params)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(params), b.substitute(params)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(params), b.substitute(params)),
            Expr::Div(a, b) => Expr::div(a.substitute(params), b.substitute(params)),
            Expr::IntPow(a, k) => Expr::int_pow(a.substitute(params), *k),
            Expr::RealPow(a, alpha) => Expr::real_pow(a.substitute(params), *alpha),
            Expr::FracPow {
                base,
                num,
                den,
                branch,
            } => Expr::frac_pow(base.substitute(params), *num, *den, *branch),
        }
    }
}

/// `v^(num/den)` on the chosen branch; errors exactly on the cut.
fn frac_pow_value(
    v: Complex64,
    num: i32,
    den: i32,
    branch: Branch,
) -> Result<Complex64, EvalError> {
    debug_assert!(den > 0);
    match branch {
        Branch::Principal => {
            if v.im == 0.0 && v.re < 0.0 {
                return Err(EvalError::OnBranchCut {
                    branch: branch.name(),
                });
            }
        }
        Branch::PosCut => {
            if v.im == 0.0 && v.re > 0.0 {
                return Err(EvalError::OnBranchCut {
                    branch: branch.name(),
                });
            }
        }
    }
    let e = f64::from(num) / f64::from(den);
    let r = v.norm();
    if r <= EPS_DIV {
        if e > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(EvalError::ZeroToNonPositive);
    }
    let theta = match branch {
        Branch::Principal => v.arg(),
        Branch::PosCut => {
            let t = v.arg();
            if t < 0.0 {
                t + std::f64::consts::TAU
            } else {
                t
            }
        }
    };
    Ok(Complex64::from_polar(r.powf(e), e * theta))
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, ParamEnv};
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluates_defining_function_shapes() {
        let rho = Expr::parse("abs2(z1) + abs2(z2)^2 - 1", 2).unwrap();
        let v = rho.eval(&[c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
        assert_relative_eq!(v.re, 0.25 + 0.0625 - 1.0, max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn principal_square_root_matches_known_values() {
        let e = Expr::parse("z1^(1/2, principal)", 1).unwrap();
        let v = e.eval(&[c(0.0, 2.0)]).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(v.im, 1.0, max_relative = 1e-12);
        // On the positive axis the principal branch is the real root.
        let v = e.eval(&[c(4.0, 0.0)]).unwrap();
        assert_relative_eq!(v.re, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn branch_cuts_are_detected_exactly() {
        let principal = Expr::parse("z1^(1/2, principal)", 1).unwrap();
        assert_eq!(
            principal.eval(&[c(-1.0, 0.0)]).unwrap_err(),
            EvalError::OnBranchCut {
                branch: "principal"
            }
        );
        let poscut = Expr::parse("z1^(1/2, poscut)", 1).unwrap();
        assert_eq!(
            poscut.eval(&[c(1.0, 0.0)]).unwrap_err(),
            EvalError::OnBranchCut { branch: "poscut" }
        );
        // The other branch is fine at the same points.
        let v = poscut.eval(&[c(-1.0, 0.0)]).unwrap();
        assert_relative_eq!(v.im, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn poscut_angles_continue_through_the_negative_axis() {
        let e = Expr::parse("z1^(1/2, poscut)", 1).unwrap();
        let above = e.eval(&[c(-1.0, 1e-9)]).unwrap();
        let below = e.eval(&[c(-1.0, -1e-9)]).unwrap();
        assert!((above - below).norm() < 1e-8);
    }

    #[test]
    fn real_powers_enforce_real_nonnegative_bases() {
        let e = Expr::parse("z1^2.5", 1).unwrap();
        assert!(matches!(
            e.eval(&[c(0.0, 1.0)]).unwrap_err(),
            EvalError::NonRealBase { .. }
        ));
        assert!(matches!(
            e.eval(&[c(-1.0, 0.0)]).unwrap_err(),
            EvalError::NegativeBase { .. }
        ));
        let ok = Expr::parse("abs2(z1)^2.5", 1).unwrap();
        let v = ok.eval(&[c(0.0, 2.0)]).unwrap();
        assert_relative_eq!(v.re, 32.0, max_relative = 1e-12);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = Expr::parse("1 / (z1 - 1)", 1).unwrap();
        assert_eq!(e.eval(&[c(1.0, 0.0)]).unwrap_err(), EvalError::DivisionByZero);
        let e = Expr::parse("z1^-2", 1).unwrap();
        assert_eq!(e.eval(&[c(0.0, 0.0)]).unwrap_err(), EvalError::DivisionByZero);
    }

    #[test]
    fn parameters_substitute_and_fold() {
        let e = Expr::parse("(1 - abs2(a))^(1/4, principal) * z2", 2).unwrap();
        let mut env = ParamEnv::new();
        env.insert("a".into(), c(0.6, 0.0));
        let inst = e.substitute(&env);
        assert!(inst.is_param_free());
        let v = inst.eval(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(v.re, 0.64f64.powf(0.25), max_relative = 1e-12);

        let missing = e.eval(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert_eq!(missing, EvalError::UnboundParameter("a".into()));
    }

    #[test]
    fn abs2_is_exactly_real() {
        let e = Expr::parse("abs2(z1 + i*z2)", 2).unwrap();
        let v = e.eval(&[c(0.3, 0.7), c(-0.2, 0.9)]).unwrap();
        assert_eq!(v.im, 0.0);
    }
}
