//! Canonical text form for expressions.
//!
//! The printer emits exactly the grammar the parser accepts, inserting
//! parentheses from precedence so that `parse(print(e))` rebuilds `e`
//! structurally (literals that the smart constructors would fold compare
//! equal after folding). Real exponents always carry a decimal point to keep
//! them distinct from integer exponents.

use super::Expr;
use num_complex::Complex64;
use std::fmt;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn lit_prec(c: Complex64) -> u8 {
    if c.im == 0.0 {
        if c.re < 0.0 {
            // Prints with a leading minus: fine as an operand, but a power
            // base must parenthesize it.
            PREC_POW
        } else {
            PREC_ATOM
        }
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            PREC_ATOM
        } else if c.im == -1.0 {
            PREC_POW
        } else {
            PREC_MUL
        }
    } else {
        PREC_ADD
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Lit(c) => lit_prec(*c),
        Expr::Var(_) | Expr::Param(_) => PREC_ATOM,
        Expr::Conj(_) | Expr::Re(_) | Expr::Im(_) | Expr::Abs(_) | Expr::Abs2(_) => PREC_ATOM,
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::IntPow(..) | Expr::RealPow(..) | Expr::FracPow { .. } => PREC_POW,
    }
}

fn fmt_real(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x}")
}

/// Real exponents must re-lex as REAL, so force a decimal point.
fn fmt_real_exponent(x: f64) -> String {
    let s = fmt_real(x);
    if s.contains('.') || s.contains('e') || s.contains('E') {
        s
    } else {
        format!("{s}.0")
    }
}

fn fmt_lit(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        return write!(f, "{}", fmt_real(c.re));
    }
    if c.re == 0.0 {
        return match c.im {
            1.0 => write!(f, "i"),
            -1.0 => write!(f, "-i"),
            im => write!(f, "{}*i", fmt_real(im)),
        };
    }
    let re = fmt_real(c.re);
    match c.im {
        1.0 => write!(f, "{re} + i"),
        -1.0 => write!(f, "{re} - i"),
        im if im > 0.0 => write!(f, "{re} + {}*i", fmt_real(im)),
        im => write!(f, "{re} - {}*i", fmt_real(-im)),
    }
}

fn write_prec(e: &Expr, need: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(e);
    if p < need {
        write!(f, "(")?;
        write_prec(e, PREC_ADD, f)?;
        return write!(f, ")");
    }
    match e {
        Expr::Lit(c) => fmt_lit(*c, f),
        Expr::Var(j) => write!(f, "z{j}"),
        Expr::Param(name) => write!(f, "{name}"),
        Expr::Conj(a) => fn_call("conj", a, f),
        Expr::Re(a) => fn_call("re", a, f),
        Expr::Im(a) => fn_call("im", a, f),
        Expr::Abs(a) => fn_call("abs", a, f),
        Expr::Abs2(a) => fn_call("abs2", a, f),
        Expr::Add(a, b) => binary(a, " + ", b, PREC_ADD, f),
        Expr::Sub(a, b) => binary(a, " - ", b, PREC_ADD, f),
        Expr::Mul(a, b) => binary(a, " * ", b, PREC_MUL, f),
        Expr::Div(a, b) => binary(a, " / ", b, PREC_MUL, f),
        Expr::IntPow(a, k) => {
            write_prec(a, PREC_ATOM, f)?;
            write!(f, "^{k}")
        }
        Expr::RealPow(a, alpha) => {
            write_prec(a, PREC_ATOM, f)?;
            write!(f, "^{}", fmt_real_exponent(*alpha))
        }
        Expr::FracPow {
            base,
            num,
            den,
            branch,
        } => {
            write_prec(base, PREC_ATOM, f)?;
            write!(f, "^({num}/{den}, {})", branch.name())
        }
    }
}

fn fn_call(name: &str, arg: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{name}(")?;
    write_prec(arg, PREC_ADD, f)?;
    write!(f, ")")
}

fn binary(a: &Expr, op: &str, b: &Expr, p: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_prec(a, p, f)?;
    write!(f, "{op}")?;
    write_prec(b, p + 1, f)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, PREC_ADD, f)
    }
}
