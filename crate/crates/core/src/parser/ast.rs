use std::fmt;

use num_bigint::BigInt;

/// Syntax tree of a defining-function expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    Number(BigInt),
    ImaginaryUnit,
    Variable(String),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    /// Exponents are nonnegative integer literals.
    Pow(Box<ExprAst>, u32),
}

impl ExprAst {
    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Add(..) | ExprAst::Sub(..) => 1,
            ExprAst::Mul(..) | ExprAst::Div(..) => 2,
            ExprAst::Neg(..) => 3,
            ExprAst::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &ExprAst, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ExprAst {
    /// Minimal parenthesization; the output parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExprAst::*;
        match self {
            Number(v) => write!(f, "{v}"),
            ImaginaryUnit => write!(f, "i"),
            Variable(v) => write!(f, "{v}"),
            Neg(a) => {
                write!(f, "-")?;
                child(f, a, 3)
            }
            Add(a, b) | Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " {} ", if matches!(self, Add(..)) { '+' } else { '-' })?;
                child(f, b, 2)
            }
            Mul(a, b) | Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "{}", if matches!(self, Mul(..)) { '*' } else { '/' })?;
                child(f, b, 3)
            }
            Pow(a, e) => {
                child(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}
