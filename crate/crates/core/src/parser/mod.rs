//! Textual defining functions.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := expr ('+' | '-') term | term
//! term   := term ('*' | '/') unary | unary
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'i' | identifier | '(' expr ')'
//! ```
//!
//! Rationals are written `p/q`, conjugate variables carry a `b` suffix
//! (`z1b`, `wb`) and `i` is the imaginary unit.

mod ast;
mod lexer;
mod pratt;

pub use ast::ExprAst;
pub use lexer::{tokenize, Token, TokenKind};
pub use pratt::parse;

use std::sync::Arc;

use crate::scalar::Coefficient;
use crate::series::{SeriesError, TruncatedSeries, VariableContext};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at position {pos}")]
    UnknownCharacter { ch: char, pos: usize },
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::UnknownCharacter { pos, .. } | ParseError::Syntax { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not declared in the context")]
    UndeclaredVariable(String),
    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,
    #[error("the coefficient field has no imaginary unit")]
    NoImaginaryUnit,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluates an AST to a series truncated at `order`.
pub fn evaluate<C: Coefficient>(
    ast: &ExprAst,
    ctx: &Arc<VariableContext>,
    order: u32,
) -> Result<TruncatedSeries<C>, EvalError> {
    use ExprAst::*;
    Ok(match ast {
        Number(v) => TruncatedSeries::constant(ctx, C::from_rational(v.clone().into()), order),
        ImaginaryUnit => {
            let i = C::imaginary_unit().ok_or(EvalError::NoImaginaryUnit)?;
            TruncatedSeries::constant(ctx, i, order)
        }
        Variable(name) => {
            let idx = ctx
                .index_of(name)
                .ok_or_else(|| EvalError::UndeclaredVariable(name.clone()))?;
            TruncatedSeries::var(ctx, idx, order)
        }
        Neg(a) => -evaluate::<C>(a, ctx, order)?,
        Add(a, b) => evaluate::<C>(a, ctx, order)? + evaluate::<C>(b, ctx, order)?,
        Sub(a, b) => evaluate::<C>(a, ctx, order)? - evaluate::<C>(b, ctx, order)?,
        Mul(a, b) => evaluate::<C>(a, ctx, order)? * evaluate::<C>(b, ctx, order)?,
        Div(a, b) => {
            let den = evaluate::<C>(b, ctx, order)?;
            let inv = den
                .invert_unit()
                .map_err(|_| EvalError::DivisionByNonUnit)?;
            evaluate::<C>(a, ctx, order)? * inv
        }
        Pow(a, e) => evaluate::<C>(a, ctx, order)?.pow(*e),
    })
}

/// Parses and evaluates in one step.
pub fn parse_series<C: Coefficient>(
    text: &str,
    ctx: &Arc<VariableContext>,
    order: u32,
) -> Result<TruncatedSeries<C>, ExprError> {
    let ast = parse(text)?;
    Ok(evaluate(&ast, ctx, order)?)
}
