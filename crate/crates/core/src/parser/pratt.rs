use num_traits::ToPrimitive;

use super::ast::ExprAst;
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;

const UNARY_BP: u8 = 5;
const POW_BP: u8 = 7;

/// Parses a full expression; trailing tokens are an error.
pub fn parse(text: &str) -> Result<ExprAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        next: 0,
        end: text.len(),
    };
    let ast = p.expr(0)?;
    if let Some(tok) = p.peek() {
        return Err(ParseError::Syntax {
            pos: tok.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    next: usize,
    end: usize,
}

fn infix_bp(kind: &TokenKind) -> Option<(u8, u8)> {
    match kind {
        TokenKind::Plus | TokenKind::Minus => Some((1, 2)),
        TokenKind::Star | TokenKind::Slash => Some((3, 4)),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.next)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.next).cloned();
        self.next += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn error<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos,
            message: message.into(),
        })
    }

    fn expr(&mut self, min_bp: u8) -> Result<ExprAst, ParseError> {
        let mut lhs = self.prefix()?;
        let mut raised = false;
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Caret {
                if POW_BP < min_bp {
                    break;
                }
                let caret = tok.pos;
                self.bump();
                if raised {
                    return self.error(caret, "chained exponents need parentheses");
                }
                lhs = ExprAst::Pow(Box::new(lhs), self.exponent()?);
                raised = true;
                continue;
            }
            let Some((l_bp, r_bp)) = infix_bp(&tok.kind) else {
                if tok.kind == TokenKind::RParen {
                    break;
                }
                return self.error(tok.pos, "expected an operator");
            };
            if l_bp < min_bp {
                break;
            }
            let op = self.bump().expect("peeked").kind;
            raised = false;
            let rhs = self.expr(r_bp)?;
            let (a, b) = (Box::new(lhs), Box::new(rhs));
            lhs = match op {
                TokenKind::Plus => ExprAst::Add(a, b),
                TokenKind::Minus => ExprAst::Sub(a, b),
                TokenKind::Star => ExprAst::Mul(a, b),
                _ => ExprAst::Div(a, b),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<ExprAst, ParseError> {
        let pos = self.here();
        let Some(tok) = self.bump() else {
            return self.error(pos, "unexpected end of input");
        };
        match tok.kind {
            TokenKind::Integer(v) => Ok(ExprAst::Number(v)),
            TokenKind::Imag => Ok(ExprAst::ImaginaryUnit),
            TokenKind::Ident(name) => Ok(ExprAst::Variable(name)),
            TokenKind::Minus => Ok(ExprAst::Neg(Box::new(self.expr(UNARY_BP)?))),
            TokenKind::LParen => {
                let inner = self.expr(0)?;
                let close = self.here();
                match self.bump() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => Ok(inner),
                    _ => self.error(close, "expected `)`"),
                }
            }
            _ => self.error(tok.pos, "expected an operand"),
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token {
                kind: TokenKind::Integer(v),
                ..
            }) => match v.to_u32() {
                Some(e) => Ok(e),
                None => self.error(pos, "exponent too large"),
            },
            _ => self.error(pos, "exponent must be a nonnegative integer literal"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ExprAst::*;

    fn var(s: &str) -> Box<ExprAst> {
        Box::new(Variable(s.into()))
    }

    fn num(v: i64) -> Box<ExprAst> {
        Box::new(Number(v.into()))
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("a + b*c^2").unwrap(),
            Add(
                var("a"),
                Box::new(Mul(var("b"), Box::new(Pow(var("c"), 2))))
            )
        );
        assert_eq!(parse("-x^2").unwrap(), Neg(Box::new(Pow(var("x"), 2))));
        assert_eq!(
            parse("a - b - c").unwrap(),
            Sub(Box::new(Sub(var("a"), var("b"))), var("c"))
        );
        assert_eq!(
            parse("1/2*z").unwrap(),
            Mul(Box::new(Div(num(1), num(2))), var("z"))
        );
        assert_eq!(
            parse("a*-b").unwrap(),
            Mul(var("a"), Box::new(Neg(var("b"))))
        );
    }

    #[test]
    fn error_positions() {
        let cases: &[(&str, usize)] = &[
            ("z1 +", 4),
            ("(z1 + z2", 8),
            ("z1 z2", 3),
            ("z1^-2", 3),
            ("z1^2^3", 4),
            ("z1^x", 3),
            ("*z1", 0),
            ("z1 + )", 5),
        ];
        for (text, pos) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!(err.position(), *pos, "{text}: {err}");
        }
        assert!(parse("(z1^2)^3").is_ok());
    }

    fn arb_ast() -> impl Strategy<Value = ExprAst> {
        let leaf = prop_oneof![
            (0u32..20).prop_map(|v| Number(v.into())),
            Just(ImaginaryUnit),
            prop::sample::select(vec!["z1", "z2b", "wb", "x"]).prop_map(|s| Variable(s.into())),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Div(Box::new(a), Box::new(b))),
                (inner, 0u32..4).prop_map(|(a, e)| Pow(Box::new(a), e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_roundtrip(ast in arb_ast()) {
            let text = ast.to_string();
            prop_assert_eq!(parse(&text).unwrap(), ast);
        }
    }
}
