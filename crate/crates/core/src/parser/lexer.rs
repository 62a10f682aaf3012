use num_bigint::BigInt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Integer(BigInt),
    Ident(String),
    Imag,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character.
    pub pos: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let ch = text[pos..].chars().next().expect("in bounds");
        let start = pos;
        if ch.is_whitespace() {
            pos += ch.len_utf8();
            continue;
        }
        let single = match ch {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, pos });
            pos += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let value: BigInt = text[start..pos].parse().expect("digits");
            out.push(Token {
                kind: TokenKind::Integer(value),
                pos: start,
            });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &text[start..pos];
            let kind = if word == "i" {
                TokenKind::Imag
            } else {
                TokenKind::Ident(word.to_string())
            };
            out.push(Token { kind, pos: start });
            continue;
        }
        return Err(ParseError::UnknownCharacter { ch, pos });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("-wb + 12*z1b^2").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Minus,
                TokenKind::Ident("wb".into()),
                TokenKind::Plus,
                TokenKind::Integer(12.into()),
                TokenKind::Star,
                TokenKind::Ident("z1b".into()),
                TokenKind::Caret,
                TokenKind::Integer(2.into()),
            ]
        );
        assert_eq!(toks[3].pos, 6);
    }

    #[test]
    fn unknown_character() {
        assert_eq!(
            tokenize("z1 $ 2"),
            Err(ParseError::UnknownCharacter { ch: '$', pos: 3 })
        );
    }
}
