use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{Polynomial, Rational, RingSpec};

/// `position` is a 0-based character offset into the parsed text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at {position}")]
    UnknownVariable { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownVariable { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Num(s.parse().unwrap()), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
            } else if "+-*^()/".contains(c) {
                toks.push((Tok::Op(c), i));
                i += 1;
            } else {
                return Err(ParseError::Syntax {
                    position: i,
                    message: format!("unexpected character '{c}'"),
                });
            }
        }
        toks.push((Tok::End, chars.len()));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ring: &'a RingSpec,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.pos(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Op('*') {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => {
                let e: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                    position: pos,
                    message: "exponent too large".into(),
                })?;
                Ok(base.pow(e))
            }
            _ => Err(ParseError::Syntax {
                position: pos,
                message: "'^' must be followed by a nonnegative integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.ring.nvars();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(a) => {
                if *self.peek() == Tok::Op('/') {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Tok::Num(b) if !b.is_zero() => {
                            Ok(Polynomial::constant(n, Rational::new(a, b)))
                        }
                        Tok::Num(_) => Err(ParseError::Syntax {
                            position: dpos,
                            message: "zero denominator".into(),
                        }),
                        _ => Err(ParseError::Syntax {
                            position: dpos,
                            message: "'/' only forms rational literals p/q".into(),
                        }),
                    }
                } else {
                    Ok(Polynomial::constant(n, Rational::from_integer(a)))
                }
            }
            Tok::Ident(name) => match self.ring.var_index(&name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(ParseError::UnknownVariable { name, position: pos }),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                if *self.peek() != Tok::Op(')') {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(ParseError::Syntax { position: pos, message: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ParseError::Syntax { position: pos, message: format!("unexpected '{c}'") }),
        }
    }
}

/// Parse an expanded polynomial in the variables of `ring`.
pub fn parse_polynomial(text: &str, ring: &RingSpec) -> Result<Polynomial, ParseError> {
    let lex = Lexer::new(text)?;
    let mut p = Parser { toks: lex.toks, at: 0, ring };
    let out = p.expr()?;
    match p.peek() {
        Tok::End => Ok(out),
        Tok::Ident(_) | Tok::Num(_) | Tok::Op('(') => {
            p.err("juxtaposition is not multiplication; use '*'")
        }
        _ => p.err("unexpected token"),
    }
}

pub(super) fn print_polynomial(p: &Polynomial, ring: &RingSpec) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(ring.name(i).to_string()),
                _ => factors.push(format!("{}^{}", ring.name(i), e)),
            }
        }
        if factors.is_empty() {
            out.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                out.push_str(&a.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> RingSpec {
        RingSpec::from_names("w x", "y").unwrap()
    }

    #[test]
    fn expands_example_family() {
        let r = ring();
        let p = parse_polynomial("(w^2 - y)^2 - x^2", &r).unwrap();
        assert_eq!(p.to_string_in(&r), "-x^2 + y^2 - 2*w^2*y + w^4");
    }

    #[test]
    fn rationals_and_zero() {
        let r = ring();
        assert!(parse_polynomial("0", &r).unwrap().is_zero());
        let p = parse_polynomial("1/2*w - 3/6", &r).unwrap();
        assert_eq!(p.to_string_in(&r), "-1/2 + 1/2*w");
    }

    #[test]
    fn errors_have_positions() {
        let r = ring();
        assert_eq!(
            parse_polynomial("w + q", &r),
            Err(ParseError::UnknownVariable { name: "q".into(), position: 4 })
        );
        assert_eq!(parse_polynomial("2 w", &r).unwrap_err().position(), 2);
        assert_eq!(parse_polynomial("w^y", &r).unwrap_err().position(), 2);
        assert!(parse_polynomial("w/2", &r).is_err());
        assert!(parse_polynomial("(w", &r).is_err());
        assert!(parse_polynomial("1/0", &r).is_err());
        assert!(parse_polynomial("w $", &r).is_err());
    }
}
