//! Text syntax for terms and formulas.
//!
//! ```text
//! formula := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '~' unary | 'E' var '.' formula | 'A' var '.' formula
//!          | '(' formula ')' | term ('=' | '<=' | '<') term
//! term    := meet ('+' meet)*
//! meet    := comp ('.' comp)*
//! comp    := prefix (';' prefix)*
//! prefix  := '-' prefix | postfix
//! postfix := primary '^'*
//! primary := '0' | '1' | 'id' | "1'" | var | '(' term ')'
//! ```
//!
//! `E` and `A` are reserved and cannot be variable names.

use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Identity,
    Minus,
    Caret,
    Plus,
    Dot,
    Semi,
    Eq,
    Le,
    Lt,
    Tilde,
    And,
    Or,
    LParen,
    RParen,
    Exists,
    Forall,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(v) => format!("`{v}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::Identity => "`id`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Exists => "`E`".into(),
            Tok::Forall => "`A`".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0' => Some(Tok::Zero),
            b'1' if bytes.get(i + 1) == Some(&b'\'') => {
                i += 1;
                Some(Tok::Identity)
            }
            b'1' => Some(Tok::One),
            b'-' => Some(Tok::Minus),
            b'^' => Some(Tok::Caret),
            b'+' => Some(Tok::Plus),
            b'.' => Some(Tok::Dot),
            b';' => Some(Tok::Semi),
            b'=' => Some(Tok::Eq),
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Some(Tok::Le)
            }
            b'<' => Some(Tok::Lt),
            b'~' => Some(Tok::Tilde),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            i += 1;
            out.push((start, t));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word {
                "E" => Tok::Exists,
                "A" => Tok::Forall,
                "id" => Tok::Identity,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((start, tok));
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError { offset: start, message: format!("unexpected character `{ch}`") });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        Err(ParseError { offset: self.offset(), message: format!("expected {expected}, found {found}") })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(&t.describe())
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Or) {
            f = f.or(self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let exists = self.peek() == Some(&Tok::Exists);
                self.pos += 1;
                let v = match self.peek() {
                    Some(Tok::Ident(v)) => v.clone(),
                    _ => return self.error("a variable"),
                };
                self.pos += 1;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if exists { Formula::exists(&v, body) } else { Formula::forall(&v, body) })
            }
            Some(Tok::LParen) => {
                let save = self.pos;
                match self.atomic() {
                    Ok(f) => Ok(f),
                    Err(_) => {
                        self.pos = save + 1;
                        let f = self.formula()?;
                        self.expect(Tok::RParen)?;
                        Ok(f)
                    }
                }
            }
            _ => self.atomic(),
        }
    }

    fn atomic(&mut self) -> PResult<Formula> {
        let a = self.term()?;
        let rel = self.peek().cloned();
        match rel {
            Some(Tok::Eq) | Some(Tok::Le) | Some(Tok::Lt) => self.pos += 1,
            _ => return self.error("`=`, `<=` or `<`"),
        }
        let b = self.term()?;
        Ok(match rel {
            Some(Tok::Eq) => Formula::eq(a, b),
            Some(Tok::Le) => Formula::le(a, b),
            _ => Formula::lt(a, b),
        })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.meet()?;
        while self.eat(&Tok::Plus) {
            t = t.join(self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> PResult<Term> {
        let mut t = self.comp()?;
        while self.eat(&Tok::Dot) {
            t = t.meet(self.comp()?);
        }
        Ok(t)
    }

    fn comp(&mut self) -> PResult<Term> {
        let mut t = self.prefix()?;
        while self.eat(&Tok::Semi) {
            t = t.compose(self.prefix()?);
        }
        Ok(t)
    }

    fn prefix(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            return Ok(self.prefix()?.complement());
        }
        let mut t = self.primary()?;
        while self.eat(&Tok::Caret) {
            t = t.converse();
        }
        Ok(t)
    }

    fn primary(&mut self) -> PResult<Term> {
        let t = match self.peek() {
            Some(Tok::Zero) => Term::Zero,
            Some(Tok::One) => Term::One,
            Some(Tok::Identity) => Term::Identity,
            Some(Tok::Ident(v)) => Term::Var(v.clone()),
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            _ => return self.error("a term"),
        };
        self.pos += 1;
        Ok(t)
    }

    fn finish(&self) -> PResult<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}

fn parser(src: &str) -> PResult<Parser> {
    Ok(Parser { toks: lex(src)?, pos: 0, end: src.len() })
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = parser(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = parser(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_term("x + y . z ; w").unwrap(), v("x").join(v("y").meet(v("z").compose(v("w")))));
        assert_eq!(parse_term("-x^").unwrap(), v("x").converse().complement());
        assert_eq!(parse_term("(x + y)^").unwrap(), v("x").join(v("y")).converse());
        assert_eq!(parse_term("1' ; id").unwrap(), Term::Identity.compose(Term::Identity));
    }

    #[test]
    fn formulas() {
        let f = parse_formula("E x . ~(x = 0) & x <= y | A y . y < 1").unwrap();
        let expected = Formula::exists(
            "x",
            Formula::eq(v("x"), Term::Zero)
                .not()
                .and(Formula::le(v("x"), v("y")))
                .or(Formula::forall("y", Formula::lt(v("y"), Term::One))),
        );
        assert_eq!(f, expected);
        let g = parse_formula("(x + y) = z & (x = 0 | z = 1)").unwrap();
        assert_eq!(
            g,
            Formula::eq(v("x").join(v("y")), v("z"))
                .and(Formula::eq(v("x"), Term::Zero).or(Formula::eq(v("z"), Term::One)))
        );
    }

    #[test]
    fn errors_report_offsets() {
        let e = parse_formula("x = ").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_formula("x $ y").unwrap_err().message.contains('$'));
        assert!(parse_formula("E 0 . x = x").is_err());
        assert!(parse_formula("x = y)").is_err());
        assert!(parse_term("x = y").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for k in 1..6 {
            let f = crate::fo_logic::cardinality_sentence(k).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
        let t = v("x").converse().complement().compose(Term::Identity.converse()).converse();
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}
