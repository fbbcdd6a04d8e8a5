//! Concrete grammar, loosest binding first:
//!
//! ```text
//! iff     := imp ('<->' imp)*
//! imp     := or ('->' imp)?
//! or      := and ('|' and)*
//! and     := fuse ('&' fuse)*
//! fuse    := unary ('*' unary)*
//! unary   := '!' unary | 'D' unary | 'tau' '[' c ']' unary | 'up' '[' c ']' unary | primary
//! primary := atom | '0' | '1' | 'c' '(' c ')' | '(' iff ')'
//!          | '<' name ('[' rational ']')? '>' '(' iff (',' iff)* ')'
//! ```

use crate::algebra::{parse_rational, Constant, FiniteAlgebra, Rational};
use crate::syntax::{Flavor, Formula, Modality, Signature, SyntaxError};

/// Parses `text`, checking the signature and the flavor.
pub fn parse(text: &str, signature: &Signature, flavor: Flavor, alg: &FiniteAlgebra) -> Result<Formula, SyntaxError> {
    let f = parse_any(text, signature, alg)?;
    flavor.check(&f, alg)?;
    Ok(f)
}

/// Parses `text` against an algebra and signature without restricting the
/// flavor.
pub fn parse_any(text: &str, signature: &Signature, alg: &FiniteAlgebra) -> Result<Formula, SyntaxError> {
    Parser::new(text, signature, Some(alg))?.run()
}

pub(super) fn parse_loose(text: &str) -> Result<Formula, SyntaxError> {
    Parser::new(text, &Signature::builtin(), None)?.run()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    ModalOpen,
    ModalClose,
    Comma,
    Slash,
    Bang,
    Star,
    Amp,
    Pipe,
    Arrow,
    Iff,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let rest = &text[i..];
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'/' => Tok::Slash,
            b'!' => Tok::Bang,
            b'*' => Tok::Star,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'>' => Tok::ModalClose,
            b'-' if rest.starts_with("->") => {
                i += 1;
                Tok::Arrow
            }
            b'<' if rest.starts_with("<->") => {
                i += 2;
                Tok::Iff
            }
            b'<' => Tok::ModalOpen,
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Number(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = rest.chars().next().unwrap_or('?');
                return Err(SyntaxError::Parse { position: start, message: format!("unexpected character `{ch}`") });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    signature: &'a Signature,
    alg: Option<&'a FiniteAlgebra>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, signature: &'a Signature, alg: Option<&'a FiniteAlgebra>) -> Result<Self, SyntaxError> {
        Ok(Self { toks: lex(text)?, pos: 0, signature, alg })
    }

    fn run(mut self) -> Result<Formula, SyntaxError> {
        let f = self.iff()?;
        if self.peek() != &Tok::End {
            return Err(self.error(format!("unexpected {}", describe(self.peek()))));
        }
        Ok(f)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> SyntaxError {
        SyntaxError::Parse { position: self.offset(), message }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", describe(&tok), describe(self.peek()))))
        }
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.fuse()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.fuse()?);
        }
        Ok(lhs)
    }

    fn fuse(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Formula::fuse(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                let inner = self.unary()?;
                Ok(Formula::imp(inner, Formula::Const(self.bottom())))
            }
            Tok::Ident(name) if name == "D" => {
                self.bump();
                Ok(Formula::delta(self.unary()?))
            }
            Tok::Ident(name) if name == "tau" || name == "up" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let c = self.constant()?;
                self.expect(Tok::RBracket)?;
                let inner = Box::new(self.unary()?);
                Ok(if name == "tau" { Formula::Tau(c, inner) } else { Formula::Upsilon(c, inner) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let at = self.offset();
        match self.bump() {
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Number(n) if n == "0" => Ok(Formula::Const(self.bottom())),
            Tok::Number(n) if n == "1" => Ok(Formula::Const(self.top())),
            Tok::Ident(name) if name == "c" && *self.peek() == Tok::LParen => {
                self.bump();
                let c = self.constant()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Const(c))
            }
            Tok::Ident(name) => Ok(Formula::Atom(name)),
            Tok::ModalOpen => self.modal(at),
            other => Err(SyntaxError::Parse { position: at, message: format!("unexpected {}", describe(&other)) }),
        }
    }

    fn modal(&mut self, at: usize) -> Result<Formula, SyntaxError> {
        let name = match self.bump() {
            Tok::Ident(name) => name,
            other => {
                return Err(self.error(format!("expected lifting name, found {}", describe(&other))));
            }
        };
        let param = if *self.peek() == Tok::LBracket {
            self.bump();
            let r = self.rational()?;
            self.expect(Tok::RBracket)?;
            Some(r)
        } else {
            None
        };
        self.expect(Tok::ModalClose)?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.iff()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.iff()?);
        }
        self.expect(Tok::RParen)?;
        let modality = Modality { name, param };
        self.signature.check_modality(&modality, args.len()).map_err(|e| match e {
            SyntaxError::Parse { .. } => e,
            other => SyntaxError::Parse { position: at, message: other.to_string() },
        })?;
        Ok(Formula::Modal(modality, args))
    }

    fn rational(&mut self) -> Result<Rational, SyntaxError> {
        let at = self.offset();
        let num = match self.bump() {
            Tok::Number(n) => n,
            other => {
                return Err(SyntaxError::Parse {
                    position: at,
                    message: format!("expected a number, found {}", describe(&other)),
                })
            }
        };
        let text = if *self.peek() == Tok::Slash && matches!(self.peek_at(1), Tok::Number(_)) {
            self.bump();
            let Tok::Number(den) = self.bump() else { unreachable!() };
            format!("{num}/{den}")
        } else {
            num
        };
        parse_rational(&text).ok_or(SyntaxError::Parse { position: at, message: format!("bad rational `{text}`") })
    }

    fn constant(&mut self) -> Result<Constant, SyntaxError> {
        let at = self.offset();
        let r = self.rational()?;
        let Some(alg) = self.alg else {
            return Ok(Constant::Ratio(r));
        };
        let c = if alg.is_lukasiewicz() {
            Constant::Ratio(r)
        } else if r.is_integer() && r >= Rational::from_integer(0) {
            Constant::Index(r.to_integer() as u32)
        } else {
            return Err(SyntaxError::Parse { position: at, message: format!("constant {r} is not an element index") });
        };
        alg.resolve(&c).map_err(|e| SyntaxError::Parse { position: at, message: e.to_string() })?;
        Ok(c)
    }

    fn bottom(&self) -> Constant {
        match self.alg {
            Some(alg) => alg.constant(alg.zero()),
            None => Constant::Ratio(Rational::from_integer(0)),
        }
    }

    fn top(&self) -> Constant {
        match self.alg {
            Some(alg) => alg.constant(alg.one()),
            None => Constant::Ratio(Rational::from_integer(1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l3() -> FiniteAlgebra {
        FiniteAlgebra::lukasiewicz(3).unwrap()
    }

    #[test]
    fn box_implication_shape() {
        let f = parse("<box>(p) -> p", &Signature::builtin(), Flavor::Basic, &l3()).unwrap();
        assert_eq!(f, Formula::imp(Formula::lift("box", vec![Formula::atom("p")]), Formula::atom("p")));
    }

    #[test]
    fn delta_of_constant_implication() {
        let alg = l3();
        let f = parse("D (c(1/2) -> p)", &Signature::builtin(), Flavor::Delta, &alg).unwrap();
        let half = Formula::Const(Constant::Ratio(Rational::new(1, 2)));
        assert_eq!(f, Formula::delta(Formula::imp(half, Formula::atom("p"))));
    }

    #[test]
    fn tau_is_rejected_in_basic_flavor() {
        let err = parse("tau[1/2] p", &Signature::builtin(), Flavor::Basic, &l3()).unwrap_err();
        assert!(matches!(err, SyntaxError::Flavor { flavor: Flavor::Basic, .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = |s| Formula::atom(s);
        let f: Formula = "p * q & r | s -> t -> u".parse().unwrap();
        let lhs = Formula::or(Formula::and(Formula::fuse(a("p"), a("q")), a("r")), a("s"));
        assert_eq!(f, Formula::imp(lhs, Formula::imp(a("t"), a("u"))));
        let g: Formula = "p & q & r".parse().unwrap();
        assert_eq!(g, Formula::and(Formula::and(a("p"), a("q")), a("r")));
        let h: Formula = "!p -> q".parse().unwrap();
        assert_eq!(h, Formula::imp(Formula::imp(a("p"), "0".parse().unwrap()), a("q")));
    }

    #[test]
    fn iff_desugars() {
        let f: Formula = "p <-> q".parse().unwrap();
        assert_eq!(f, Formula::iff(Formula::atom("p"), Formula::atom("q")));
    }

    #[test]
    fn errors_carry_positions() {
        let sig = Signature::builtin();
        let alg = l3();
        assert!(matches!(parse_any("p & ", &sig, &alg), Err(SyntaxError::Parse { position: 4, .. })));
        assert!(matches!(parse_any("<foo>(p)", &sig, &alg), Err(SyntaxError::Parse { position: 0, .. })));
        assert!(matches!(parse_any("p & <cond>(p)", &sig, &alg), Err(SyntaxError::Parse { position: 4, .. })));
        assert!(matches!(parse_any("c(1/3)", &sig, &alg), Err(SyntaxError::Parse { position: 2, .. })));
        assert!(matches!(parse_any("p $ q", &sig, &alg), Err(SyntaxError::Parse { position: 2, .. })));
        assert!(matches!(parse_any("<M>(p)", &sig, &alg), Err(SyntaxError::Parse { .. })));
    }

    #[test]
    fn parameterized_modality() {
        let f: Formula = "<M[1/4]>(p)".parse().unwrap();
        assert_eq!(f, Formula::modal(Modality::with_param("M", Rational::new(1, 4)), vec![Formula::atom("p")]));
    }

    #[test]
    fn table_constants_are_indices() {
        let g = FiniteAlgebra::from_tables(
            3,
            &[vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]],
            &[vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            &[vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]],
            &[vec![2, 2, 2], vec![0, 2, 2], vec![0, 1, 2]],
            0,
            2,
        )
        .unwrap();
        let f = parse_any("c(1) & 1", &Signature::builtin(), &g).unwrap();
        assert_eq!(f, Formula::and(Formula::Const(Constant::Index(1)), Formula::Const(Constant::Index(2))));
        assert!(parse_any("c(1/2)", &Signature::builtin(), &g).is_err());
        assert!(parse_any("c(3)", &Signature::builtin(), &g).is_err());
    }
}
