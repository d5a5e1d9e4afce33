//! Surface syntax for higher-order terms.
//!
//! On top of the first-order prefixes (`a(x).T`, `'a(t).T`, `(c)T`,
//! `new c. T`, `if φ then T [else U]`, `0`) this accepts
//! `a(X:<i,j>).T`, `'a(\g1,g2. T : <i,j>).T`, `X(a1,…)` and
//! `(\g1,…. T)(a1,…)`. Identifiers starting with an uppercase letter are
//! abstraction variables; the `: <i,j>` annotation on an abstraction is
//! optional. An optional leading `main =` is ignored.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::{AbsType, AbsVar, Abstraction, HoError, HoTerm};
use crate::syntax::{Formula, Name, Parser, Tok, ValueTerm};

/// A parsed higher-order term with its identifier tables.
#[derive(Clone, Debug)]
pub struct HoSource {
    pub term: HoTerm,
    pub names: BTreeMap<String, Name>,
    pub abs_vars: BTreeMap<String, AbsVar>,
}

pub fn parse_ho(text: &str) -> Result<HoSource, HoError> {
    let mut p = HoParser {
        p: Parser::new(text)?,
        abs_vars: BTreeMap::new(),
    };
    if p.p.is_keyword("main") {
        p.p.bump();
        p.p.expect(Tok::Eq)?;
    }
    let term = p.term()?;
    if *p.p.peek() != Tok::Eof {
        return Err(p.fail(format!("expected end of input, found {}", p.p.peek())));
    }
    Ok(HoSource {
        term,
        names: p.p.symtab().names,
        abs_vars: p.abs_vars,
    })
}

struct HoParser {
    p: Parser,
    abs_vars: BTreeMap<String, AbsVar>,
}

fn is_abs_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl HoParser {
    fn fail(&self, message: String) -> HoError {
        match self.p.error::<()>(message) {
            Err(e) => HoError::Parse(e),
            Ok(()) => unreachable!("error always fails"),
        }
    }

    fn abs_var(&mut self, s: &str) -> AbsVar {
        let next = AbsVar(self.abs_vars.len() as u64);
        *self.abs_vars.entry(s.to_string()).or_insert(next)
    }

    fn term(&mut self) -> Result<HoTerm, HoError> {
        let mut left = self.prefix()?;
        while self.p.eat(&Tok::Bar) {
            let right = self.prefix()?;
            left = HoTerm::par(left, right);
        }
        Ok(left)
    }

    fn prefix(&mut self) -> Result<HoTerm, HoError> {
        match self.p.peek().clone() {
            Tok::Num(n) if n.is_zero() => {
                self.p.bump();
                Ok(HoTerm::Nil)
            }
            Tok::LParen if *self.p.peek_at(1) == Tok::Backslash => {
                self.p.bump();
                let abs = self.abstraction()?;
                self.p.expect(Tok::RParen)?;
                let names = self.name_list()?;
                Ok(HoTerm::AbsApp(abs, names))
            }
            Tok::LParen => {
                let restriction = matches!(self.p.peek_at(1), Tok::Ident(s) if !is_abs_var(s))
                    && *self.p.peek_at(2) == Tok::RParen;
                self.p.bump();
                if restriction {
                    let c = self.p.name()?;
                    self.p.bump();
                    let body = self.prefix()?;
                    Ok(HoTerm::Res(c, Box::new(body)))
                } else {
                    let t = self.term()?;
                    self.p.expect(Tok::RParen)?;
                    Ok(t)
                }
            }
            Tok::Quote => {
                self.p.bump();
                let a = self.p.name()?;
                if self.p.eat(&Tok::LParen) {
                    if *self.p.peek() == Tok::Backslash {
                        let abs = self.abstraction()?;
                        self.p.expect(Tok::RParen)?;
                        self.p.expect(Tok::Dot)?;
                        let body = self.prefix()?;
                        return Ok(HoTerm::HoOut(a, abs, Box::new(body)));
                    }
                    let t = self.p.vterm()?;
                    self.p.expect(Tok::RParen)?;
                    self.p.expect(Tok::Dot)?;
                    let body = self.prefix()?;
                    Ok(HoTerm::Out(a, t, Box::new(body)))
                } else {
                    self.p.expect(Tok::Dot)?;
                    let body = self.prefix()?;
                    Ok(HoTerm::Out(a, ValueTerm::num(0), Box::new(body)))
                }
            }
            Tok::Ident(kw) if kw == "new" => {
                self.p.bump();
                let c = self.p.name()?;
                self.p.expect(Tok::Dot)?;
                let body = self.prefix()?;
                Ok(HoTerm::Res(c, Box::new(body)))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.p.bump();
                let phi = self.p.formula()?;
                self.p.expect_keyword("then")?;
                let s = self.prefix()?;
                if self.p.is_keyword("else") {
                    self.p.bump();
                    let e = self.prefix()?;
                    Ok(HoTerm::par(
                        HoTerm::Cond(phi.clone(), Box::new(s)),
                        HoTerm::Cond(Formula::not(phi), Box::new(e)),
                    ))
                } else {
                    Ok(HoTerm::Cond(phi, Box::new(s)))
                }
            }
            Tok::Ident(s) if is_abs_var(&s) => {
                self.p.bump();
                let x = self.abs_var(&s);
                let names = self.name_list()?;
                Ok(HoTerm::AbsVarApp(x, names))
            }
            Tok::Ident(_) => {
                let a = self.p.name()?;
                self.p.expect(Tok::LParen)?;
                match self.p.peek().clone() {
                    Tok::Ident(s) if is_abs_var(&s) => {
                        self.p.bump();
                        let x = self.abs_var(&s);
                        self.p.expect(Tok::Colon)?;
                        let ty = self.abs_type()?;
                        self.p.expect(Tok::RParen)?;
                        self.p.expect(Tok::Dot)?;
                        let body = self.prefix()?;
                        Ok(HoTerm::HoIn(a, x, ty, Box::new(body)))
                    }
                    _ => {
                        let x = self.p.var()?;
                        self.p.expect(Tok::RParen)?;
                        self.p.expect(Tok::Dot)?;
                        let body = self.prefix()?;
                        Ok(HoTerm::In(a, x, Box::new(body)))
                    }
                }
            }
            other => Err(self.fail(format!("expected a process, found {other}"))),
        }
    }

    fn name_list(&mut self) -> Result<Vec<Name>, HoError> {
        self.p.expect(Tok::LParen)?;
        let mut names = Vec::new();
        if *self.p.peek() != Tok::RParen {
            loop {
                names.push(self.p.name()?);
                if !self.p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.p.expect(Tok::RParen)?;
        Ok(names)
    }

    fn number(&mut self) -> Result<u64, HoError> {
        match self.p.peek().clone() {
            Tok::Num(n) => {
                self.p.bump();
                n.to_u64().ok_or_else(|| self.fail("number too large".into()))
            }
            other => Err(self.fail(format!("expected a number, found {other}"))),
        }
    }

    fn abs_type(&mut self) -> Result<AbsType, HoError> {
        self.p.expect(Tok::Lt)?;
        let i = self.number()?;
        self.p.expect(Tok::Comma)?;
        let j = self.number()?;
        self.p.expect(Tok::Gt)?;
        Ok(AbsType::new(i, j as usize))
    }

    // After the backslash: `g1,…. T [: <i,j>]`.
    fn abstraction(&mut self) -> Result<Abstraction, HoError> {
        self.p.expect(Tok::Backslash)?;
        let mut params = Vec::new();
        if *self.p.peek() != Tok::Dot {
            loop {
                params.push(self.p.name()?);
                if !self.p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.p.expect(Tok::Dot)?;
        let body = self.term()?;
        let Some(body) = body.to_first_order() else {
            return Err(self.fail("abstraction bodies must be first-order".into()));
        };
        let ty = if self.p.eat(&Tok::Colon) {
            Some(self.abs_type()?)
        } else {
            None
        };
        Abstraction::new(params, body, ty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, ParseError};

    #[test]
    fn higher_order_prefixes() {
        let src = parse_ho("'n1(\\g. 'g(7).0).0 | n1(X:<0,1>).X(n2)").unwrap();
        let HoTerm::Par(l, r) = &src.term else { panic!() };
        let HoTerm::HoOut(a, abs, _) = &**l else { panic!() };
        assert_eq!(*a, Name(1));
        assert_eq!(abs.ty(), AbsType::new(0, 1));
        let HoTerm::HoIn(_, x, ty, body) = &**r else { panic!() };
        assert_eq!((*x, *ty), (AbsVar(0), AbsType::new(0, 1)));
        assert_eq!(**body, HoTerm::AbsVarApp(AbsVar(0), vec![Name(2)]));
    }

    #[test]
    fn first_order_terms_embed() {
        let src = parse_ho("main = (c)('c(1).0 | c(y).'n1(y).0)").unwrap();
        let expected = parse_term("(c)('c(1).0 | c(y).'n1(y).0)").unwrap();
        assert_eq!(src.term.to_first_order().unwrap(), expected);
    }

    #[test]
    fn applications_and_annotations() {
        let src = parse_ho("(\\a, b. (c)'a(0).'b(0).0 : <2,2>)(n1, n1)").unwrap();
        let HoTerm::AbsApp(abs, names) = src.term else { panic!() };
        assert_eq!(abs.ty(), AbsType::new(2, 2));
        assert_eq!(names.len(), 2);
        let src = parse_ho("n1(X:<0,0>).X() | 'n1(\\. 0).0").unwrap();
        assert!(matches!(src.term, HoTerm::Par(..)));
        assert!(parse_ho("'n1(\\g. 'g(0).0 : <0,2>).0").is_err());
        assert!(parse_ho("'n1(\\g. n1(X:<0,0>).0).0").is_err());
    }

    #[test]
    fn errors_have_positions() {
        match parse_ho("n1(X:<0,1).0") {
            Err(HoError::Parse(ParseError::Syntax { line, .. })) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }
}
