//! Canonical element trees and their s-expression text form.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arrow {
    NW,
    NE,
    NWNE,
    SE,
    SW,
    SESW,
}

impl Arrow {
    pub const ROW: [Arrow; 3] = [Arrow::NW, Arrow::NE, Arrow::NWNE];
    pub const PATTERN: [Arrow; 3] = [Arrow::SE, Arrow::SW, Arrow::SESW];

    pub fn name(self) -> &'static str {
        match self {
            Arrow::NW => "NW",
            Arrow::NE => "NE",
            Arrow::NWNE => "NWNE",
            Arrow::SE => "SE",
            Arrow::SW => "SW",
            Arrow::SESW => "SESW",
        }
    }

    pub fn from_name(s: &str) -> Option<Arrow> {
        Some(match s {
            "NW" => Arrow::NW,
            "NE" => Arrow::NE,
            "NWNE" => Arrow::NWNE,
            "SE" => Arrow::SE,
            "SW" => Arrow::SW,
            "SESW" => Arrow::SESW,
            _ => return None,
        })
    }

    /// The reversal NW↔SE, NE↔SW, NWNE↔SESW.
    pub fn reverse(self) -> Arrow {
        match self {
            Arrow::NW => Arrow::SE,
            Arrow::NE => Arrow::SW,
            Arrow::NWNE => Arrow::SESW,
            Arrow::SE => Arrow::NW,
            Arrow::SW => Arrow::NE,
            Arrow::SESW => Arrow::NWNE,
        }
    }

    pub fn is_double(self) -> bool {
        matches!(self, Arrow::NWNE | Arrow::SESW)
    }

    /// δ_NW: 1 for NW and NWNE.
    pub fn d_nw(self) -> i64 {
        matches!(self, Arrow::NW | Arrow::NWNE) as i64
    }
    /// δ_NE: 1 for NE and NWNE.
    pub fn d_ne(self) -> i64 {
        matches!(self, Arrow::NE | Arrow::NWNE) as i64
    }
    /// δ_SE: 1 for SE and SESW.
    pub fn d_se(self) -> i64 {
        matches!(self, Arrow::SE | Arrow::SESW) as i64
    }
    /// δ_SW: 1 for SW and SESW.
    pub fn d_sw(self) -> i64 {
        matches!(self, Arrow::SW | Arrow::SESW) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Unit,
    Atom(i64),
    Arrow(Arrow),
    Tuple(Arc<[Elem]>),
    Tagged(u32, Arc<Elem>),
}

impl Elem {
    pub fn tup(items: Vec<Elem>) -> Elem {
        Elem::Tuple(items.into())
    }
    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::tup(vec![a, b])
    }
    pub fn tag(i: u32, e: Elem) -> Elem {
        Elem::Tagged(i, Arc::new(e))
    }
    pub fn atoms(v: &[i64]) -> Elem {
        Elem::tup(v.iter().map(|&x| Elem::Atom(x)).collect())
    }
    pub fn arrows(v: &[Arrow]) -> Elem {
        Elem::tup(v.iter().map(|&a| Elem::Arrow(a)).collect())
    }

    pub fn items(&self) -> &[Elem] {
        match self {
            Elem::Tuple(v) => v,
            _ => panic!("expected tuple, got {self}"),
        }
    }
    pub fn get(&self, i: usize) -> &Elem {
        &self.items()[i]
    }
    pub fn tagged(&self) -> (u32, &Elem) {
        match self {
            Elem::Tagged(i, e) => (*i, e),
            _ => panic!("expected tagged element, got {self}"),
        }
    }
    pub fn atom(&self) -> i64 {
        match self {
            Elem::Atom(x) => *x,
            _ => panic!("expected atom, got {self}"),
        }
    }
    pub fn arrow(&self) -> Arrow {
        match self {
            Elem::Arrow(a) => *a,
            _ => panic!("expected arrow, got {self}"),
        }
    }
    /// Integers of a tuple of atoms.
    pub fn ints(&self) -> Vec<i64> {
        self.items().iter().map(Elem::atom).collect()
    }
    pub fn arrow_seq(&self) -> Vec<Arrow> {
        self.items().iter().map(Elem::arrow).collect()
    }

    /// Shift every integer atom by `t`; arrows and structure are untouched.
    pub fn translate(&self, t: i64) -> Elem {
        match self {
            Elem::Atom(x) => Elem::Atom(x + t),
            Elem::Tuple(v) => Elem::tup(v.iter().map(|e| e.translate(t)).collect()),
            Elem::Tagged(i, e) => Elem::tag(*i, e.translate(t)),
            other => other.clone(),
        }
    }

    pub fn parse(s: &str) -> Result<Elem> {
        let toks = tokenize(s);
        let mut pos = 0;
        let e = parse_tokens(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Parse(format!(
                "trailing input after element in {s:?}"
            )));
        }
        Ok(e)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Unit => write!(f, "unit"),
            Elem::Atom(x) => write!(f, "{x}"),
            Elem::Arrow(a) => write!(f, "{}", a.name()),
            Elem::Tuple(v) => {
                write!(f, "(tup")?;
                for e in v.iter() {
                    write!(f, " {e}")?;
                }
                write!(f, ")")
            }
            Elem::Tagged(i, e) => write!(f, "(tag {i} {e})"),
        }
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_tokens(toks: &[String], pos: &mut usize) -> Result<Elem> {
    let tok = toks
        .get(*pos)
        .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    if tok == "(" {
        let head = toks
            .get(*pos)
            .ok_or_else(|| Error::Parse("unexpected end after '('".into()))?
            .clone();
        *pos += 1;
        let e = match head.as_str() {
            "tup" => {
                let mut items = Vec::new();
                while toks.get(*pos).map(String::as_str) != Some(")") {
                    if *pos >= toks.len() {
                        return Err(Error::Parse("unclosed tuple".into()));
                    }
                    items.push(parse_tokens(toks, pos)?);
                }
                Elem::tup(items)
            }
            "tag" => {
                let idx_tok = toks
                    .get(*pos)
                    .ok_or_else(|| Error::Parse("missing tag index".into()))?;
                let idx: u32 = idx_tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad tag index {idx_tok:?}")))?;
                *pos += 1;
                Elem::tag(idx, parse_tokens(toks, pos)?)
            }
            other => return Err(Error::Parse(format!("unknown form ({other} ...)"))),
        };
        match toks.get(*pos).map(String::as_str) {
            Some(")") => {
                *pos += 1;
                Ok(e)
            }
            _ => Err(Error::Parse("expected ')'".into())),
        }
    } else if tok == ")" {
        Err(Error::Parse("unexpected ')'".into()))
    } else if tok == "unit" {
        Ok(Elem::Unit)
    } else if let Some(a) = Arrow::from_name(tok) {
        Ok(Elem::Arrow(a))
    } else {
        tok.parse::<i64>()
            .map(Elem::Atom)
            .map_err(|_| Error::Parse(format!("bad atom {tok:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_elem() -> impl Strategy<Value = Elem> {
        let leaf = prop_oneof![
            Just(Elem::Unit),
            (-50i64..50).prop_map(Elem::Atom),
            (0usize..6).prop_map(|i| Elem::Arrow(
                [
                    Arrow::NW,
                    Arrow::NE,
                    Arrow::NWNE,
                    Arrow::SE,
                    Arrow::SW,
                    Arrow::SESW
                ][i]
            )),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Elem::tup),
                (0u32..4, inner).prop_map(|(i, e)| Elem::tag(i, e)),
            ]
        })
    }

    #[test]
    fn serialization_examples() {
        let e = Elem::tag(0, Elem::atoms(&[1, 4]));
        assert_eq!(e.to_string(), "(tag 0 (tup 1 4))");
        assert_eq!(Elem::arrows(&[Arrow::NWNE]).to_string(), "(tup NWNE)");
        assert_eq!(Elem::tup(vec![]).to_string(), "(tup)");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Elem::parse("(tup 1").is_err());
        assert!(Elem::parse("(foo 1)").is_err());
        assert!(Elem::parse("1 2").is_err());
        assert!(Elem::parse("x").is_err());
    }

    #[test]
    fn reverse_is_involution() {
        for a in Arrow::ROW.iter().chain(Arrow::PATTERN.iter()) {
            assert_eq!(a.reverse().reverse(), *a);
        }
    }

    proptest! {
        #[test]
        fn roundtrip(e in arb_elem()) {
            prop_assert_eq!(Elem::parse(&e.to_string()).unwrap(), e);
        }

        #[test]
        fn equality_matches_serialization(a in arb_elem(), b in arb_elem()) {
            prop_assert_eq!(a == b, a.to_string() == b.to_string());
        }

        #[test]
        fn translate_roundtrip(e in arb_elem(), t in -5i64..5) {
            prop_assert_eq!(e.translate(t).translate(-t), e);
        }
    }
}
