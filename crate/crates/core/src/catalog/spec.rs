//! Manifold expressions and their parser.

use std::fmt;

use num::integer::gcd;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ManifoldSpec {
    /// `E(n)`, `E(n;p)`, `E(n;p,q)`: log transforms of orders `orders` on the fiber.
    Elliptic {
        n: i64,
        orders: Vec<i64>,
    },
    /// `E(n;p1,q1;p2,q2;p3,q3)`: three pairs on independent nodal directions.
    Noncomplex {
        n: i64,
        pairs: [(i64, i64); 3],
    },
    W {
        n: i64,
    },
    Y {
        n: i64,
    },
    H {
        n: i64,
    },
    Blowup {
        base: Box<ManifoldSpec>,
        k: i64,
    },
    LogT {
        base: Box<ManifoldSpec>,
        p: i64,
    },
    HpSum {
        base: Box<ManifoldSpec>,
        p: i64,
    },
}

impl ManifoldSpec {
    pub fn elliptic(n: i64, orders: &[i64]) -> Self {
        Self::Elliptic {
            n,
            orders: orders.to_vec(),
        }
    }

    /// Semantic constraints; the parser calls this on every node.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Semantic(m));
        match self {
            Self::Elliptic { n, orders } => {
                if *n < 2 {
                    return bad(format!("E({n}): n ≥ 2 required (b⁺ ≥ 3)"));
                }
                if orders.len() > 2 || orders.iter().any(|&p| p < 1) {
                    return bad(format!("{self}: orders must be at most two integers ≥ 1"));
                }
                if orders.len() == 2 && gcd(orders[0], orders[1]) != 1 {
                    return bad(format!("{self}: orders must be coprime"));
                }
                Ok(())
            }
            Self::Noncomplex { n, pairs } => {
                if *n < 2 {
                    return bad(format!("E({n};…): n ≥ 2 required (b⁺ ≥ 3)"));
                }
                for &(p, q) in pairs {
                    if p < 1 || q < 1 || gcd(p, q) != 1 {
                        return bad(format!("{self}: pair ({p},{q}) must be coprime and ≥ 1"));
                    }
                }
                Ok(())
            }
            Self::W { n } => {
                if !(1..=8).contains(n) {
                    return bad(format!(
                        "W({n}): 1 ≤ n ≤ 8 required (W(n) is simply connected only for n ≤ 8)"
                    ));
                }
                Ok(())
            }
            Self::Y { n } | Self::H { n } => {
                if *n < 4 {
                    return bad(format!("{self}: n ≥ 4 required"));
                }
                Ok(())
            }
            Self::Blowup { base, k } => {
                if *k < 0 {
                    return bad(format!("blowup count {k} < 0"));
                }
                base.validate()
            }
            Self::LogT { base, p } | Self::HpSum { base, p } => {
                if *p < 1 {
                    return bad(format!("order {p} < 1"));
                }
                base.validate()
            }
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Elliptic { n, orders } => match orders.as_slice() {
                [] => write!(f, "E({n})"),
                [p] => write!(f, "E({n};{p})"),
                [p, q] => write!(f, "E({n};{p},{q})"),
                other => write!(f, "E({n};{other:?})"),
            },
            Self::Noncomplex { n, pairs } => {
                write!(f, "E({n}")?;
                for (p, q) in pairs {
                    write!(f, ";{p},{q}")?;
                }
                write!(f, ")")
            }
            Self::W { n } => write!(f, "W({n})"),
            Self::Y { n } => write!(f, "Y({n})"),
            Self::H { n } => write!(f, "H({n})"),
            Self::Blowup { base, k } => write!(f, "blowup({base},{k})"),
            Self::LogT { base, p } => write!(f, "logt({base},{p})"),
            Self::HpSum { base, p } => write!(f, "hpsum({base},{p})"),
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            src,
        }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or(self.src.len())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected '{c}', found '{x}'")),
            None => self.err(format!("expected '{c}', found end of input")),
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphabetic()) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.offset();
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return self.err("expected an integer");
        }
        let v: i64 = digits.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "integer out of range".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn spec(&mut self) -> Result<ManifoldSpec> {
        let start = self.offset();
        let name = self.ident();
        self.expect('(')?;
        let spec = match name.as_str() {
            "E" => self.elliptic(start)?,
            "W" | "Y" | "H" => {
                let n = self.int()?;
                match name.as_str() {
                    "W" => ManifoldSpec::W { n },
                    "Y" => ManifoldSpec::Y { n },
                    _ => ManifoldSpec::H { n },
                }
            }
            "blowup" | "logt" | "hpsum" => {
                let base = Box::new(self.spec()?);
                self.expect(',')?;
                let k = self.int()?;
                match name.as_str() {
                    "blowup" => ManifoldSpec::Blowup { base, k },
                    "logt" => ManifoldSpec::LogT { base, p: k },
                    _ => ManifoldSpec::HpSum { base, p: k },
                }
            }
            "" => {
                return Err(Error::Parse {
                    pos: start,
                    msg: "expected a manifold name".into(),
                })
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unknown manifold '{other}'"),
                })
            }
        };
        self.expect(')')?;
        spec.validate()?;
        Ok(spec)
    }

    fn elliptic(&mut self, start: usize) -> Result<ManifoldSpec> {
        let n = self.int()?;
        let mut groups: Vec<Vec<i64>> = Vec::new();
        while self.peek() == Some(';') {
            self.pos += 1;
            let mut g = vec![self.int()?];
            while self.peek() == Some(',') {
                self.pos += 1;
                g.push(self.int()?);
            }
            groups.push(g);
        }
        match groups.as_slice() {
            [] => Ok(ManifoldSpec::elliptic(n, &[])),
            [g] if g.len() <= 2 => Ok(ManifoldSpec::elliptic(n, g)),
            [a, b, c] if a.len() == 2 && b.len() == 2 && c.len() == 2 => {
                Ok(ManifoldSpec::Noncomplex {
                    n,
                    pairs: [(a[0], a[1]), (b[0], b[1]), (c[0], c[1])],
                })
            }
            _ => Err(Error::Parse {
                pos: start,
                msg: "E takes n, n;p, n;p,q or n;p1,q1;p2,q2;p3,q3".into(),
            }),
        }
    }
}

/// Parses the manifold grammar; whitespace is ignored, positions are byte offsets.
pub fn parse_spec(src: &str) -> Result<ManifoldSpec> {
    let mut p = Parser::new(src);
    let spec = p.spec()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(spec)
}
