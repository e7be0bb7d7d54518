use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Exponent {
    Num(f64),
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Base {
    One,
    Crit,
    /// `n^-e`
    NegPow(Exponent),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    base: Base,
}

/// Edge density as a function of `n`: a signed sum of terms, each a number,
/// `crit`, or `[X*]n^-E` with `E` a number or `delta`. Examples:
/// `crit + n^-delta`, `crit - 0.5*n^-0.3`, `crit + 0.05`, `4.9`.
#[derive(Debug, Clone, PartialEq)]
pub struct CExpr {
    source: String,
    terms: Vec<Term>,
}

impl CExpr {
    pub fn parse(s: &str) -> Result<Self> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        if src.is_empty() || !src.is_ascii() {
            return Err(Error::Parse(format!("bad density expression '{s}'")));
        }
        let mut terms = Vec::new();
        let mut rest = src.as_str();
        let mut sign = 1.0;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1.0;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
            // A '-' right after "n^" is part of the exponent.
            let end = adjust_for_exponent(rest, end);
            let (tok, tail) = rest.split_at(end);
            let mut t = parse_term(tok).ok_or_else(|| Error::Parse(format!("bad term '{tok}' in '{s}'")))?;
            t.coef *= sign;
            terms.push(t);
            if tail.is_empty() {
                break;
            }
            sign = if tail.starts_with('-') { -1.0 } else { 1.0 };
            rest = &tail[1..];
            if rest.is_empty() {
                return Err(Error::Parse(format!("dangling operator in '{s}'")));
            }
        }
        Ok(CExpr { source: s.trim().to_string(), terms })
    }

    pub fn uses_delta(&self) -> bool {
        self.terms.iter().any(|t| t.base == Base::NegPow(Exponent::Delta))
    }

    /// Value at size `n`, with `crit` the critical density.
    pub fn eval(&self, n: usize, crit: f64, delta: Option<f64>) -> Result<f64> {
        let mut c = 0.0;
        for t in &self.terms {
            let b = match t.base {
                Base::One => 1.0,
                Base::Crit => crit,
                Base::NegPow(Exponent::Num(e)) => (n as f64).powf(-e),
                Base::NegPow(Exponent::Delta) => {
                    let d = delta.ok_or_else(|| Error::Parameter(format!("'{}' needs delta", self.source)))?;
                    (n as f64).powf(-d)
                }
            };
            c += t.coef * b;
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("'{}' gives density {c} at n = {n}", self.source)));
        }
        Ok(c)
    }
}

fn adjust_for_exponent(rest: &str, mut end: usize) -> usize {
    let glued = |head: &str| {
        head.ends_with("n^")
            || (head.ends_with('e') && head[..head.len() - 1].ends_with(|c: char| c.is_ascii_digit() || c == '.'))
    };
    while end < rest.len() && glued(&rest[..end]) {
        end = rest[end + 1..].find(['+', '-']).map_or(rest.len(), |i| i + end + 1);
    }
    end
}

fn parse_term(tok: &str) -> Option<Term> {
    if tok.starts_with(['+', '-']) {
        return None;
    }
    let (coef, base) = match tok.split_once('*') {
        Some((c, b)) => (c.parse::<f64>().ok()?, b),
        None => (1.0, tok),
    };
    let base = if base == "crit" {
        Base::Crit
    } else if let Some(e) = base.strip_prefix("n^-") {
        let e = if e == "delta" { Exponent::Delta } else { Exponent::Num(e.parse().ok()?) };
        Base::NegPow(e)
    } else if tok.contains('*') {
        return None;
    } else {
        return Some(Term { coef: base.parse().ok()?, base: Base::One });
    };
    Some(Term { coef, base })
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl FromStr for CExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CExpr::parse(s)
    }
}

impl Serialize for CExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for CExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}
