//! Text form of polyvector fields: `3/2 * x1^2*psi{1}*psi{2} - 1 * x3`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::field::{Grading, PolyField};
use crate::error::{Error, Result};

impl fmt::Display for PolyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = self.grading().dim();
        for (i, (m, c)) in self.terms().iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", mag)?;
            let mut factors = Vec::new();
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if v < d { format!("x{}", v + 1) } else { format!("psi{{{}}}", v - d + 1) };
                factors.push(if e == 1 { base } else { format!("{}^{}", base, e) });
            }
            if !factors.is_empty() {
                write!(f, " * {}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

fn perr(detail: impl Into<String>) -> Error {
    Error::Parse { what: "polyvector field", detail: detail.into() }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| perr(format!("bad number `{}`", s)))?;
    let d: BigInt = d.parse().map_err(|_| perr(format!("bad number `{}`", s)))?;
    if d.is_zero() {
        return Err(perr("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn parse_factor(g: &Grading, tok: &str) -> Result<PolyField> {
    let tok = tok.trim();
    if tok.is_empty() {
        return Err(perr("empty factor"));
    }
    let (base, exp) = match tok.rsplit_once('^') {
        Some((b, e)) => {
            let e: u32 = e.trim().parse().map_err(|_| perr(format!("bad exponent in `{}`", tok)))?;
            (b.trim(), e)
        }
        None => (tok, 1),
    };
    let d = g.dim();
    let index = |s: &str| -> Result<usize> {
        let a: usize = s.parse().map_err(|_| perr(format!("bad index in `{}`", tok)))?;
        if a == 0 || a > d {
            return Err(perr(format!("index out of range in `{}` (dimension {})", tok, d)));
        }
        Ok(a - 1)
    };
    let single = if let Some(rest) = base.strip_prefix("psi") {
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .unwrap_or(rest);
        PolyField::psi(g, index(inner)?)
    } else if let Some(rest) = base.strip_prefix('x') {
        PolyField::x(g, index(rest)?)
    } else {
        PolyField::constant(g, parse_rational(base)?)
    };
    let mut out = PolyField::one(g);
    for _ in 0..exp {
        out = &out * &single;
    }
    Ok(out)
}

/// Parse a polyvector field written in the format produced by `Display`.
pub fn parse_polyfield(g: &Grading, text: &str) -> Result<PolyField> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(perr("empty input"));
    }
    // exponents are unsigned, so every '+'/'-' separates terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for ch in s.chars() {
        if ch == '+' || ch == '-' {
            if cur.is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
                continue;
            }
            terms.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(perr("dangling sign"));
    }
    terms.push((negative, cur));
    let mut out = PolyField::zero(g);
    for (neg, t) in terms {
        let mut term = PolyField::one(g);
        for f in t.split('*') {
            term = &term * &parse_factor(g, f)?;
        }
        if neg {
            term = -term;
        }
        out = &out + &term;
    }
    Ok(out)
}

impl PolyField {
    pub fn parse(g: &Grading, text: &str) -> Result<Self> {
        parse_polyfield(g, text)
    }
}
