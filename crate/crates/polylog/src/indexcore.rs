//! Naming, enumeration and classification of polylogarithm integrals.
//!
//! An integral is identified by the quadruple `(a, b, c, d)` standing for
//! ∫₀¹ logᵃ(1−x) logᵇx logᶜ(1+x) / f(x) dx with f = 1−x, x, 1+x for
//! d = 0, 1, 2.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Denominator tag of a polylogarithm integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Denominator {
    /// 1 − x
    OneMinusX = 0,
    /// x
    X = 1,
    /// 1 + x
    OnePlusX = 2,
}

impl Denominator {
    pub fn from_tag(d: u32) -> Option<Self> {
        match d {
            0 => Some(Denominator::OneMinusX),
            1 => Some(Denominator::X),
            2 => Some(Denominator::OnePlusX),
            _ => None,
        }
    }

    pub fn tag(self) -> u32 {
        self as u32
    }
}

/// The quadruple (a, b, c, d) naming a polylogarithm integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegralIndex {
    /// Power of log(1−x).
    pub a: u32,
    /// Power of log x.
    pub b: u32,
    /// Power of log(1+x).
    pub c: u32,
    /// Denominator tag.
    pub d: Denominator,
}

impl IntegralIndex {
    pub fn new(a: u32, b: u32, c: u32, d: Denominator) -> Self {
        IntegralIndex { a, b, c, d }
    }

    /// Builds an index from raw exponents and a 0/1/2 denominator tag.
    pub fn from_parts(a: u32, b: u32, c: u32, d: u32) -> Option<Self> {
        Denominator::from_tag(d).map(|d| IntegralIndex { a, b, c, d })
    }

    /// Weight w = 1 + a + b + c.
    pub fn weight(&self) -> u32 {
        1 + self.a + self.b + self.c
    }

    /// Convergence: 1/(1−x) needs b ≥ 1, 1/x needs a ≥ 1 or c ≥ 1,
    /// 1/(1+x) always converges.
    pub fn is_convergent(&self) -> bool {
        match self.d {
            Denominator::OneMinusX => self.b >= 1,
            Denominator::X => self.a >= 1 || self.c >= 1,
            Denominator::OnePlusX => true,
        }
    }
}

fn base36_digit(v: u32) -> char {
    debug_assert!(v < 36);
    char::from_digit(v, 36).unwrap().to_ascii_uppercase()
}

fn base36_value(ch: char) -> Option<u32> {
    ch.to_digit(36)
}

impl fmt::Display for IntegralIndex {
    /// Canonical "iABCD" name with base-36 digits, e.g. `i4452`, `iA212`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i{}{}{}{}",
            base36_digit(self.a),
            base36_digit(self.b),
            base36_digit(self.c),
            base36_digit(self.d.tag())
        )
    }
}

impl FromStr for IntegralIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |msg: &str| Error::Parse(format!("invalid integral name {s:?}: {msg}"));
        let mut chars = s.chars();
        if chars.next() != Some('i') {
            return Err(bad("must start with 'i'"));
        }
        let digits: Vec<char> = chars.collect();
        if digits.len() != 4 {
            return Err(bad("expected exactly four base-36 digits after 'i'"));
        }
        let vals: Vec<u32> = digits
            .iter()
            .map(|&ch| base36_value(ch).ok_or_else(|| bad("non base-36 digit")))
            .collect::<Result<_, _>>()?;
        let d = Denominator::from_tag(vals[3]).ok_or_else(|| bad("denominator tag must be 0, 1 or 2"))?;
        let idx = IntegralIndex::new(vals[0], vals[1], vals[2], d);
        if !idx.is_convergent() {
            return Err(bad("index names a non-convergent integral"));
        }
        Ok(idx)
    }
}

/// Auxiliary integral ∫₀¹ x^(−1/2) logⁿx logᵐ(1−x)/(1−x) dx; requires n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AuxHalfIntegral {
    /// Power of log x, n ≥ 1.
    pub n: u32,
    /// Power of log(1−x).
    pub m: u32,
}

impl AuxHalfIntegral {
    pub fn new(n: u32, m: u32) -> Result<Self, Error> {
        if n < 1 {
            return Err(Error::Precondition(
                "AuxHalfIntegral requires n >= 1 for convergence".into(),
            ));
        }
        Ok(AuxHalfIntegral { n, m })
    }

    pub fn weight(&self) -> u32 {
        1 + self.n + self.m
    }
}

/// Number of convergent integrals of weight w: (3w² + w − 2)/2.
pub fn count_convergent(w: u32) -> u64 {
    let w = w as u64;
    (3 * w * w + w - 2) / 2
}

/// All convergent integrals of weight w, in lexicographic (a, b, c, d) order.
pub fn enumerate_convergent(w: u32) -> Vec<IntegralIndex> {
    assert!(w >= 1, "weight must be >= 1");
    let mut out = Vec::new();
    let total = w - 1;
    for a in 0..=total {
        for b in 0..=(total - a) {
            let c = total - a - b;
            for d in 0..3u32 {
                let idx = IntegralIndex::from_parts(a, b, c, d).unwrap();
                if idx.is_convergent() {
                    out.push(idx);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(a: u32, b: u32, c: u32, d: u32) -> IntegralIndex {
        IntegralIndex::from_parts(a, b, c, d).unwrap()
    }

    #[test]
    fn weight_definition() {
        assert_eq!(idx(0, 1, 0, 0).weight(), 2);
        assert_eq!(idx(0, 0, 0, 2).weight(), 1);
        assert_eq!(idx(2, 2, 3, 1).weight(), 8);
    }

    #[test]
    fn weight_two_enumeration_matches_lemma() {
        let got = enumerate_convergent(2);
        let expected = vec![
            idx(0, 0, 1, 1),
            idx(0, 0, 1, 2),
            idx(0, 1, 0, 0),
            idx(0, 1, 0, 2),
            idx(1, 0, 0, 1),
            idx(1, 0, 0, 2),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn counting_formula_matches_brute_force() {
        for w in 1..=20 {
            let listed = enumerate_convergent(w);
            assert_eq!(listed.len() as u64, count_convergent(w), "weight {w}");
            // Independent brute force over all exponent splits.
            let mut brute = 0u64;
            for a in 0..w {
                for b in 0..(w - a) {
                    let c = w - 1 - a - b;
                    for d in 0..3 {
                        if idx(a, b, c, d).is_convergent() {
                            brute += 1;
                        }
                    }
                }
            }
            assert_eq!(brute, count_convergent(w), "weight {w}");
            assert!(listed.iter().all(|i| i.weight() == w && i.is_convergent()));
            let mut sorted = listed.clone();
            sorted.sort();
            assert_eq!(sorted, listed, "enumeration must be lex ordered");
        }
    }

    #[test]
    fn weight_six_count() {
        assert_eq!(enumerate_convergent(6).len(), 56);
    }

    #[test]
    fn name_round_trip() {
        for w in 1..=20 {
            for i in enumerate_convergent(w) {
                let name = i.to_string();
                let back: IntegralIndex = name.parse().unwrap();
                assert_eq!(back, i);
            }
        }
    }

    #[test]
    fn name_format_examples() {
        assert_eq!(idx(4, 4, 5, 2).to_string(), "i4452");
        assert_eq!(idx(10, 2, 1, 2).to_string(), "iA212");
        assert_eq!("i0100".parse::<IntegralIndex>().unwrap(), idx(0, 1, 0, 0));
    }

    #[test]
    fn parse_rejects_malformed_and_divergent() {
        assert!("i000".parse::<IntegralIndex>().is_err());
        assert!("j0100".parse::<IntegralIndex>().is_err());
        assert!("i0103".parse::<IntegralIndex>().is_err());
        // i_{0000} over 1-x diverges (b = 0).
        assert!("i0000".parse::<IntegralIndex>().is_err());
        // i_{0b01} over x diverges when a = c = 0.
        assert!("i0101".parse::<IntegralIndex>().is_err());
    }

    #[test]
    fn aux_requires_positive_log_power() {
        assert!(AuxHalfIntegral::new(0, 3).is_err());
        let aux = AuxHalfIntegral::new(2, 3).unwrap();
        assert_eq!(aux.weight(), 6);
    }
}
