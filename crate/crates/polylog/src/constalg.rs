//! The graded constant algebra: exact ℚ-linear combinations of monomials in
//! log 2, π, odd zeta values, Liₙ(1/2) and the named new constants.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exact rational from an integer pair.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Named constants beyond the zeta / polylog pool, introduced weight by
/// weight when the relation systems are rank deficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NamedConst {
    F1,
    G1,
    G2,
    H1,
    H2,
    H3,
    /// k-th auto-named constant of weight w (weights ≥ 9).
    U(u32, u32),
}

impl NamedConst {
    pub fn weight(self) -> u32 {
        match self {
            NamedConst::F1 => 6,
            NamedConst::G1 | NamedConst::G2 => 7,
            NamedConst::H1 | NamedConst::H2 | NamedConst::H3 => 8,
            NamedConst::U(w, _) => w,
        }
    }
}

impl fmt::Display for NamedConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedConst::F1 => write!(f, "F1"),
            NamedConst::G1 => write!(f, "G1"),
            NamedConst::G2 => write!(f, "G2"),
            NamedConst::H1 => write!(f, "H1"),
            NamedConst::H2 => write!(f, "H2"),
            NamedConst::H3 => write!(f, "H3"),
            NamedConst::U(w, k) => write!(f, "U[{w},{k}]"),
        }
    }
}

/// A generator of the constant algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstSymbol {
    Log2,
    Pi,
    /// ζ(n); canonical only for odd n ≥ 3 (even n reduce to π powers).
    Zeta(u32),
    /// Liₙ(1/2); canonical only for n ≥ 4.
    LiHalf(u32),
    Named(NamedConst),
    /// Euler–Mascheroni γ. Appears transiently inside Γ expansions and must
    /// cancel before any value is finalized.
    EulerGamma,
}

impl ConstSymbol {
    pub fn weight(self) -> u32 {
        match self {
            ConstSymbol::Log2 | ConstSymbol::Pi | ConstSymbol::EulerGamma => 1,
            ConstSymbol::Zeta(n) | ConstSymbol::LiHalf(n) => n,
            ConstSymbol::Named(c) => c.weight(),
        }
    }
}

impl fmt::Display for ConstSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstSymbol::Log2 => write!(f, "Log2"),
            ConstSymbol::Pi => write!(f, "Pi"),
            ConstSymbol::Zeta(n) => write!(f, "Zeta[{n}]"),
            ConstSymbol::LiHalf(n) => write!(f, "LiHalf[{n}]"),
            ConstSymbol::Named(c) => write!(f, "{c}"),
            ConstSymbol::EulerGamma => write!(f, "EulerGamma"),
        }
    }
}

/// A product of symbols with positive multiplicities, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ConstMonomial {
    factors: Vec<(ConstSymbol, u32)>,
}

impl ConstMonomial {
    pub fn one() -> Self {
        ConstMonomial::default()
    }

    pub fn symbol(s: ConstSymbol) -> Self {
        ConstMonomial {
            factors: vec![(s, 1)],
        }
    }

    pub fn power(s: ConstSymbol, k: u32) -> Self {
        if k == 0 {
            ConstMonomial::one()
        } else {
            ConstMonomial {
                factors: vec![(s, k)],
            }
        }
    }

    pub fn from_factors(mut factors: Vec<(ConstSymbol, u32)>) -> Self {
        factors.retain(|&(_, k)| k > 0);
        factors.sort();
        let mut merged: Vec<(ConstSymbol, u32)> = Vec::with_capacity(factors.len());
        for (s, k) in factors {
            match merged.last_mut() {
                Some((ls, lk)) if *ls == s => *lk += k,
                _ => merged.push((s, k)),
            }
        }
        ConstMonomial { factors: merged }
    }

    pub fn factors(&self) -> &[(ConstSymbol, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|&(s, k)| s.weight() * k).sum()
    }

    pub fn mul(&self, other: &ConstMonomial) -> ConstMonomial {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        ConstMonomial::from_factors(factors)
    }

    pub fn contains(&self, s: ConstSymbol) -> bool {
        self.factors.iter().any(|&(fs, _)| fs == s)
    }

    pub fn exponent_of(&self, s: ConstSymbol) -> u32 {
        self.factors
            .iter()
            .find(|&&(fs, _)| fs == s)
            .map_or(0, |&(_, k)| k)
    }

    /// The monomial with the power of `s` removed entirely.
    pub fn without(&self, s: ConstSymbol) -> ConstMonomial {
        ConstMonomial {
            factors: self
                .factors
                .iter()
                .copied()
                .filter(|&(fs, _)| fs != s)
                .collect(),
        }
    }
}

impl fmt::Display for ConstMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(s, k)| {
                if k == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{k}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Exact ℚ-linear combination of constant monomials. Always kept reduced:
/// ζ(even) and Li₁₋₃(1/2) never appear, zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstExpr {
    terms: BTreeMap<ConstMonomial, Rational>,
}

impl ConstExpr {
    pub fn zero() -> Self {
        ConstExpr::default()
    }

    pub fn one() -> Self {
        ConstExpr::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut e = ConstExpr::zero();
        if !q.is_zero() {
            e.terms.insert(ConstMonomial::one(), q);
        }
        e
    }

    pub fn from_symbol(s: ConstSymbol) -> Self {
        ConstExpr::term(Rational::one(), ConstMonomial::symbol(s)).reduce()
    }

    /// Single unreduced term; callers compose these and reduce at the end.
    pub fn term(q: Rational, m: ConstMonomial) -> Self {
        let mut e = ConstExpr::zero();
        if !q.is_zero() {
            e.terms.insert(m, q);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ConstMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &ConstMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, q: Rational, m: ConstMonomial) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            let key: Vec<ConstMonomial> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &ConstExpr) -> ConstExpr {
        let mut out = self.clone();
        for (m, q) in other.terms() {
            out.add_term(q.clone(), m.clone());
        }
        out
    }

    pub fn sub(&self, other: &ConstExpr) -> ConstExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ConstExpr {
        let mut out = ConstExpr::zero();
        for (m, q) in self.terms() {
            out.terms.insert(m.clone(), -q.clone());
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> ConstExpr {
        if q.is_zero() {
            return ConstExpr::zero();
        }
        let mut out = ConstExpr::zero();
        for (m, c) in self.terms() {
            out.terms.insert(m.clone(), c * q);
        }
        out
    }

    /// Bilinear monomial merge followed by reduction.
    pub fn mul(&self, other: &ConstExpr) -> ConstExpr {
        let mut out = ConstExpr::zero();
        for (m1, q1) in self.terms() {
            for (m2, q2) in other.terms() {
                out.add_term(q1 * q2, m1.mul(m2));
            }
        }
        out.reduce()
    }

    pub fn pow(&self, k: u32) -> ConstExpr {
        let mut out = ConstExpr::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Applies the classical reduction rules: ζ(2k) → rational·π^{2k} and
    /// Li₁(1/2), Li₂(1/2), Li₃(1/2) → their log 2 / π² / ζ(3) values.
    pub fn reduce(&self) -> ConstExpr {
        let mut out = ConstExpr::zero();
        'term: for (m, q) in self.terms() {
            for &(s, k) in m.factors() {
                if let Some(repl) = symbol_reduction(s) {
                    let rest = ConstExpr::term(q.clone(), m.without(s));
                    let reduced = rest.mul(&repl.pow(k));
                    out = out.add(&reduced);
                    continue 'term;
                }
            }
            out.add_term(q.clone(), m.clone());
        }
        out
    }

    /// Weight if homogeneous, None for zero or mixed weights.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    /// Errors with the offending monomial if γ is present.
    pub fn assert_gamma_free(&self) -> Result<()> {
        for m in self.terms.keys() {
            if m.contains(ConstSymbol::EulerGamma) {
                return Err(Error::GammaPresent(format!("monomial {m}")));
            }
        }
        Ok(())
    }

    /// Checks that π appears only with even powers (finalized closed forms).
    pub fn has_even_pi_powers(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.exponent_of(ConstSymbol::Pi) % 2 == 0)
    }

    /// Splits into Σ π^k · (π-free part), used when comparing real and
    /// imaginary parts of contour expansions.
    pub fn pi_parts(&self) -> BTreeMap<u32, ConstExpr> {
        let mut out: BTreeMap<u32, ConstExpr> = BTreeMap::new();
        for (m, q) in self.terms() {
            let k = m.exponent_of(ConstSymbol::Pi);
            out.entry(k)
                .or_default()
                .add_term(q.clone(), m.without(ConstSymbol::Pi));
        }
        out
    }
}

impl fmt::Display for ConstExpr {
    /// Canonical export grammar: `q1*m1 + q2*m2 + ...` with exact rationals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, q) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{q}")?;
            } else if q.is_one() {
                write!(f, "{m}")?;
            } else if (-q.clone()).is_one() {
                write!(f, "-{m}")?;
            } else {
                write!(f, "{q}*{m}")?;
            }
        }
        Ok(())
    }
}

fn symbol_reduction(s: ConstSymbol) -> Option<ConstExpr> {
    match s {
        ConstSymbol::Zeta(n) if n >= 2 && n % 2 == 0 => Some(zeta_even(n)),
        ConstSymbol::LiHalf(1) => Some(ConstExpr::term(
            Rational::one(),
            ConstMonomial::symbol(ConstSymbol::Log2),
        )),
        ConstSymbol::LiHalf(2) => {
            // Li₂(1/2) = π²/12 − log²2/2
            let mut e = ConstExpr::term(rat(1, 12), ConstMonomial::power(ConstSymbol::Pi, 2));
            e.add_term(rat(-1, 2), ConstMonomial::power(ConstSymbol::Log2, 2));
            Some(e)
        }
        ConstSymbol::LiHalf(3) => {
            // Li₃(1/2) = 7ζ(3)/8 − π² log2/12 + log³2/6
            let mut e = ConstExpr::term(rat(7, 8), ConstMonomial::symbol(ConstSymbol::Zeta(3)));
            e.add_term(
                rat(-1, 12),
                ConstMonomial::from_factors(vec![(ConstSymbol::Pi, 2), (ConstSymbol::Log2, 1)]),
            );
            e.add_term(rat(1, 6), ConstMonomial::power(ConstSymbol::Log2, 3));
            Some(e)
        }
        _ => None,
    }
}

/// ζ(2k) = |B_{2k}| (2π)^{2k} / (2 (2k)!) as a rational multiple of π^{2k}.
fn zeta_even(n: u32) -> ConstExpr {
    debug_assert!(n % 2 == 0 && n >= 2);
    let coeff = bernoulli(n).abs() * Rational::from_integer(BigInt::from(2).pow(n))
        / (rat_int(2) * Rational::from_integer(factorial(n)));
    ConstExpr::term(coeff, ConstMonomial::power(ConstSymbol::Pi, n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).map(BigInt::from).product()
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Bernoulli number Bₙ (B₁ = −1/2 convention) via the defining recurrence.
pub fn bernoulli(n: u32) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(n as usize + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rational::one());
            continue;
        }
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0  ⇒  B_m = −(1/C(m+1,m)) Σ_{j<m} C(m+1,j) B_j
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binomial(m + 1, j as u32)) * bj;
        }
        b.push(-acc / Rational::from_integer(binomial(m + 1, m)));
    }
    b.pop().unwrap()
}

/// All canonical monomials of exact weight w over the pool, lexicographic.
pub fn monomials_of_weight(w: u32, pool: &[ConstSymbol]) -> Vec<ConstMonomial> {
    let mut sorted: Vec<ConstSymbol> = pool.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    let mut current: Vec<(ConstSymbol, u32)> = Vec::new();
    fn go(
        syms: &[ConstSymbol],
        remaining: u32,
        current: &mut Vec<(ConstSymbol, u32)>,
        out: &mut Vec<ConstMonomial>,
    ) {
        if remaining == 0 {
            out.push(ConstMonomial::from_factors(current.clone()));
            return;
        }
        let Some((&s, rest)) = syms.split_first() else {
            return;
        };
        let sw = s.weight();
        let max_mult = remaining / sw;
        for mult in (0..=max_mult).rev() {
            if mult > 0 {
                current.push((s, mult));
            }
            go(rest, remaining - mult * sw, current, out);
            if mult > 0 {
                current.pop();
            }
        }
    }
    go(&sorted, w, &mut current, &mut out);
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Export-grammar parsing
// ---------------------------------------------------------------------------

/// Parses the canonical rendering back into a ConstExpr (exact round-trip).
pub fn parse_const_expr(input: &str) -> Result<ConstExpr> {
    let input = input.trim();
    if input == "0" {
        return Ok(ConstExpr::zero());
    }
    let mut expr = ConstExpr::zero();
    for term in split_top_level_terms(input) {
        let (q, m) = parse_term(term.trim())?;
        expr.add_term(q, m);
    }
    Ok(expr.reduce())
}

fn split_top_level_terms(input: &str) -> Vec<&str> {
    // Terms are joined by " + "; minus signs live inside coefficients.
    input.split(" + ").collect()
}

fn parse_term(term: &str) -> Result<(Rational, ConstMonomial)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff = Rational::one();
    let mut factors: Vec<(ConstSymbol, u32)> = Vec::new();
    let mut rest = term;
    if let Some(stripped) = rest.strip_prefix('-') {
        coeff = -coeff;
        rest = stripped;
    }
    for piece in rest.split('*') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::Parse(format!("malformed term {term:?}")));
        }
        if piece.chars().next().unwrap().is_ascii_digit() {
            coeff *= parse_rational(piece)?;
        } else {
            let (sym, pow) = parse_symbol_power(piece)?;
            factors.push((sym, pow));
        }
    }
    Ok((coeff, ConstMonomial::from_factors(factors)))
}

fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => Ok(Rational::new(parse_int(p)?, parse_int(q)?)),
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

fn parse_symbol_power(s: &str) -> Result<(ConstSymbol, u32)> {
    let (base, pow) = match s.rsplit_once('^') {
        // `]` guards against splitting inside U[w,k] (which has no powers in
        // canonical output only when pow == 1).
        Some((b, p)) if !p.contains(']') => (
            b,
            p.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad power in {s:?}")))?,
        ),
        _ => (s, 1),
    };
    let sym = parse_symbol(base)?;
    Ok((sym, pow))
}

fn parse_symbol(s: &str) -> Result<ConstSymbol> {
    let bracket_arg = |prefix: &str| -> Result<u32> {
        s.strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .and_then(|r| r.parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("bad symbol {s:?}")))
    };
    match s {
        "Log2" => Ok(ConstSymbol::Log2),
        "Pi" => Ok(ConstSymbol::Pi),
        "F1" => Ok(ConstSymbol::Named(NamedConst::F1)),
        "G1" => Ok(ConstSymbol::Named(NamedConst::G1)),
        "G2" => Ok(ConstSymbol::Named(NamedConst::G2)),
        "H1" => Ok(ConstSymbol::Named(NamedConst::H1)),
        "H2" => Ok(ConstSymbol::Named(NamedConst::H2)),
        "H3" => Ok(ConstSymbol::Named(NamedConst::H3)),
        "EulerGamma" => Ok(ConstSymbol::EulerGamma),
        _ if s.starts_with("Zeta") => Ok(ConstSymbol::Zeta(bracket_arg("Zeta")?)),
        _ if s.starts_with("LiHalf") => Ok(ConstSymbol::LiHalf(bracket_arg("LiHalf")?)),
        _ if s.starts_with("U[") => {
            let inner = s
                .strip_prefix("U[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("bad symbol {s:?}")))?;
            let (w, k) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad symbol {s:?}")))?;
            let w = w
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad symbol {s:?}")))?;
            let k = k
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad symbol {s:?}")))?;
            Ok(ConstSymbol::Named(NamedConst::U(w, k)))
        }
        _ => Err(Error::Parse(format!("unknown symbol {s:?}"))),
    }
}

// Convenience constructors used throughout the generators.

pub fn sym_log2() -> ConstExpr {
    ConstExpr::from_symbol(ConstSymbol::Log2)
}

pub fn sym_pi() -> ConstExpr {
    ConstExpr::from_symbol(ConstSymbol::Pi)
}

pub fn sym_zeta(n: u32) -> ConstExpr {
    ConstExpr::from_symbol(ConstSymbol::Zeta(n))
}

pub fn sym_li_half(n: u32) -> ConstExpr {
    ConstExpr::from_symbol(ConstSymbol::LiHalf(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_even_reductions() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90, ζ(6) = π⁶/945
        assert_eq!(
            sym_zeta(2),
            ConstExpr::term(rat(1, 6), ConstMonomial::power(ConstSymbol::Pi, 2))
        );
        assert_eq!(
            sym_zeta(4),
            ConstExpr::term(rat(1, 90), ConstMonomial::power(ConstSymbol::Pi, 4))
        );
        assert_eq!(
            sym_zeta(6),
            ConstExpr::term(rat(1, 945), ConstMonomial::power(ConstSymbol::Pi, 6))
        );
        assert_eq!(
            sym_zeta(8),
            ConstExpr::term(rat(1, 9450), ConstMonomial::power(ConstSymbol::Pi, 8))
        );
    }

    #[test]
    fn li_half_reductions() {
        let li2 = sym_li_half(2);
        let mut expected = ConstExpr::term(rat(1, 12), ConstMonomial::power(ConstSymbol::Pi, 2));
        expected.add_term(rat(-1, 2), ConstMonomial::power(ConstSymbol::Log2, 2));
        assert_eq!(li2, expected);
        assert_eq!(sym_li_half(1), sym_log2());
    }

    #[test]
    fn mul_examples() {
        let pi2_over_6 = sym_zeta(2);
        let pi4_over_36 = pi2_over_6.mul(&pi2_over_6);
        assert_eq!(
            pi4_over_36,
            ConstExpr::term(rat(1, 36), ConstMonomial::power(ConstSymbol::Pi, 4))
        );
        let z3sq = sym_zeta(3).mul(&sym_zeta(3));
        assert_eq!(z3sq.homogeneous_weight(), Some(6));
        let prod = sym_log2().mul(&sym_li_half(4));
        assert_eq!(prod.homogeneous_weight(), Some(5));
        assert_eq!(prod.num_terms(), 1);
    }

    #[test]
    fn reduce_is_idempotent() {
        let x = sym_zeta(2)
            .add(&sym_li_half(3))
            .mul(&sym_zeta(4).add(&sym_log2()));
        assert_eq!(x.reduce(), x.reduce().reduce());
    }

    #[test]
    fn mul_weight_additivity_and_commutativity() {
        let x = sym_zeta(3).add(&sym_pi().pow(3)).add(&sym_li_half(3));
        let y = sym_li_half(4).add(&sym_zeta(2).mul(&sym_log2().pow(2)));
        assert_eq!(x.homogeneous_weight(), Some(3));
        assert_eq!(y.homogeneous_weight(), Some(4));
        let xy = x.mul(&y);
        assert_eq!(xy.homogeneous_weight(), Some(7));
        assert_eq!(xy, y.mul(&x));
        let z = sym_zeta(5).add(&sym_log2().pow(5));
        assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn gamma_free_assertion() {
        assert!(sym_zeta(2).assert_gamma_free().is_ok());
        let bad = ConstExpr::term(
            rat(1, 1),
            ConstMonomial::from_factors(vec![
                (ConstSymbol::EulerGamma, 1),
                (ConstSymbol::Log2, 1),
            ]),
        );
        assert!(bad.assert_gamma_free().is_err());
    }

    #[test]
    fn monomial_counting() {
        let pool = [ConstSymbol::Log2, ConstSymbol::Pi];
        let mons = monomials_of_weight(2, &pool);
        assert_eq!(mons.len(), 3);
        let pool3 = [ConstSymbol::Log2, ConstSymbol::Pi, ConstSymbol::Zeta(3)];
        assert_eq!(monomials_of_weight(3, &pool3).len(), 5);
        assert_eq!(monomials_of_weight(0, &pool3), vec![ConstMonomial::one()]);
    }

    #[test]
    fn grammar_round_trip() {
        let exprs = [
            sym_zeta(3).scale(&rat(7, 4)).mul(&sym_log2()),
            sym_li_half(4)
                .scale(&rat(2, 1))
                .add(&sym_pi().pow(4).scale(&rat(-3, 160)))
                .add(&sym_log2().pow(4).scale(&rat(1, 12))),
            ConstExpr::zero(),
            ConstExpr::from_rational(rat(-5, 7)),
            ConstExpr::from_symbol(ConstSymbol::Named(NamedConst::U(9, 2))).mul(&sym_log2()),
            ConstExpr::from_symbol(ConstSymbol::Named(NamedConst::F1)).scale(&rat(1, 2)),
        ];
        for e in exprs {
            let text = e.to_string();
            let back = parse_const_expr(&text).unwrap();
            assert_eq!(back, e, "round-trip failed for {text}");
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }
}
