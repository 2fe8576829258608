//! The seven relation-generation methods, producing verified `Relation`
//! records weight by weight.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Zero};
use rug::Float;

use crate::constalg::{
    binomial, factorial, rat, ConstExpr, ConstMonomial, ConstSymbol, Rational,
};
use crate::error::{Error, Result};
use crate::indexcore::{enumerate_convergent, Denominator, IntegralIndex};
use crate::logexpand::{
    expand_contour, expand_mi1, expand_mi2, fractional_substitute, lemma2_value, square_replace,
    Identity, Part,
};
use crate::numverify::{rational_to_float, Evaluator};
use crate::seriesring::{beta_expansion_coeff, extract_hyp2f1, hyp2f1_series, BetaPoint};

/// Provenance tag of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Ibp,
    Ft,
    Gp,
    Sr,
    Ci,
    Mi,
    TwoF1,
    Seed,
}

impl Method {
    /// The seven generating methods in the order they are adjoined.
    pub const GENERATING: [Method; 7] = [
        Method::Ibp,
        Method::Ft,
        Method::Gp,
        Method::Sr,
        Method::Ci,
        Method::Mi,
        Method::TwoF1,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Ibp => "IBP",
            Method::Ft => "FT",
            Method::Gp => "GP",
            Method::Sr => "SR",
            Method::Ci => "CI",
            Method::Mi => "MI",
            Method::TwoF1 => "2F1",
            Method::Seed => "SEED",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IBP" => Ok(Method::Ibp),
            "FT" => Ok(Method::Ft),
            "GP" => Ok(Method::Gp),
            "SR" => Ok(Method::Sr),
            "CI" => Ok(Method::Ci),
            "MI" => Ok(Method::Mi),
            "2F1" => Ok(Method::TwoF1),
            "SEED" => Ok(Method::Seed),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// An exact statement Σ q·I(weight w) = constant + Σ q·monomial·I(weight < w).
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub weight: u32,
    pub method: Method,
    pub lhs: BTreeMap<IntegralIndex, Rational>,
    pub rhs_const: ConstExpr,
    pub rhs_lower: Vec<(Rational, ConstMonomial, IntegralIndex)>,
}

impl Relation {
    pub fn new(
        weight: u32,
        method: Method,
        lhs: BTreeMap<IntegralIndex, Rational>,
        rhs_const: ConstExpr,
        rhs_lower: Vec<(Rational, ConstMonomial, IntegralIndex)>,
    ) -> Result<Relation> {
        if lhs.is_empty() {
            return Err(Error::Precondition("relation with empty lhs".into()));
        }
        for (idx, q) in &lhs {
            if q.is_zero() {
                return Err(Error::Precondition(format!("zero coefficient on {idx}")));
            }
            if !idx.is_convergent() {
                return Err(Error::Precondition(format!("non-convergent {idx} in lhs")));
            }
            if idx.weight() != weight {
                return Err(Error::Precondition(format!(
                    "{idx} has weight {} in a weight-{weight} relation",
                    idx.weight()
                )));
            }
        }
        for (q, mono, idx) in &rhs_lower {
            if q.is_zero() {
                return Err(Error::Precondition(format!("zero coefficient on rhs {idx}")));
            }
            if !idx.is_convergent() {
                return Err(Error::Precondition(format!("non-convergent {idx} in rhs")));
            }
            if idx.weight() >= weight {
                return Err(Error::Precondition(format!(
                    "rhs index {idx} is not of lower weight"
                )));
            }
            if mono.weight() + idx.weight() != weight {
                return Err(Error::Precondition(format!(
                    "inhomogeneous rhs term {mono}·{idx} in weight-{weight} relation"
                )));
            }
        }
        rhs_const.assert_gamma_free()?;
        if let Some(cw) = rhs_const.homogeneous_weight() {
            if cw != weight {
                return Err(Error::Precondition(format!(
                    "rhs constant has weight {cw} in a weight-{weight} relation"
                )));
            }
        } else if !rhs_const.is_zero() {
            return Err(Error::Precondition(
                "rhs constant is weight-inhomogeneous".into(),
            ));
        }
        Ok(Relation {
            weight,
            method,
            lhs,
            rhs_const,
            rhs_lower,
        })
    }

    /// Splits a normalized identity Σ q·mono·I = c into the weight-w lhs and
    /// the lower-weight rhs. Returns None when no weight-w integral appears.
    pub fn from_identity(weight: u32, method: Method, id: Identity) -> Result<Option<Relation>> {
        let id = id.normalize();
        let mut lhs: BTreeMap<IntegralIndex, Rational> = BTreeMap::new();
        let mut rhs_lower = Vec::new();
        for (q, mono, idx) in id.terms {
            if idx.weight() == weight {
                if !mono.is_one() {
                    return Err(Error::Precondition(format!(
                        "weight-{weight} integral {idx} carries monomial {mono}"
                    )));
                }
                let e = lhs.entry(idx).or_insert_with(Rational::zero);
                *e += q;
                if e.is_zero() {
                    lhs.remove(&idx);
                }
            } else if idx.weight() < weight {
                rhs_lower.push((-q, mono, idx));
            } else {
                return Err(Error::Precondition(format!(
                    "identity term {idx} exceeds weight {weight}"
                )));
            }
        }
        if lhs.is_empty() {
            return Ok(None);
        }
        Relation::new(weight, method, lhs, id.constant, rhs_lower).map(Some)
    }
}

impl fmt::Display for Relation {
    /// Line format `method | Σ q·iXXXX = constant [+ Σ q·mono·iYYYY]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | ", self.method)?;
        let fmt_coeff = |q: &Rational, body: &str| {
            if q.is_one() {
                body.to_string()
            } else if (-q.clone()).is_one() {
                format!("-{body}")
            } else {
                format!("{q}*{body}")
            }
        };
        let lhs: Vec<String> = self
            .lhs
            .iter()
            .map(|(idx, q)| fmt_coeff(q, &idx.to_string()))
            .collect();
        write!(f, "{} = ", lhs.join(" + "))?;
        let mut rhs: Vec<String> = Vec::new();
        if !self.rhs_const.is_zero() {
            rhs.push(self.rhs_const.to_string());
        }
        for (q, mono, idx) in &self.rhs_lower {
            let body = if mono.is_one() {
                idx.to_string()
            } else {
                format!("{mono}*{idx}")
            };
            rhs.push(fmt_coeff(q, &body));
        }
        if rhs.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", rhs.join(" + "))
        }
    }
}

fn idx(a: u32, b: u32, c: u32, d: Denominator) -> IntegralIndex {
    IntegralIndex::new(a, b, c, d)
}

/// Integration by parts: the three families over a+b+c = w−1, discarding
/// instances containing a non-convergent integral, plus the elementary
/// evaluation of i_{0,0,w−1,2}.
pub fn gen_ibp(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 2);
    let mut out = Vec::new();
    let total = w - 1;
    let mut push = |terms: Vec<(i64, IntegralIndex)>, constant: ConstExpr| -> Result<()> {
        let mut id = Identity::default();
        for (q, i) in &terms {
            if *q != 0 {
                if !i.is_convergent() {
                    return Ok(()); // discard the whole instance
                }
                id.push(rat(*q, 1), ConstMonomial::one(), *i);
            }
        }
        id.constant = constant;
        if let Some(rel) = Relation::from_identity(w, Method::Ibp, id)? {
            out.push(rel);
        }
        Ok(())
    };
    for a in 0..=total {
        for b in 0..=(total - a) {
            let c = total - a - b;
            let (ai, bi, ci) = (a as i64, b as i64, c as i64);
            // (1+a)·i_{abc0} = b·i_{a+1,b−1,c,1} + c·i_{a+1,b,c−1,2}
            if b >= 1 || c >= 1 {
                let mut terms = vec![(1 + ai, idx(a, b, c, Denominator::OneMinusX))];
                if b >= 1 {
                    terms.push((-bi, idx(a + 1, b - 1, c, Denominator::X)));
                }
                if c >= 1 {
                    terms.push((-ci, idx(a + 1, b, c - 1, Denominator::OnePlusX)));
                }
                push(terms, ConstExpr::zero())?;
            }
            // (1+b)·i_{abc1} = a·i_{a−1,b+1,c,0} − c·i_{a,b+1,c−1,2}
            if a >= 1 || c >= 1 {
                let mut terms = vec![(1 + bi, idx(a, b, c, Denominator::X))];
                if a >= 1 {
                    terms.push((-ai, idx(a - 1, b + 1, c, Denominator::OneMinusX)));
                }
                if c >= 1 {
                    terms.push((ci, idx(a, b + 1, c - 1, Denominator::OnePlusX)));
                }
                push(terms, ConstExpr::zero())?;
            }
            // (1+c)·i_{abc2} = a·i_{a−1,b,c+1,0} − b·i_{a,b−1,c+1,1},
            // with the boundary term log^{c+1}2 surviving when a = b = 0.
            {
                let mut terms = vec![(1 + ci, idx(a, b, c, Denominator::OnePlusX))];
                if a >= 1 {
                    terms.push((-ai, idx(a - 1, b, c + 1, Denominator::OneMinusX)));
                }
                if b >= 1 {
                    terms.push((bi, idx(a, b - 1, c + 1, Denominator::X)));
                }
                let constant = if a == 0 && b == 0 {
                    ConstExpr::term(Rational::one(), ConstMonomial::power(ConstSymbol::Log2, w))
                } else {
                    ConstExpr::zero()
                };
                push(terms, constant)?;
            }
        }
    }
    Ok(out)
}

/// Fractional transformation x = (1−u)/(1+u) applied to every admissible
/// weight-w integral.
pub fn gen_fractional(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 2);
    let mut out = Vec::new();
    for i in enumerate_convergent(w) {
        let ok = match i.d {
            Denominator::OnePlusX => true,
            Denominator::OneMinusX => i.b >= 1,
            Denominator::X => false,
        };
        if !ok {
            continue;
        }
        let mut id = Identity::default();
        id.push(Rational::one(), ConstMonomial::one(), i);
        for t in fractional_substitute(i)? {
            let ti = t.to_index().ok_or_else(|| {
                Error::Precondition("composite denominator survived substitution".into())
            })?;
            id.push(
                -t.coeff,
                ConstMonomial::power(ConstSymbol::Log2, t.log2),
                ti,
            );
        }
        if let Some(rel) = Relation::from_identity(w, Method::Ft, id)? {
            out.push(rel);
        }
    }
    Ok(out)
}

/// Direct closed-form evaluations: the geometric-series value of
/// i_{w−1,0,0,2}, the i_{0,0,w−1,1} formula, and the beta-expansion values of
/// the i_{m,n,0,1} / i_{m,n,0,0} families.
pub fn gen_explicit(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 2);
    let mut out = Vec::new();
    let single = |i: IntegralIndex, value: ConstExpr| -> Result<Relation> {
        let mut lhs = BTreeMap::new();
        lhs.insert(i, Rational::one());
        Relation::new(w, Method::Gp, lhs, value, Vec::new())
    };
    // i_{w−1,0,0,2} = (−1)^{w−1}(w−1)!·Li_w(1/2)
    out.push(single(
        idx(w - 1, 0, 0, Denominator::OnePlusX),
        lemma2_value(w - 1),
    )?);
    // i_{0,0,w−1,1} = log^w2/w + (w−1)!ζ(w)
    //                − Σ_{k=0}^{w−1} C(w−1,k)·k!·log^{w−1−k}2·Li_{k+1}(1/2)
    {
        let n = w;
        let mut value = ConstExpr::term(
            rat(1, n as i64),
            ConstMonomial::power(ConstSymbol::Log2, n),
        );
        value.add_term(
            Rational::from_integer(factorial(n - 1)),
            ConstMonomial::symbol(ConstSymbol::Zeta(n)),
        );
        for k in 0..n {
            let coeff = Rational::from_integer(binomial(n - 1, k))
                * Rational::from_integer(factorial(k));
            value.add_term(
                -coeff,
                ConstMonomial::from_factors(vec![
                    (ConstSymbol::Log2, n - 1 - k),
                    (ConstSymbol::LiHalf(k + 1), 1),
                ]),
            );
        }
        out.push(single(idx(0, 0, w - 1, Denominator::X), value.reduce())?);
    }
    // Beta moments: i_{m,n,0,1} (m ≥ 1) and i_{m,n,0,0} (n ≥ 1), m+n = w−1.
    for m in 0..w {
        let n = w - 1 - m;
        if m >= 1 {
            let value = beta_expansion_coeff(BetaPoint::ZeroOne, n, m)?;
            out.push(single(idx(m, n, 0, Denominator::X), value)?);
        }
        if n >= 1 {
            // i_{m,n,0,0} = i_{n,m,0,1} under x ↦ 1−x.
            let value = beta_expansion_coeff(BetaPoint::ZeroOne, m, n)?;
            out.push(single(idx(m, n, 0, Denominator::OneMinusX), value)?);
        }
    }
    Ok(out)
}

/// Square replacement, both kinds; kind-2 right sides resolved through the
/// auxiliary beta expansion.
pub fn gen_square(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 3);
    let mut out = Vec::new();
    for a in 1..w {
        let b = w - 1 - a;
        let sq = square_replace(1, a, b)?;
        let mut id = Identity::default();
        for (q, i) in sq.terms {
            id.push(q, ConstMonomial::one(), i);
        }
        debug_assert!(sq.aux.is_none());
        if let Some(rel) = Relation::from_identity(w, Method::Sr, id)? {
            out.push(rel);
        }
    }
    for b in 1..w {
        let a = w - 1 - b;
        let sq = square_replace(2, a, b)?;
        let mut id = Identity::default();
        for (q, i) in sq.terms {
            id.push(q, ConstMonomial::one(), i);
        }
        let (qa, aux) = sq.aux.expect("kind 2 always has the auxiliary term");
        // Σ terms + qa·Aux = 0  ⇒  Σ terms = −qa·AuxValue
        let aux_value = beta_expansion_coeff(BetaPoint::HalfZero, aux.n, aux.m)?;
        id.constant = aux_value.scale(&-qa);
        if let Some(rel) = Relation::from_identity(w, Method::Sr, id)? {
            out.push(rel);
        }
    }
    Ok(out)
}

/// Contour integration: real parts at p+q+r = w−1, imaginary parts at
/// p+q+r = w, with q, r ≥ 1.
pub fn gen_contour(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 3);
    let mut out = Vec::new();
    let mut run = |total: u32, part: Part| -> Result<()> {
        for q in 1..total {
            for r in 1..(total - q + 1) {
                let p = total - q - r;
                let id = expand_contour(p, q, r, part)?;
                if let Some(rel) = Relation::from_identity(w, Method::Ci, id)? {
                    out.push(rel);
                }
            }
        }
        Ok(())
    };
    run(w - 1, Part::Real)?;
    run(w, Part::Imag)?;
    Ok(out)
}

/// Multiple-integral relations: the even-weight product formula and the
/// general double-integral identity.
pub fn gen_multiint(w: u32) -> Result<Vec<Relation>> {
    gen_multiint_with(w, true, true)
}

/// Variant with each of the two families individually selectable.
pub fn gen_multiint_with(w: u32, first: bool, second: bool) -> Result<Vec<Relation>> {
    assert!(w >= 3);
    let mut out = Vec::new();
    if first && w >= 4 && w % 2 == 0 {
        let id = expand_mi1((w - 2) / 2)?;
        if let Some(rel) = Relation::from_identity(w, Method::Mi, id)? {
            out.push(rel);
        }
    }
    if second && w >= 4 {
        let id = expand_mi2(w - 3)?;
        if let Some(rel) = Relation::from_identity(w, Method::Mi, id)? {
            out.push(rel);
        }
    }
    Ok(out)
}

/// Hypergeometric connection relations over all m+n+r = w.
pub fn gen_2f1(w: u32) -> Result<Vec<Relation>> {
    assert!(w >= 2);
    let series = hyp2f1_series(w)?;
    let mut out = Vec::new();
    for m in 0..=w {
        for n in 0..=(w - m) {
            let r = w - m - n;
            let id = extract_hyp2f1(&series, m, n, r)?;
            if id.terms.is_empty() {
                if !id.constant.is_zero() {
                    return Err(Error::Inconsistent(format!(
                        "connection identity at ({m},{n},{r}) reduced to 0 = {}",
                        id.constant
                    )));
                }
                continue;
            }
            if let Some(rel) = Relation::from_identity(w, Method::TwoF1, id)? {
                out.push(rel);
            }
        }
    }
    Ok(out)
}

/// All relations for one method at one weight.
pub fn generate(w: u32, method: Method) -> Result<Vec<Relation>> {
    match method {
        Method::Ibp => gen_ibp(w),
        Method::Ft => gen_fractional(w),
        Method::Gp => gen_explicit(w),
        Method::Sr => {
            if w >= 3 {
                gen_square(w)
            } else {
                Ok(Vec::new())
            }
        }
        Method::Ci => {
            if w >= 3 {
                gen_contour(w)
            } else {
                Ok(Vec::new())
            }
        }
        Method::Mi => {
            if w >= 3 {
                gen_multiint(w)
            } else {
                Ok(Vec::new())
            }
        }
        Method::TwoF1 => gen_2f1(w),
        Method::Seed => Ok(Vec::new()),
    }
}

/// |lhs − rhs| evaluated numerically.
pub fn verify_relation(ev: &Evaluator, rel: &Relation) -> Result<Float> {
    let prec = ev.ctx.prec_bits;
    let mut lhs = Float::with_val(prec, 0);
    for (i, q) in &rel.lhs {
        lhs += rational_to_float(prec, q) * ev.quad_index(*i)?;
    }
    let mut rhs = ev.eval_expr(&rel.rhs_const)?;
    for (q, mono, i) in &rel.rhs_lower {
        let mv = ev.eval_expr(&ConstExpr::term(Rational::one(), mono.clone()))?;
        rhs += rational_to_float(prec, q) * mv * ev.quad_index(*i)?;
    }
    Ok(Float::with_val(prec, lhs - rhs).abs())
}

/// Numeric gate used by the pipeline: residual must stay below
/// 10^(−(digits−10)).
pub fn check_relation(ev: &Evaluator, rel: &Relation) -> Result<()> {
    use rug::ops::Pow;
    let resid = verify_relation(ev, rel)?;
    let bound = Float::with_val(ev.ctx.prec_bits, 10).pow(-(ev.ctx.digits as i32 - 10));
    if resid >= bound {
        return Err(Error::Inconsistent(format!(
            "relation failed numeric verification (residual {}): {rel}",
            ev.to_decimal(&resid)
        )));
    }
    Ok(())
}
