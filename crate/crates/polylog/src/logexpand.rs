//! Formal expansion engine for integrands built from powers of log(1−x),
//! log x, log(1+x) and log 2 over the three denominators, plus the
//! substitution expansions behind the relation generators.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::constalg::{
    binomial, rat, ConstExpr, ConstMonomial, ConstSymbol, Rational,
};
use crate::error::{Error, Result};
use crate::indexcore::{AuxHalfIntegral, Denominator, IntegralIndex};

/// Denominator of a formal term; composite forms are transient and get split
/// by partial fractions before a term list is finalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DenomKind {
    One,
    OneMinusX,
    X,
    OnePlusX,
    XOneMinusX,
    XOnePlusX,
    OneMinusXOnePlusX,
}

/// coeff · log2^{log2} · logᵉ¹(1−x) logᵉ²x logᵉ³(1+x) / denom
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogTerm {
    pub coeff: Rational,
    pub log2: u32,
    pub e1: u32,
    pub e2: u32,
    pub e3: u32,
    pub denom: DenomKind,
}

impl LogTerm {
    /// The integral this term names, once the denominator is atomic.
    pub fn to_index(&self) -> Option<IntegralIndex> {
        let d = match self.denom {
            DenomKind::OneMinusX => Denominator::OneMinusX,
            DenomKind::X => Denominator::X,
            DenomKind::OnePlusX => Denominator::OnePlusX,
            _ => return None,
        };
        Some(IntegralIndex::new(self.e1, self.e2, self.e3, d))
    }
}

/// A verified formal statement Σ qᵢ·monoᵢ·I(idxᵢ) = constant.
#[derive(Debug, Clone, Default)]
pub struct Identity {
    pub terms: Vec<(Rational, ConstMonomial, IntegralIndex)>,
    pub constant: ConstExpr,
}

impl Identity {
    pub fn push(&mut self, q: Rational, mono: ConstMonomial, idx: IntegralIndex) {
        if !q.is_zero() {
            self.terms.push((q, mono, idx));
        }
    }

    /// Merges duplicate (monomial, index) entries and drops zeros.
    pub fn normalize(mut self) -> Identity {
        let mut map: BTreeMap<(ConstMonomial, IntegralIndex), Rational> = BTreeMap::new();
        for (q, m, i) in self.terms.drain(..) {
            *map.entry((m, i)).or_insert_with(Rational::zero) += q;
        }
        Identity {
            terms: map
                .into_iter()
                .filter(|(_, q)| !q.is_zero())
                .map(|((m, i), q)| (q, m, i))
                .collect(),
            constant: self.constant,
        }
    }
}

/// A linear combination of log atoms appearing under a power:
/// c₂·log2 + a₁·log(1−u) + a₂·log u + a₃·log(1+u) + cπ·(πi).
#[derive(Debug, Clone, Copy, Default)]
pub struct LinForm {
    pub log2: i64,
    pub l1: i64,
    pub l2: i64,
    pub l3: i64,
    pub pi_i: i64,
}

impl LinForm {
    pub fn log_x() -> Self {
        LinForm { l2: 1, ..Default::default() }
    }
    pub fn log_one_minus_x() -> Self {
        LinForm { l1: 1, ..Default::default() }
    }
    pub fn log_one_plus_x() -> Self {
        LinForm { l3: 1, ..Default::default() }
    }
    /// log(2u/(1+u)) = log2 + log u − log(1+u)
    pub fn frac_two_u() -> Self {
        LinForm { log2: 1, l2: 1, l3: -1, ..Default::default() }
    }
    /// log((1−u)/(1+u)) = log(1−u) − log(1+u)
    pub fn frac_ratio() -> Self {
        LinForm { l1: 1, l3: -1, ..Default::default() }
    }
    /// log(2/(1+u)) = log2 − log(1+u)
    pub fn frac_two() -> Self {
        LinForm { log2: 1, l3: -1, ..Default::default() }
    }
}

/// Exponent key of an expanded product: powers of (πi), log2 and the three
/// log atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    ipow: u32,
    log2: u32,
    e1: u32,
    e2: u32,
    e3: u32,
}

type Expansion = BTreeMap<Key, Rational>;

fn mul_atom(acc: &Expansion, atom_idx: usize, coeff: i64) -> Expansion {
    let mut out = Expansion::new();
    for (k, q) in acc {
        let mut nk = *k;
        match atom_idx {
            0 => nk.log2 += 1,
            1 => nk.e1 += 1,
            2 => nk.e2 += 1,
            3 => nk.e3 += 1,
            4 => nk.ipow += 1,
            _ => unreachable!(),
        }
        let nq = q * rat(coeff, 1);
        *out.entry(nk).or_insert_with(Rational::zero) += nq;
    }
    out
}

fn mul_form(acc: Expansion, form: &LinForm) -> Expansion {
    let mut out = Expansion::new();
    let atoms = [
        (0usize, form.log2),
        (1, form.l1),
        (2, form.l2),
        (3, form.l3),
        (4, form.pi_i),
    ];
    for (idx, c) in atoms {
        if c == 0 {
            continue;
        }
        for (k, q) in mul_atom(&acc, idx, c) {
            if !q.is_zero() {
                *out.entry(k).or_insert_with(Rational::zero) += q;
            }
        }
    }
    out.retain(|_, q| !q.is_zero());
    out
}

fn expand_forms(factors: &[(LinForm, u32)]) -> Expansion {
    let mut acc = Expansion::new();
    acc.insert(
        Key { ipow: 0, log2: 0, e1: 0, e2: 0, e3: 0 },
        Rational::one(),
    );
    for &(form, power) in factors {
        for _ in 0..power {
            acc = mul_form(acc, &form);
        }
    }
    acc
}

/// Full multinomial expansion of a product of powered linear log forms,
/// with like terms merged. Forms must be real (no πi component).
pub fn expand_product(factors: &[(LinForm, u32)]) -> Vec<LogTerm> {
    assert!(factors.iter().all(|(f, _)| f.pi_i == 0));
    expand_forms(factors)
        .into_iter()
        .map(|(k, q)| LogTerm {
            coeff: q,
            log2: k.log2,
            e1: k.e1,
            e2: k.e2,
            e3: k.e3,
            denom: DenomKind::One,
        })
        .collect()
}

fn split_denominator(denom: DenomKind) -> Vec<(Rational, DenomKind)> {
    match denom {
        // 1/(x(1−x)) = 1/x + 1/(1−x)
        DenomKind::XOneMinusX => vec![
            (Rational::one(), DenomKind::X),
            (Rational::one(), DenomKind::OneMinusX),
        ],
        // 1/(x(1+x)) = 1/x − 1/(1+x)
        DenomKind::XOnePlusX => vec![
            (Rational::one(), DenomKind::X),
            (-Rational::one(), DenomKind::OnePlusX),
        ],
        // 1/((1−x)(1+x)) = (1/2)/(1−x) + (1/2)/(1+x)
        DenomKind::OneMinusXOnePlusX => vec![
            (rat(1, 2), DenomKind::OneMinusX),
            (rat(1, 2), DenomKind::OnePlusX),
        ],
        d => vec![(Rational::one(), d)],
    }
}

fn check_term_convergent(t: &LogTerm) -> Result<()> {
    let ok = match t.denom {
        DenomKind::OneMinusX => t.e2 >= 1,
        DenomKind::X => t.e1 >= 1 || t.e3 >= 1,
        DenomKind::OnePlusX | DenomKind::One => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "expansion produced a non-convergent term {t:?}"
        )))
    }
}

/// The substitution x = (1−u)/(1+u) applied to a convergent integral with
/// d = 2, or d = 0 with b ≥ 1, fully expanded over atomic denominators.
pub fn fractional_substitute(idx: IntegralIndex) -> Result<Vec<LogTerm>> {
    match idx.d {
        Denominator::X => {
            return Err(Error::Precondition(
                "fractional transformation is not performed on 1/x integrals".into(),
            ))
        }
        Denominator::OneMinusX if idx.b == 0 => {
            return Err(Error::Precondition(
                "fractional transformation on 1/(1-x) requires b >= 1".into(),
            ))
        }
        _ => {}
    }
    let numerator = expand_forms(&[
        (LinForm::frac_two_u(), idx.a),
        (LinForm::frac_ratio(), idx.b),
        (LinForm::frac_two(), idx.c),
    ]);
    let denom = match idx.d {
        Denominator::OnePlusX => DenomKind::OnePlusX,
        Denominator::OneMinusX => DenomKind::XOnePlusX,
        Denominator::X => unreachable!(),
    };
    let mut out = Vec::new();
    for (k, q) in numerator {
        debug_assert_eq!(k.ipow, 0);
        for (pf, d) in split_denominator(denom) {
            let term = LogTerm {
                coeff: &q * pf,
                log2: k.log2,
                e1: k.e1,
                e2: k.e2,
                e3: k.e3,
                denom: d,
            };
            check_term_convergent(&term)?;
            out.push(term);
        }
    }
    Ok(merge_terms(out))
}

pub fn merge_terms(terms: Vec<LogTerm>) -> Vec<LogTerm> {
    let mut map: BTreeMap<(u32, u32, u32, u32, DenomKind), Rational> = BTreeMap::new();
    for t in terms {
        *map.entry((t.log2, t.e1, t.e2, t.e3, t.denom))
            .or_insert_with(Rational::zero) += t.coeff;
    }
    map.into_iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|((log2, e1, e2, e3, denom), coeff)| LogTerm {
            coeff,
            log2,
            e1,
            e2,
            e3,
            denom,
        })
        .collect()
}

/// Which part of the complex identity to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Real,
    Imag,
}

/// Expands the four real-axis pieces of ∮ logᵖ(1+z) log^q(1−z) logʳz /(z(1−z)) dz
/// and extracts the requested part of their (vanishing) sum as a formal
/// identity Σ q·π^k·I = 0.
pub fn expand_contour(p: u32, q: u32, r: u32, part: Part) -> Result<Identity> {
    if q < 1 || r < 1 {
        return Err(Error::Precondition(
            "contour expansion requires q >= 1 and r >= 1".into(),
        ));
    }
    // (piece sign, factor forms, denominator)
    let l1 = LinForm::log_one_minus_x();
    let l2 = LinForm::log_x();
    let l3 = LinForm::log_one_plus_x();
    let pieces: Vec<(Rational, Vec<(LinForm, u32)>, DenomKind)> = vec![
        // along [0,1]
        (
            Rational::one(),
            vec![(l3, p), (l1, q), (l2, r)],
            DenomKind::XOneMinusX,
        ),
        // along [1,∞) mapped back to (0,1)
        (
            -Rational::one(),
            vec![
                (LinForm { l3: 1, l2: -1, ..Default::default() }, p),
                (LinForm { l1: 1, l2: -1, pi_i: -1, ..Default::default() }, q),
                (LinForm { l2: if r % 2 == 0 { 1 } else { -1 }, ..Default::default() }, r),
            ],
            DenomKind::OneMinusX,
        ),
        // along [−1,0]
        (
            -Rational::one(),
            vec![
                (l1, p),
                (l3, q),
                (LinForm { l2: 1, pi_i: 1, ..Default::default() }, r),
            ],
            DenomKind::XOnePlusX,
        ),
        // along (−∞,−1] mapped back to (0,1)
        (
            -Rational::one(),
            vec![
                (LinForm { l1: 1, l2: -1, pi_i: 1, ..Default::default() }, p),
                (LinForm { l3: 1, l2: -1, ..Default::default() }, q),
                (LinForm { l2: -1, pi_i: 1, ..Default::default() }, r),
            ],
            DenomKind::OnePlusX,
        ),
    ];

    let mut identity = Identity::default();
    for (sign, factors, denom) in pieces {
        // (−1)^r is folded into the r-th factor of the second piece via the
        // coefficient of log x; here the factor list uses ±1 already.
        let expansion = expand_forms(&factors);
        for (k, coeff) in expansion {
            for (pf, d) in split_denominator(denom) {
                let term = LogTerm {
                    coeff: &coeff * &pf * &sign,
                    log2: k.log2,
                    e1: k.e1,
                    e2: k.e2,
                    e3: k.e3,
                    denom: d,
                };
                check_term_convergent(&term)?;
                debug_assert_eq!(term.log2, 0);
                // i^k: k mod 4 → (part, sign)
                let (term_part, isign) = match k.ipow % 4 {
                    0 => (Part::Real, Rational::one()),
                    1 => (Part::Imag, Rational::one()),
                    2 => (Part::Real, -Rational::one()),
                    3 => (Part::Imag, -Rational::one()),
                    _ => unreachable!(),
                };
                if term_part != part {
                    continue;
                }
                // The imaginary part carries an overall factor of π which is
                // divided out so the identity is weight-homogeneous.
                let pi_pow = match part {
                    Part::Real => k.ipow,
                    Part::Imag => k.ipow - 1,
                };
                let idx = term.to_index().expect("denominator is atomic");
                identity.push(
                    term.coeff * isign,
                    ConstMonomial::power(ConstSymbol::Pi, pi_pow),
                    idx,
                );
            }
        }
    }
    Ok(identity.normalize())
}

/// The square replacement identities of the two substitution procedures.
/// Terms sum to zero up to the auxiliary x^(−1/2) integral of kind 2.
#[derive(Debug, Clone)]
pub struct SquarePrecursor {
    /// Σ q·I(idx) + Σ q·Aux = 0
    pub terms: Vec<(Rational, IntegralIndex)>,
    pub aux: Option<(Rational, AuxHalfIntegral)>,
}

pub fn square_replace(kind: u8, a: u32, b: u32) -> Result<SquarePrecursor> {
    let two_pow = Rational::new(1.into(), num::bigint::BigInt::from(2).pow(b + 1));
    match kind {
        1 => {
            if a < 1 {
                return Err(Error::Precondition("square replacement kind 1 needs a >= 1".into()));
            }
            // Σₖ C(a,k) i_{k,b,a−k,1} = 2^{−(b+1)} i_{a,b,0,1}
            let mut terms: Vec<(Rational, IntegralIndex)> = (0..=a)
                .map(|k| {
                    (
                        Rational::from_integer(binomial(a, k)),
                        IntegralIndex::new(k, b, a - k, Denominator::X),
                    )
                })
                .collect();
            terms.push((-two_pow, IntegralIndex::new(a, b, 0, Denominator::X)));
            Ok(SquarePrecursor { terms, aux: None })
        }
        2 => {
            if b < 1 {
                return Err(Error::Precondition("square replacement kind 2 needs b >= 1".into()));
            }
            // Σₖ C(a,k) i_{k,b,a−k,0} = 2^{−(b+1)}(i_{a,b,0,0} + Aux(b,a))
            let mut terms: Vec<(Rational, IntegralIndex)> = (0..=a)
                .map(|k| {
                    (
                        Rational::from_integer(binomial(a, k)),
                        IntegralIndex::new(k, b, a - k, Denominator::OneMinusX),
                    )
                })
                .collect();
            terms.push((
                -two_pow.clone(),
                IntegralIndex::new(a, b, 0, Denominator::OneMinusX),
            ));
            Ok(SquarePrecursor {
                terms,
                aux: Some((-two_pow, AuxHalfIntegral::new(b, a)?)),
            })
        }
        _ => Err(Error::Precondition("square replacement kind must be 1 or 2".into())),
    }
}

/// Lemma-2 value: ∫₀¹ logᵏ(1−x)/(1+x) dx = (−1)ᵏ k! Li_{k+1}(1/2), reduced.
pub fn lemma2_value(k: u32) -> ConstExpr {
    let sign = if k % 2 == 0 { 1 } else { -1 };
    ConstExpr::from_symbol(ConstSymbol::LiHalf(k + 1))
        .scale(&(rat(sign, 1) * Rational::from_integer(crate::constalg::factorial(k))))
}

/// The double-integral identity of Lemma 6 for even exponent 2n:
/// 2 i_{2n,0,1,1} + 2/(2n+1) i_{2n+1,0,0,2} = (2n)! Σₖ (−1)ᵏ Li_{k+1}(½)Li_{2n+1−k}(½).
pub fn expand_mi1(n: u32) -> Result<Identity> {
    if n < 1 {
        return Err(Error::Precondition("multiple-integral lemma 1 needs n >= 1".into()));
    }
    let mut identity = Identity::default();
    identity.push(
        rat(2, 1),
        ConstMonomial::one(),
        IntegralIndex::new(2 * n, 0, 1, Denominator::X),
    );
    identity.push(
        rat(2, 2 * n as i64 + 1),
        ConstMonomial::one(),
        IntegralIndex::new(2 * n + 1, 0, 0, Denominator::OnePlusX),
    );
    let mut constant = ConstExpr::zero();
    for k in 0..=(2 * n) {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let coeff = rat(sign, 1) * Rational::from_integer(crate::constalg::binomial(2 * n, k));
        let prod = ConstExpr::from_symbol(ConstSymbol::LiHalf(k + 1))
            .mul(&ConstExpr::from_symbol(ConstSymbol::LiHalf(2 * n + 1 - k)))
            .scale(
                &(Rational::from_integer(crate::constalg::factorial(k))
                    * Rational::from_integer(crate::constalg::factorial(2 * n - k))),
            );
        constant = constant.add(&prod.scale(&coeff));
    }
    identity.constant = constant;
    Ok(identity.normalize())
}

/// The high-order double-integral identity of Lemma 7 (weight n + 3). The
/// double integral dismantles into products of lower-weight closed forms;
/// the right side expands into standard integrals.
pub fn expand_mi2(n: u32) -> Result<Identity> {
    if n < 1 {
        return Err(Error::Precondition("multiple-integral lemma 2 needs n >= 1".into()));
    }
    let np1 = n as i64 + 1;
    let mut identity = Identity::default();

    // Right side, weight-w terms and lower-weight terms with log2 powers.
    // T1 = Σⱼ C(n+1,j)(−log2)^{n+1−j} i_{1,0,j,1}
    for j in 0..=(n + 1) {
        let c = Rational::from_integer(binomial(n + 1, j));
        let pow = n + 1 - j;
        let sign = if pow % 2 == 0 { 1 } else { -1 };
        identity.push(
            c * rat(sign, 1),
            ConstMonomial::power(ConstSymbol::Log2, pow),
            IntegralIndex::new(1, 0, j, Denominator::X),
        );
    }
    // T2 = −(n+1) Σⱼ C(n,j)(−log2)^{n−j} [ i_{1,0,j+1,2} − log2·i_{1,0,j,2} − i_{1,1,j,2} ]
    for j in 0..=n {
        let pow = n - j;
        let sign = if pow % 2 == 0 { 1 } else { -1 };
        let base = Rational::from_integer(binomial(n, j)) * rat(sign, 1) * rat(-np1, 1);
        identity.push(
            base.clone(),
            ConstMonomial::power(ConstSymbol::Log2, pow),
            IntegralIndex::new(1, 0, j + 1, Denominator::OnePlusX),
        );
        identity.push(
            -base.clone(),
            ConstMonomial::power(ConstSymbol::Log2, pow + 1),
            IntegralIndex::new(1, 0, j, Denominator::OnePlusX),
        );
        identity.push(
            -base,
            ConstMonomial::power(ConstSymbol::Log2, pow),
            IntegralIndex::new(1, 1, j, Denominator::OnePlusX),
        );
    }
    // T3 = (n+1)/2 Σⱼ C(n,j)(−log2)^{n−j} i_{2,0,j,2}
    for j in 0..=n {
        let pow = n - j;
        let sign = if pow % 2 == 0 { 1 } else { -1 };
        identity.push(
            Rational::from_integer(binomial(n, j)) * rat(sign * np1, 2),
            ConstMonomial::power(ConstSymbol::Log2, pow),
            IntegralIndex::new(2, 0, j, Denominator::OnePlusX),
        );
    }
    // T4 = i_{n+1,0,1,1} − log2·i_{n+1,0,0,1} − i_{n+1,1,0,1}
    identity.push(
        Rational::one(),
        ConstMonomial::one(),
        IntegralIndex::new(n + 1, 0, 1, Denominator::X),
    );
    identity.push(
        -Rational::one(),
        ConstMonomial::symbol(ConstSymbol::Log2),
        IntegralIndex::new(n + 1, 0, 0, Denominator::X),
    );
    identity.push(
        -Rational::one(),
        ConstMonomial::one(),
        IntegralIndex::new(n + 1, 1, 0, Denominator::X),
    );
    // T5 = −1/(n+2) (i_{n+2,0,0,1} − i_{n+2,0,0,2})
    identity.push(
        rat(-1, n as i64 + 2),
        ConstMonomial::one(),
        IntegralIndex::new(n + 2, 0, 0, Denominator::X),
    );
    identity.push(
        rat(1, n as i64 + 2),
        ConstMonomial::one(),
        IntegralIndex::new(n + 2, 0, 0, Denominator::OnePlusX),
    );

    // Left side: (n+1) Σₖ C(n,k)(−1)^{n−k} i_{1,0,n−k,2} · (−1)ᵏ k! Li_{k+1}(1/2).
    // The i_{1,0,n−k,2} factors are lower weight; keep them as integral
    // terms multiplied by the (reduced) Li monomials, moved to the left.
    let sign_n = if n % 2 == 0 { 1 } else { -1 };
    for k in 0..=n {
        let coeff = rat(sign_n * np1, 1)
            * Rational::from_integer(binomial(n, k))
            * Rational::from_integer(crate::constalg::factorial(k));
        let li = ConstExpr::from_symbol(ConstSymbol::LiHalf(k + 1));
        let idx = IntegralIndex::new(1, 0, n - k, Denominator::OnePlusX);
        // identity convention: Σ terms = constant, so the left side of the
        // lemma enters negated among the terms.
        for (mono, q) in li.terms() {
            identity.push(-(&coeff * q), mono.clone(), idx);
        }
    }

    Ok(identity.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numverify::{rational_to_float, Evaluator};
    use rug::ops::Pow as _;
    use rug::Float;

    fn idx(a: u32, b: u32, c: u32, d: u32) -> IntegralIndex {
        IntegralIndex::from_parts(a, b, c, d).unwrap()
    }

    /// Quadrature of a single formal term (any denominator shape).
    fn quad_term(ev: &Evaluator, t: &LogTerm) -> Float {
        let prec = ev.ctx.prec_bits;
        let log2 = ev.log2();
        let (e1, e2, e3, denom) = (t.e1, t.e2, t.e3, t.denom);
        let value = ev
            .quad(|x, omx| {
                let mut v = Float::with_val(prec, 1);
                if e1 > 0 {
                    v *= Float::with_val(prec, omx.clone().ln()).pow(e1);
                }
                if e2 > 0 {
                    v *= Float::with_val(prec, x.clone().ln()).pow(e2);
                }
                if e3 > 0 {
                    v *= Float::with_val(prec, x.clone().ln_1p()).pow(e3);
                }
                let opx = Float::with_val(prec, 1) + x;
                match denom {
                    DenomKind::One => v,
                    DenomKind::OneMinusX => v / omx.clone(),
                    DenomKind::X => v / x.clone(),
                    DenomKind::OnePlusX => v / opx,
                    DenomKind::XOneMinusX => v / (x.clone() * omx),
                    DenomKind::XOnePlusX => v / (x.clone() * opx),
                    DenomKind::OneMinusXOnePlusX => v / (omx.clone() * opx),
                }
            })
            .unwrap();
        rational_to_float(prec, &t.coeff) * log2.pow(t.log2) * value
    }

    fn quad_terms(ev: &Evaluator, terms: &[LogTerm]) -> Float {
        let mut sum = Float::with_val(ev.ctx.prec_bits, 0);
        for t in terms {
            sum += quad_term(ev, t);
        }
        sum
    }

    #[test]
    fn expand_product_identity_factor() {
        let terms = expand_product(&[(LinForm::log_x(), 1)]);
        assert_eq!(terms.len(), 1);
        assert_eq!((terms[0].e1, terms[0].e2, terms[0].e3), (0, 1, 0));
    }

    #[test]
    fn expand_product_section22_display() {
        // log²((1−u)/(1+u))·log(2/(1+u)) expands to the printed six terms.
        let terms = merge_terms(expand_product(&[
            (LinForm::frac_ratio(), 2),
            (LinForm::frac_two(), 1),
        ]));
        assert_eq!(terms.len(), 6);
        let coeff_of = |log2: u32, e1: u32, e3: u32| -> Rational {
            terms
                .iter()
                .find(|t| t.log2 == log2 && t.e1 == e1 && t.e2 == 0 && t.e3 == e3)
                .map(|t| t.coeff.clone())
                .unwrap()
        };
        assert_eq!(coeff_of(1, 2, 0), rat(1, 1));
        assert_eq!(coeff_of(1, 1, 1), rat(-2, 1));
        assert_eq!(coeff_of(0, 2, 1), rat(-1, 1));
        assert_eq!(coeff_of(1, 0, 2), rat(1, 1));
        assert_eq!(coeff_of(0, 1, 2), rat(2, 1));
        assert_eq!(coeff_of(0, 0, 3), rat(-1, 1));
    }

    #[test]
    fn expand_product_trinomial_square() {
        let terms = merge_terms(expand_product(&[(LinForm::frac_two_u(), 2)]));
        assert_eq!(terms.len(), 6);
        let coeff_of = |log2: u32, e2: u32, e3: u32| -> Rational {
            terms
                .iter()
                .find(|t| t.log2 == log2 && t.e2 == e2 && t.e3 == e3)
                .map(|t| t.coeff.clone())
                .unwrap()
        };
        assert_eq!(coeff_of(2, 0, 0), rat(1, 1));
        assert_eq!(coeff_of(0, 2, 0), rat(1, 1));
        assert_eq!(coeff_of(0, 0, 2), rat(1, 1));
        assert_eq!(coeff_of(1, 1, 0), rat(2, 1));
        assert_eq!(coeff_of(1, 0, 1), rat(-2, 1));
        assert_eq!(coeff_of(0, 1, 1), rat(-2, 1));
    }

    #[test]
    fn fractional_substitute_printed_relation() {
        // i₀₂₁₂ = −i₀₀₃₂ + 2i₁₀₂₂ − i₂₀₁₂ + log2(i₀₀₂₂ − 2i₁₀₁₂ + i₂₀₀₂)
        let terms = fractional_substitute(idx(0, 2, 1, 2)).unwrap();
        let coeff_of = |log2: u32, e1: u32, e3: u32| -> Rational {
            terms
                .iter()
                .find(|t| {
                    t.log2 == log2
                        && t.e1 == e1
                        && t.e2 == 0
                        && t.e3 == e3
                        && t.denom == DenomKind::OnePlusX
                })
                .map(|t| t.coeff.clone())
                .unwrap()
        };
        assert_eq!(coeff_of(0, 0, 3), rat(-1, 1));
        assert_eq!(coeff_of(0, 1, 2), rat(2, 1));
        assert_eq!(coeff_of(0, 2, 1), rat(-1, 1));
        assert_eq!(coeff_of(1, 0, 2), rat(1, 1));
        assert_eq!(coeff_of(1, 1, 1), rat(-2, 1));
        assert_eq!(coeff_of(1, 2, 0), rat(1, 1));
        assert_eq!(terms.len(), 6);
    }

    #[test]
    fn fractional_substitute_elementary() {
        let terms = fractional_substitute(idx(0, 0, 0, 2)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].denom, DenomKind::OnePlusX);
        assert_eq!((terms[0].e1, terms[0].e2, terms[0].e3), (0, 0, 0));
    }

    #[test]
    fn fractional_substitute_rejects() {
        assert!(fractional_substitute(idx(1, 0, 0, 1)).is_err());
        assert!(fractional_substitute(idx(0, 0, 1, 0).to_owned()).is_err());
    }

    #[test]
    fn fractional_substitute_matches_quadrature() {
        let ev = Evaluator::with_digits(40);
        for i in [idx(0, 1, 0, 0), idx(0, 2, 1, 2), idx(1, 1, 1, 2), idx(2, 1, 0, 0)] {
            let terms = fractional_substitute(i).unwrap();
            let expanded = quad_terms(&ev, &terms);
            let direct = ev.quad_index(i).unwrap();
            let diff = Float::with_val(ev.ctx.prec_bits, expanded - direct).abs();
            let tol = Float::with_val(ev.ctx.prec_bits, 10).pow(-35);
            assert!(diff < tol, "{i}: residual {}", ev.to_decimal(&diff));
        }
    }

    #[test]
    fn contour_requires_q_and_r() {
        assert!(expand_contour(1, 0, 1, Part::Real).is_err());
        assert!(expand_contour(1, 1, 0, Part::Imag).is_err());
    }

    fn check_identity_numeric(ev: &Evaluator, id: &Identity, tol_digits: u32) {
        let prec = ev.ctx.prec_bits;
        let mut sum = Float::with_val(prec, 0);
        for (q, mono, i) in &id.terms {
            let mono_val = ev
                .eval_expr(&ConstExpr::term(Rational::one(), mono.clone()))
                .unwrap();
            sum += rational_to_float(prec, q) * mono_val * ev.quad_index(*i).unwrap();
        }
        let constant = ev.eval_expr(&id.constant).unwrap();
        let resid = Float::with_val(prec, sum - constant).abs();
        let tol = Float::with_val(prec, 10).pow(-(tol_digits as i32));
        assert!(resid < tol, "residual {}", ev.to_decimal(&resid));
    }

    #[test]
    fn contour_identities_verify_numerically() {
        let ev = Evaluator::with_digits(40);
        for (p, q, r, part) in [
            (0u32, 1u32, 1u32, Part::Imag),
            (0, 1, 1, Part::Real),
            (1, 1, 1, Part::Real),
            (1, 2, 1, Part::Imag),
            (2, 1, 2, Part::Real),
        ] {
            let id = expand_contour(p, q, r, part).unwrap();
            assert!(!id.terms.is_empty());
            check_identity_numeric(&ev, &id, 35);
        }
    }

    #[test]
    fn contour_real_part_has_even_pi_powers() {
        let id = expand_contour(2, 2, 1, Part::Real).unwrap();
        for (_, mono, i) in &id.terms {
            let k = mono.exponent_of(ConstSymbol::Pi);
            assert_eq!(k % 2, 0);
            assert_eq!(i.weight() + k, 6);
        }
        let id = expand_contour(2, 2, 2, Part::Imag).unwrap();
        for (_, mono, i) in &id.terms {
            let k = mono.exponent_of(ConstSymbol::Pi);
            assert_eq!(k % 2, 0);
            assert_eq!(i.weight() + k, 6);
        }
    }

    #[test]
    fn square_replace_printed_example() {
        // i₀₀₃₁ + 3i₁₀₂₁ + 3i₂₀₁₁ + i₃₀₀₁ = ½ i₃₀₀₁
        let sq = square_replace(1, 3, 0).unwrap();
        let mut map: BTreeMap<IntegralIndex, Rational> = BTreeMap::new();
        for (q, i) in sq.terms {
            *map.entry(i).or_insert_with(Rational::zero) += q;
        }
        assert_eq!(map[&idx(0, 0, 3, 1)], rat(1, 1));
        assert_eq!(map[&idx(1, 0, 2, 1)], rat(3, 1));
        assert_eq!(map[&idx(2, 0, 1, 1)], rat(3, 1));
        assert_eq!(map[&idx(3, 0, 0, 1)], rat(1, 2));
        assert!(sq.aux.is_none());
    }

    #[test]
    fn square_replace_kind2_numeric() {
        let ev = Evaluator::with_digits(40);
        let sq = square_replace(2, 1, 1).unwrap();
        let prec = ev.ctx.prec_bits;
        let mut sum = Float::with_val(prec, 0);
        for (q, i) in &sq.terms {
            sum += rational_to_float(prec, q) * ev.quad_index(*i).unwrap();
        }
        let (qa, aux) = sq.aux.unwrap();
        sum += rational_to_float(prec, &qa) * ev.quad_aux(aux).unwrap();
        let resid = sum.abs();
        let tol = Float::with_val(prec, 10).pow(-35);
        assert!(resid < tol, "residual {}", ev.to_decimal(&resid));
    }

    #[test]
    fn mi1_weight4_numeric() {
        let ev = Evaluator::with_digits(40);
        let id = expand_mi1(1).unwrap();
        check_identity_numeric(&ev, &id, 35);
    }

    #[test]
    fn mi1_rejects_zero() {
        assert!(expand_mi1(0).is_err());
    }

    #[test]
    fn mi2_low_weights_numeric() {
        let ev = Evaluator::with_digits(40);
        for n in 1..=3 {
            let id = expand_mi2(n).unwrap();
            check_identity_numeric(&ev, &id, 35);
        }
    }
}
