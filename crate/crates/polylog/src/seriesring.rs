//! Exact truncated multivariate power series over the constant algebra,
//! the log-gamma expansions feeding the beta-function moment generators,
//! and the hypergeometric connection identity expanded into integral
//! relations.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::constalg::{
    factorial, rat, ConstExpr, ConstMonomial, ConstSymbol, Rational,
};
use crate::error::{Error, Result};
use crate::indexcore::{Denominator, IntegralIndex};
use crate::logexpand::Identity;

/// Coefficient ring of a truncated series.
pub trait SeriesCoeff: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
}

impl SeriesCoeff for ConstExpr {
    fn zero() -> Self {
        ConstExpr::zero()
    }
    fn is_zero(&self) -> bool {
        ConstExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        ConstExpr::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ConstExpr::mul(self, other)
    }
    fn scale(&self, q: &Rational) -> Self {
        ConstExpr::scale(self, q)
    }
}

/// Polynomial in the three log atoms log(1−x), log x, log(1+x) with rational
/// coefficients; the coefficient ring of the parametric integrand series.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogPoly {
    terms: BTreeMap<(u32, u32, u32), Rational>,
}

impl LogPoly {
    pub fn one() -> Self {
        let mut p = LogPoly::default();
        p.terms.insert((0, 0, 0), Rational::one());
        p
    }

    pub fn atom(e1: u32, e2: u32, e3: u32, q: Rational) -> Self {
        let mut p = LogPoly::default();
        if !q.is_zero() {
            p.terms.insert((e1, e2, e3), q);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &Rational)> {
        self.terms.iter()
    }
}

impl SeriesCoeff for LogPoly {
    fn zero() -> Self {
        LogPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, q) in &other.terms {
            let e = out.terms.entry(*k).or_insert_with(Rational::zero);
            *e += q;
            if e.is_zero() {
                out.terms.remove(k);
            }
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = LogPoly::default();
        for ((a1, b1, c1), q1) in &self.terms {
            for ((a2, b2, c2), q2) in &other.terms {
                let key = (a1 + a2, b1 + b2, c1 + c2);
                let e = out.terms.entry(key).or_insert_with(Rational::zero);
                *e += q1 * q2;
                if e.is_zero() {
                    out.terms.remove(&key);
                }
            }
        }
        out
    }
    fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return LogPoly::default();
        }
        LogPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }
}

/// A constant expression plus ℚ-linear terms monomial·integral. Products of
/// two integral-carrying values never arise in the supported expansions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedExpr {
    pub consts: ConstExpr,
    pub ints: BTreeMap<(ConstMonomial, IntegralIndex), Rational>,
}

impl MixedExpr {
    pub fn from_const(c: ConstExpr) -> Self {
        MixedExpr {
            consts: c,
            ints: BTreeMap::new(),
        }
    }

    pub fn from_integral(q: Rational, mono: ConstMonomial, idx: IntegralIndex) -> Self {
        let mut m = MixedExpr::default();
        if !q.is_zero() {
            m.ints.insert((mono, idx), q);
        }
        m
    }

    fn add_int(&mut self, q: Rational, mono: ConstMonomial, idx: IntegralIndex) {
        if q.is_zero() {
            return;
        }
        let key = (mono, idx);
        let e = self.ints.entry(key.clone()).or_insert_with(Rational::zero);
        *e += q;
        if e.is_zero() {
            self.ints.remove(&key);
        }
    }
}

impl SeriesCoeff for MixedExpr {
    fn zero() -> Self {
        MixedExpr::default()
    }
    fn is_zero(&self) -> bool {
        self.consts.is_zero() && self.ints.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.consts = out.consts.add(&other.consts);
        for ((m, i), q) in &other.ints {
            out.add_int(q.clone(), m.clone(), *i);
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        assert!(
            self.ints.is_empty() || other.ints.is_empty(),
            "product of two integral-carrying series coefficients"
        );
        let mut out = MixedExpr::from_const(self.consts.mul(&other.consts));
        let (ints, consts) = if self.ints.is_empty() {
            (&other.ints, &self.consts)
        } else {
            (&self.ints, &other.consts)
        };
        for ((m, i), q) in ints {
            for (cm, cq) in consts.terms() {
                out.add_int(q * cq, m.mul(cm), *i);
            }
        }
        out
    }
    fn scale(&self, q: &Rational) -> Self {
        MixedExpr {
            consts: self.consts.scale(q),
            ints: if q.is_zero() {
                BTreeMap::new()
            } else {
                self.ints.iter().map(|(k, c)| (k.clone(), c * q)).collect()
            },
        }
    }
}

/// Multivariate power series truncated at a fixed total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries<C> {
    nvars: usize,
    order: u32,
    coeffs: BTreeMap<Vec<u32>, C>,
}

impl<C: SeriesCoeff> MultiSeries<C> {
    pub fn zero(nvars: usize, order: u32) -> Self {
        MultiSeries {
            nvars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, order: u32, c: C) -> Self {
        let mut s = MultiSeries::zero(nvars, order);
        if !c.is_zero() {
            s.coeffs.insert(vec![0; nvars], c);
        }
        s
    }

    pub fn one(nvars: usize, order: u32) -> Self
    where
        C: UnitRing,
    {
        MultiSeries::constant(nvars, order, C::unit())
    }

    /// The i-th variable as a series.
    pub fn var(nvars: usize, order: u32, i: usize, c: C) -> Self {
        assert!(i < nvars);
        let mut s = MultiSeries::zero(nvars, order);
        if order >= 1 && !c.is_zero() {
            let mut key = vec![0; nvars];
            key[i] = 1;
            s.coeffs.insert(key, c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficient(&self, exps: &[u32]) -> C {
        assert_eq!(exps.len(), self.nvars);
        self.coeffs.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&vec![0; self.nvars])
    }

    fn add_coeff(&mut self, key: Vec<u32>, c: &C) {
        if c.is_zero() || key.iter().sum::<u32>() > self.order {
            return;
        }
        let entry = self.coeffs.entry(key.clone()).or_insert_with(C::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nvars, self.order), (other.nvars, other.order));
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_coeff(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = MultiSeries::zero(self.nvars, self.order);
        if q.is_zero() {
            return out;
        }
        for (k, c) in &self.coeffs {
            out.coeffs.insert(k.clone(), c.scale(q));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.nvars, self.order), (other.nvars, other.order));
        let mut out = MultiSeries::zero(self.nvars, self.order);
        for (k1, c1) in &self.coeffs {
            let d1: u32 = k1.iter().sum();
            for (k2, c2) in &other.coeffs {
                let d2: u32 = k2.iter().sum();
                if d1 + d2 > self.order {
                    continue;
                }
                let key: Vec<u32> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_coeff(key, &c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self
    where
        C: UnitRing,
    {
        let mut out = MultiSeries::one(self.nvars, self.order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Σₖ coeffs[k]·selfᵏ; requires a vanishing constant term.
    pub fn apply_power_series(&self, coeffs: &[C]) -> Self {
        assert!(
            self.constant_term().is_zero(),
            "series composition requires zero constant term"
        );
        let mut out = MultiSeries::zero(self.nvars, self.order);
        if let Some(c0) = coeffs.first() {
            let mut key0 = MultiSeries::zero(self.nvars, self.order);
            key0.add_coeff(vec![0; self.nvars], c0);
            out = out.add(&key0);
        }
        let mut pk = self.clone();
        for c in coeffs.iter().skip(1) {
            let mut term = MultiSeries::zero(self.nvars, self.order);
            for (k, base) in &pk.coeffs {
                term.add_coeff(k.clone(), &base.mul(c));
            }
            out = out.add(&term);
            pk = pk.mul(self);
            if pk.coeffs.is_empty() {
                break;
            }
        }
        out
    }

    /// exp of a series with zero constant term.
    pub fn exp(&self) -> Self
    where
        C: UnitRing,
    {
        let mut coeffs: Vec<C> = Vec::with_capacity(self.order as usize + 1);
        for k in 0..=self.order {
            let inv_fact = Rational::new(1.into(), factorial(k));
            coeffs.push(C::unit().scale(&inv_fact));
        }
        self.apply_power_series(&coeffs)
    }

    pub fn map<C2: SeriesCoeff>(&self, f: impl Fn(&C) -> C2) -> MultiSeries<C2> {
        let mut out = MultiSeries::zero(self.nvars, self.order);
        for (k, c) in &self.coeffs {
            let nc = f(c);
            if !nc.is_zero() {
                out.coeffs.insert(k.clone(), nc);
            }
        }
        out
    }

    pub fn try_map<C2: SeriesCoeff>(
        &self,
        f: impl Fn(&C) -> Result<C2>,
    ) -> Result<MultiSeries<C2>> {
        let mut out = MultiSeries::zero(self.nvars, self.order);
        for (k, c) in &self.coeffs {
            let nc = f(c)?;
            if !nc.is_zero() {
                out.coeffs.insert(k.clone(), nc);
            }
        }
        Ok(out)
    }
}

/// Coefficient rings with an explicit multiplicative unit.
pub trait UnitRing {
    fn unit() -> Self;
}

impl UnitRing for ConstExpr {
    fn unit() -> Self {
        ConstExpr::one()
    }
}

impl UnitRing for LogPoly {
    fn unit() -> Self {
        LogPoly::one()
    }
}

impl UnitRing for MixedExpr {
    fn unit() -> Self {
        MixedExpr::from_const(ConstExpr::one())
    }
}

impl From<ConstExpr> for MixedExpr {
    fn from(c: ConstExpr) -> Self {
        MixedExpr::from_const(c)
    }
}

// ---------------------------------------------------------------------------
// Log-gamma expansions
// ---------------------------------------------------------------------------

/// Taylor coefficients of log Γ(1+z): c₀ = 0, c₁ = −γ, cₖ = (−1)ᵏ ζ(k)/k.
pub fn loggamma_at_1(order: u32) -> Vec<ConstExpr> {
    let mut out = vec![ConstExpr::zero()];
    if order >= 1 {
        out.push(ConstExpr::from_symbol(ConstSymbol::EulerGamma).neg());
    }
    for k in 2..=order {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.push(ConstExpr::from_symbol(ConstSymbol::Zeta(k)).scale(&rat(sign, k as i64)));
    }
    out
}

/// Taylor coefficients of log Γ(1/2+z) − log Γ(1/2):
/// c₁ = −γ − 2log2, cₖ = (−1)ᵏ ζ(k)(2ᵏ−1)/k.
pub fn loggamma_at_half(order: u32) -> Vec<ConstExpr> {
    let mut out = vec![ConstExpr::zero()];
    if order >= 1 {
        out.push(
            ConstExpr::from_symbol(ConstSymbol::EulerGamma)
                .neg()
                .add(&ConstExpr::from_symbol(ConstSymbol::Log2).scale(&rat(-2, 1))),
        );
    }
    for k in 2..=order {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let two_k_minus_1 = Rational::from_integer(num::bigint::BigInt::from(2).pow(k) - 1);
        out.push(
            ConstExpr::from_symbol(ConstSymbol::Zeta(k))
                .scale(&(rat(sign, k as i64) * two_k_minus_1)),
        );
    }
    out
}

/// Taylor coefficients of sin(πz).
pub fn sin_pi_coeffs(order: u32) -> Vec<ConstExpr> {
    let mut out = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        if k % 2 == 0 {
            out.push(ConstExpr::zero());
        } else {
            let sign = if (k - 1) / 2 % 2 == 0 { 1 } else { -1 };
            let q = rat(sign, 1) / Rational::from_integer(factorial(k));
            out.push(ConstExpr::term(q, ConstMonomial::power(ConstSymbol::Pi, k)));
        }
    }
    out
}

/// Taylor coefficients of sin(πz)/z (entire; even powers of z only).
pub fn sinc_pi_coeffs(order: u32) -> Vec<ConstExpr> {
    let mut out = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        if k % 2 == 1 {
            out.push(ConstExpr::zero());
        } else {
            let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
            let q = rat(sign, 1) / Rational::from_integer(factorial(k + 1));
            out.push(ConstExpr::term(
                q,
                ConstMonomial::power(ConstSymbol::Pi, k + 1),
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Beta-function moment generators
// ---------------------------------------------------------------------------

/// Expansion point of the beta-moment generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaPoint {
    /// B(a, 1+β) around a → 0⁺, generating ∫ logᵐ(1−x) logⁿx / x.
    ZeroOne,
    /// B(1/2+ā, 1+b) around ā = 0, generating the x^(−1/2) auxiliary family.
    HalfZero,
}

fn compose(coeffs: &[ConstExpr], arg: &MultiSeries<ConstExpr>) -> MultiSeries<ConstExpr> {
    arg.apply_power_series(coeffs)
}

/// Exact value of ∫₀¹ logᵐ(1−x) logⁿ x · x^{s−1} dx moments via the beta
/// expansion. For `ZeroOne` this is i_{m,n,0,1} = n!m![a^{n+1}β^m] exp(S(a)+S(β)−S(a+β));
/// for `HalfZero` it is the auxiliary value
/// Aux(n,m) = n!m![āⁿ b^{m+1}] exp(2b·log2 + S̃(ā) + S(b) − S̃(ā+b)).
pub fn beta_expansion_coeff(point: BetaPoint, n: u32, m: u32) -> Result<ConstExpr> {
    let order = n + m + 1;
    let lg1 = loggamma_at_1(order);
    let va = MultiSeries::var(2, order, 0, ConstExpr::one());
    let vb = MultiSeries::var(2, order, 1, ConstExpr::one());
    let (bracket, key) = match point {
        BetaPoint::ZeroOne => {
            // log[Γ(1+a)Γ(1+β)/Γ(1+a+β)]
            let b = compose(&lg1, &va)
                .add(&compose(&lg1, &vb))
                .sub(&compose(&lg1, &va.add(&vb)));
            (b, vec![n + 1, m])
        }
        BetaPoint::HalfZero => {
            // log[Γ(1/2+ā)Γ(1+b)/Γ(1/2+ā+b)] + log Γ(1/2) − log Γ(1/2)
            let lgh = loggamma_at_half(order);
            let b = compose(&lgh, &va)
                .add(&compose(&lg1, &vb))
                .sub(&compose(&lgh, &va.add(&vb)));
            (b, vec![n, m + 1])
        }
    };
    let e = bracket.exp();
    let coeff = e.coefficient(&key);
    coeff.assert_gamma_free()?;
    let scale = Rational::from_integer(factorial(n)) * Rational::from_integer(factorial(m));
    Ok(coeff.scale(&scale).reduce())
}

// ---------------------------------------------------------------------------
// The hypergeometric connection identity
// ---------------------------------------------------------------------------

fn integrate_logpoly(
    lp: &LogPoly,
    split_x: bool,
) -> Result<MixedExpr> {
    let mut out = MixedExpr::default();
    for (&(e1, e2, e3), q) in lp.terms() {
        if split_x {
            // denominator 1/(x(1+x)) = 1/x − 1/(1+x)
            let ix = IntegralIndex::new(e1, e2, e3, Denominator::X);
            if !ix.is_convergent() {
                return Err(Error::Precondition(format!(
                    "hypergeometric expansion produced divergent {ix}"
                )));
            }
            out.add_int(q.clone(), ConstMonomial::one(), ix);
            out.add_int(
                -q.clone(),
                ConstMonomial::one(),
                IntegralIndex::new(e1, e2, e3, Denominator::OnePlusX),
            );
        } else {
            out.add_int(
                q.clone(),
                ConstMonomial::one(),
                IntegralIndex::new(e1, e2, e3, Denominator::OnePlusX),
            );
        }
    }
    Ok(out)
}

fn lift(s: &MultiSeries<ConstExpr>) -> MultiSeries<MixedExpr> {
    s.map(|c| MixedExpr::from_const(c.clone()))
}

/// Both sides of the connection identity, expanded around
/// (a, b, c) = (1, 1, 2) in the shifted variables (α, β, γ̂) to total order w,
/// as the series of the (identically zero) difference left − right.
pub fn hyp2f1_series(w: u32) -> Result<MultiSeries<MixedExpr>> {
    let order = w;
    let one = Rational::one();
    let va = MultiSeries::var(3, order, 0, ConstExpr::one());
    let vb = MultiSeries::var(3, order, 1, ConstExpr::one());
    let vc = MultiSeries::var(3, order, 2, ConstExpr::one());
    let lg1 = loggamma_at_1(order);

    // Linear argument series for the log atoms, with LogPoly coefficients.
    let lvar = |i: usize, e1: u32, e2: u32, e3: u32, q: Rational| {
        MultiSeries::<LogPoly>::var(3, order, i, LogPoly::atom(e1, e2, e3, q))
    };

    // ∫ x^b−1 (1−x)^{c−b−1} (1+x)^{−a} = ∫ e^{βL₂+(γ̂−β)L₁−αL₃}/(1+x)
    let arg1 = lvar(1, 0, 1, 0, one.clone())
        .add(&lvar(2, 1, 0, 0, one.clone()))
        .add(&lvar(1, 1, 0, 0, -one.clone()))
        .add(&lvar(0, 0, 0, 1, -one.clone()));
    let int1 = arg1.exp().try_map(|lp| integrate_logpoly(lp, false))?;

    // ∫ x^{b−c} [(1−x)^{c−a−1}(1+x)^{−b} − x·?]: the second connection
    // integral, regularized by subtracting the value at x → 0:
    // ∫ x^{−1} e^{H} (e^{G} − 1)/(1+x) − ∫ e^{H}/(1+x)
    // with H = (α−γ̂)L₂, G = (γ̂−β)L₁ − αL₃.
    let h2 = lvar(0, 0, 1, 0, one.clone()).add(&lvar(2, 0, 1, 0, -one.clone()));
    let g2 = lvar(2, 1, 0, 0, one.clone())
        .add(&lvar(1, 1, 0, 0, -one.clone()))
        .add(&lvar(0, 0, 0, 1, -one.clone()));
    let int2 = {
        let eh = h2.exp();
        let eg_minus_1 = g2.exp().sub(&MultiSeries::one(3, order));
        let part_a = eh
            .mul(&eg_minus_1)
            .try_map(|lp| integrate_logpoly(lp, true))?;
        let part_b = eh.try_map(|lp| integrate_logpoly(lp, false))?;
        part_a.sub(&part_b)
    };

    // Mirror integral with the roles of a and b exchanged:
    // H' = (β−γ̂)L₂, G' = (γ̂−α)L₁ − βL₃.
    let h3 = lvar(1, 0, 1, 0, one.clone()).add(&lvar(2, 0, 1, 0, -one.clone()));
    let g3 = lvar(2, 1, 0, 0, one.clone())
        .add(&lvar(0, 1, 0, 0, -one.clone()))
        .add(&lvar(1, 0, 0, 1, -one.clone()));
    let int3 = {
        let eh = h3.exp();
        let eg_minus_1 = g3.exp().sub(&MultiSeries::one(3, order));
        let part_a = eh
            .mul(&eg_minus_1)
            .try_map(|lp| integrate_logpoly(lp, true))?;
        let part_b = eh.try_map(|lp| integrate_logpoly(lp, false))?;
        part_a.sub(&part_b)
    };

    // sin π(b−a) = sin π(β−α); sin π(c−a) = sin π(1+γ̂−α) = −sin π(γ̂−α);
    // sin π(c−b) = −sin π(γ̂−β). The third-integral factor is sin π(c−b):
    // reflecting Γ(a−b)Γ(1+b−a) in the connection formula gives
    // −π/sin π(b−a), which cancels the overall sin π(b−a) and leaves
    // π/Γ(1+b−c) = Γ(c−b) sin π(c−b).
    let sin_ba = compose(&sin_pi_coeffs(order), &vb.sub(&va));
    let sin_ca = compose(&sin_pi_coeffs(order), &vc.sub(&va)).scale(&-Rational::one());
    let sin_cb = compose(&sin_pi_coeffs(order), &vc.sub(&vb)).scale(&-Rational::one());

    // Γ(c−b)Γ(b)/(Γ(a)Γ(c−a)) with every argument shifted off 1.
    let gamma3 = compose(&lg1, &vc.sub(&vb))
        .add(&compose(&lg1, &vb))
        .sub(&compose(&lg1, &va))
        .sub(&compose(&lg1, &vc.sub(&va)))
        .exp();

    // sin π(c−a)/(a−c+1) = sin(π(γ̂−α))/(γ̂−α), the entire sinc series.
    let term4 = compose(&sinc_pi_coeffs(order), &vc.sub(&va));

    // −π Γ(b)/(Γ(2−c+b)Γ(a)Γ(c−a))
    let gamma5 = compose(&lg1, &vb)
        .sub(&compose(&lg1, &vb.sub(&vc)))
        .sub(&compose(&lg1, &va))
        .sub(&compose(&lg1, &vc.sub(&va)))
        .exp();
    let term5 = gamma5
        .mul(&MultiSeries::constant(
            3,
            order,
            ConstExpr::from_symbol(ConstSymbol::Pi).neg(),
        ));

    let lhs = lift(&sin_ba).mul(&int1);
    let rhs = lift(&sin_ca)
        .mul(&int2)
        .sub(&lift(&sin_cb.mul(&gamma3)).mul(&int3))
        .add(&lift(&term4))
        .add(&lift(&term5));
    Ok(lhs.sub(&rhs))
}

/// The relation extracted from the α^m β^n γ̂^r coefficient of the connection
/// identity, with the overall factor of π removed.
pub fn hyp2f1_relation(m: u32, n: u32, r: u32) -> Result<Identity> {
    let series = hyp2f1_series(m + n + r)?;
    extract_hyp2f1(&series, m, n, r)
}

/// Extraction from a precomputed `hyp2f1_series`, for batch generation.
pub fn extract_hyp2f1(series: &MultiSeries<MixedExpr>, m: u32, n: u32, r: u32) -> Result<Identity> {
    let z = series.coefficient(&[m, n, r]);
    z.consts.assert_gamma_free()?;
    let divide_pi = |mono: &ConstMonomial| -> Result<ConstMonomial> {
        let k = mono.exponent_of(ConstSymbol::Pi);
        if k == 0 {
            return Err(Error::Inconsistent(format!(
                "connection-identity coefficient at ({m},{n},{r}) has a π-free monomial {mono}"
            )));
        }
        Ok(mono
            .without(ConstSymbol::Pi)
            .mul(&ConstMonomial::power(ConstSymbol::Pi, k - 1)))
    };
    let mut identity = Identity::default();
    for ((mono, idx), q) in &z.ints {
        identity.push(q.clone(), divide_pi(mono)?, *idx);
    }
    let mut constant = ConstExpr::zero();
    for (mono, q) in z.consts.terms() {
        constant.add_term(-q.clone(), divide_pi(mono)?);
    }
    identity.constant = constant;
    Ok(identity.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constalg::{sym_li_half, sym_log2, sym_pi, sym_zeta};
    use crate::indexcore::AuxHalfIntegral;
    use crate::numverify::{rational_to_float, Evaluator};
    use rug::ops::Pow as _;
    use rug::Float;

    #[test]
    fn exp_of_zeta_generating_series() {
        // exp(Σ_{k≥2} (−1)ᵏζ(k)zᵏ/k) = 1 + ζ(2)z²/2 − ζ(3)z³/3 + (ζ(4)/4 + ζ(2)²/8)z⁴ + …
        let order = 4;
        let mut coeffs = loggamma_at_1(order);
        coeffs[1] = ConstExpr::zero(); // drop the −γ term
        let z = MultiSeries::var(1, order, 0, ConstExpr::one());
        let e = compose(&coeffs, &z).exp();
        assert_eq!(e.coefficient(&[0]), ConstExpr::one());
        assert_eq!(e.coefficient(&[1]), ConstExpr::zero());
        assert_eq!(e.coefficient(&[2]), sym_zeta(2).scale(&rat(1, 2)));
        assert_eq!(e.coefficient(&[3]), sym_zeta(3).scale(&rat(-1, 3)));
        let expected4 = sym_zeta(4)
            .scale(&rat(1, 4))
            .add(&sym_zeta(2).pow(2).scale(&rat(1, 8)));
        assert_eq!(e.coefficient(&[4]).reduce(), expected4.reduce());
    }

    #[test]
    fn series_mul_truncates_at_order() {
        let z = MultiSeries::var(1, 3, 0, ConstExpr::one());
        let p = z.pow(2).mul(&z.pow(2));
        assert!(p.coefficient(&[3]).is_zero());
        assert_eq!(z.pow(3).coefficient(&[3]), ConstExpr::one());
    }

    #[test]
    fn beta_zero_one_known_values() {
        // i_{1,0,0,1} = ∫ log(1−x)/x = −ζ(2) = −π²/6
        let v = beta_expansion_coeff(BetaPoint::ZeroOne, 0, 1).unwrap();
        assert_eq!(v, sym_pi().pow(2).scale(&rat(-1, 6)));
        // i_{1,1,0,1} = ∫ log(1−x)log x/x = ζ(3)
        let v = beta_expansion_coeff(BetaPoint::ZeroOne, 1, 1).unwrap();
        assert_eq!(v, sym_zeta(3));
    }

    #[test]
    fn beta_values_match_quadrature() {
        let ev = Evaluator::with_digits(40);
        let prec = ev.ctx.prec_bits;
        let tol = Float::with_val(prec, 10).pow(-35);
        for n in 0..=3u32 {
            for m in 0..=3u32 {
                if n + m == 0 || n + m > 5 {
                    continue;
                }
                // ZeroOne point needs m ≥ 1 for the 1/x convergence.
                if m >= 1 {
                    let sym = beta_expansion_coeff(BetaPoint::ZeroOne, n, m).unwrap();
                    let idx = IntegralIndex::new(m, n, 0, Denominator::X);
                    let resid = ev.check_closed_form(idx, &sym).unwrap();
                    assert!(
                        resid < tol,
                        "moment ({n},{m}) residual {}",
                        ev.to_decimal(&resid)
                    );
                }
                if n >= 1 {
                    let sym = beta_expansion_coeff(BetaPoint::HalfZero, n, m).unwrap();
                    let aux = AuxHalfIntegral::new(n, m).unwrap();
                    let quad = ev.quad_aux(aux).unwrap();
                    let val = ev.eval_expr(&sym).unwrap();
                    let resid = Float::with_val(prec, quad - val).abs();
                    assert!(
                        resid < tol,
                        "aux ({n},{m}) residual {}",
                        ev.to_decimal(&resid)
                    );
                }
            }
        }
    }

    #[test]
    fn beta_gamma_always_cancels() {
        for n in 0..=4u32 {
            for m in 0..=4u32 {
                if n + m > 8 {
                    continue;
                }
                let v = beta_expansion_coeff(BetaPoint::ZeroOne, n, m).unwrap();
                assert!(v.assert_gamma_free().is_ok());
                if n >= 1 {
                    let v = beta_expansion_coeff(BetaPoint::HalfZero, n, m).unwrap();
                    assert!(v.assert_gamma_free().is_ok());
                }
            }
        }
    }

    #[test]
    fn aux_half_zero_base_value() {
        // Aux(1,0) = ∫ x^{−1/2} log x/(1−x) = −π²/2
        let v = beta_expansion_coeff(BetaPoint::HalfZero, 1, 0).unwrap();
        assert_eq!(v, sym_pi().pow(2).scale(&rat(-1, 2)));
    }

    #[test]
    fn hyp2f1_base_coefficient_vanishes() {
        let s = hyp2f1_series(2).unwrap();
        assert!(s.coefficient(&[0, 0, 0]).is_zero());
    }

    #[test]
    fn hyp2f1_relations_verify_numerically() {
        let ev = Evaluator::with_digits(40);
        let prec = ev.ctx.prec_bits;
        let tol = Float::with_val(prec, 10).pow(-35);
        let w = 3;
        let series = hyp2f1_series(w).unwrap();
        let mut nontrivial = 0;
        for m in 0..=w {
            for n in 0..=(w - m) {
                let r = w - m - n;
                let id = extract_hyp2f1(&series, m, n, r).unwrap();
                if id.terms.is_empty() {
                    assert!(id.constant.is_zero());
                    continue;
                }
                nontrivial += 1;
                let mut sum = Float::with_val(prec, 0);
                for (q, mono, i) in &id.terms {
                    let mv = ev
                        .eval_expr(&ConstExpr::term(Rational::one(), mono.clone()))
                        .unwrap();
                    sum += rational_to_float(prec, q) * mv * ev.quad_index(*i).unwrap();
                }
                let c = ev.eval_expr(&id.constant).unwrap();
                let resid = Float::with_val(prec, sum - c).abs();
                assert!(
                    resid < tol,
                    "({m},{n},{r}) residual {}",
                    ev.to_decimal(&resid)
                );
                // Homogeneity: integral weight + monomial weight is constant.
                for (_, mono, i) in &id.terms {
                    assert_eq!(mono.weight() + i.weight(), w);
                }
            }
        }
        assert!(nontrivial > 0);
    }

    #[test]
    fn mixed_expr_rejects_integral_products() {
        let idx = IntegralIndex::new(0, 1, 0, Denominator::OneMinusX);
        let a = MixedExpr::from_integral(Rational::one(), ConstMonomial::one(), idx);
        let res = std::panic::catch_unwind(|| a.mul(&a));
        assert!(res.is_err());
    }

    #[test]
    fn log2_appears_via_li_reduction() {
        // sanity: sym_li_half(1) == log 2 keeps the reduced pool closed
        assert_eq!(sym_li_half(1), sym_log2());
    }
}
