//! Arbitrary-precision numerics: tanh-sinh quadrature of the integral
//! families, evaluation of every constant symbol, and residual checks.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num::bigint::BigInt;
use num::traits::ToPrimitive;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::constalg::{ConstExpr, ConstSymbol, NamedConst, Rational};
use crate::error::{Error, Result};
use crate::indexcore::{AuxHalfIntegral, Denominator, IntegralIndex};

/// Target digits plus the working precision all evaluators honor internally.
#[derive(Debug, Clone, Copy)]
pub struct PrecisionContext {
    pub digits: u32,
    pub working_digits: u32,
    pub prec_bits: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Self {
        let working_digits = digits + digits / 2 + 10;
        // log2(10) ≈ 3.322, plus guard bits
        let prec_bits = working_digits * 10 / 3 + 48;
        PrecisionContext {
            digits,
            working_digits,
            prec_bits,
        }
    }

    pub fn tolerance(&self) -> Float {
        let mut t = Float::with_val(self.prec_bits, 10);
        t = t.pow(-(self.digits as i32));
        t
    }
}

fn bigint_to_float(prec: u32, n: &BigInt) -> Float {
    match n.to_i64() {
        Some(v) => Float::with_val(prec, v),
        None => Float::with_val(
            prec,
            rug::Integer::from_str_radix(&n.to_str_radix(16), 16).unwrap(),
        ),
    }
}

pub fn rational_to_float(prec: u32, q: &Rational) -> Float {
    bigint_to_float(prec, q.numer()) / bigint_to_float(prec, q.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CacheKey {
    Sym(ConstSymbol),
    Quad(IntegralIndex),
    Aux(AuxHalfIntegral),
}

/// Evaluator with a memo table per working precision.
pub struct Evaluator {
    pub ctx: PrecisionContext,
    cache: Mutex<HashMap<CacheKey, Float>>,
    named: Mutex<BTreeMap<NamedConst, IntegralIndex>>,
}

/// Defining integrals for the paper's named weight 6–8 constants.
pub fn default_named_registry() -> BTreeMap<NamedConst, IntegralIndex> {
    let idx = |a, b, c, d| IntegralIndex::from_parts(a, b, c, d).unwrap();
    let mut m = BTreeMap::new();
    m.insert(NamedConst::F1, idx(0, 4, 1, 2));
    m.insert(NamedConst::G1, idx(0, 4, 2, 2));
    m.insert(NamedConst::G2, idx(1, 4, 1, 0));
    m.insert(NamedConst::H1, idx(0, 6, 1, 2));
    m.insert(NamedConst::H2, idx(0, 3, 4, 1));
    m.insert(NamedConst::H3, idx(2, 4, 1, 2));
    m
}

impl Evaluator {
    pub fn new(ctx: PrecisionContext) -> Self {
        Evaluator {
            ctx,
            cache: Mutex::new(HashMap::new()),
            named: Mutex::new(default_named_registry()),
        }
    }

    pub fn with_digits(digits: u32) -> Self {
        Evaluator::new(PrecisionContext::new(digits))
    }

    /// Binds a named constant to its defining integral (solver registry).
    pub fn register_named(&self, c: NamedConst, idx: IntegralIndex) {
        self.named.lock().unwrap().insert(c, idx);
    }

    fn prec(&self) -> u32 {
        self.ctx.prec_bits
    }

    fn cached(&self, key: CacheKey, compute: impl FnOnce() -> Result<Float>) -> Result<Float> {
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec(), Constant::Pi)
    }

    pub fn log2(&self) -> Float {
        Float::with_val(self.prec(), Constant::Log2)
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.prec(), Constant::Euler)
    }

    /// ζ(n) through the accelerated alternating (eta) series.
    pub fn zeta(&self, n: u32) -> Float {
        assert!(n >= 2);
        let prec = self.prec();
        let eta = alternating_sum(prec, self.ctx.working_digits, |k| {
            // 1/(k+1)^n
            Float::with_val(prec, k + 1).pow(n as i32).recip()
        });
        // ζ(n) = η(n) / (1 − 2^{1−n})
        let two_pow = Float::with_val(prec, 2).pow(1 - n as i32);
        eta / (Float::with_val(prec, 1) - two_pow)
    }

    /// Liₙ(1/2) = Σ 2^{−k} k^{−n}, tail bounded geometrically.
    pub fn li_half(&self, n: u32) -> Float {
        let prec = self.prec();
        let terms = (self.ctx.working_digits * 10 / 3 + 20) as u64;
        let mut sum = Float::with_val(prec, 0);
        let mut pow = Float::with_val(prec, 1);
        for k in 1..=terms {
            pow /= 2;
            let term = pow.clone() / Float::with_val(prec, k).pow(n as i32);
            sum += term;
        }
        sum
    }

    pub fn eval_symbol(&self, s: ConstSymbol) -> Result<Float> {
        self.cached(CacheKey::Sym(s), || match s {
            ConstSymbol::Log2 => Ok(self.log2()),
            ConstSymbol::Pi => Ok(self.pi()),
            ConstSymbol::EulerGamma => Ok(self.euler_gamma()),
            ConstSymbol::Zeta(n) => Ok(self.zeta(n)),
            ConstSymbol::LiHalf(n) => Ok(self.li_half(n)),
            ConstSymbol::Named(c) => {
                let idx = self.named.lock().unwrap().get(&c).copied();
                let idx = idx.ok_or_else(|| {
                    Error::NotSolved(format!("named constant {c} has no defining integral"))
                })?;
                self.quad_index(idx)
            }
        })
    }

    pub fn eval_expr(&self, e: &ConstExpr) -> Result<Float> {
        let mut sum = Float::with_val(self.prec(), 0);
        for (m, q) in e.terms() {
            let mut v = rational_to_float(self.prec(), q);
            for &(s, k) in m.factors() {
                v *= self.eval_symbol(s)?.pow(k);
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Numeric value of a convergent polylogarithm integral.
    pub fn quad_index(&self, idx: IntegralIndex) -> Result<Float> {
        if !idx.is_convergent() {
            return Err(Error::Precondition(format!("{idx} is not convergent")));
        }
        self.cached(CacheKey::Quad(idx), || {
            self.quad(|x, omx| {
                let prec = x.prec();
                let mut v = Float::with_val(prec, 1);
                if idx.a > 0 {
                    v *= Float::with_val(prec, omx.clone().ln()).pow(idx.a);
                }
                if idx.b > 0 {
                    v *= Float::with_val(prec, x.clone().ln()).pow(idx.b);
                }
                if idx.c > 0 {
                    v *= Float::with_val(prec, x.clone().ln_1p()).pow(idx.c);
                }
                match idx.d {
                    Denominator::OneMinusX => v / omx.clone(),
                    Denominator::X => v / x.clone(),
                    Denominator::OnePlusX => v / (Float::with_val(prec, 1) + x),
                }
            })
        })
    }

    /// Numeric value of ∫₀¹ x^(−1/2) logⁿx logᵐ(1−x)/(1−x) dx.
    pub fn quad_aux(&self, aux: AuxHalfIntegral) -> Result<Float> {
        self.cached(CacheKey::Aux(aux), || {
            self.quad(|x, omx| {
                let prec = x.prec();
                let mut v = Float::with_val(prec, x.clone().ln()).pow(aux.n);
                if aux.m > 0 {
                    v *= Float::with_val(prec, omx.clone().ln()).pow(aux.m);
                }
                v / (x.clone().sqrt() * omx)
            })
        })
    }

    /// Tanh-sinh quadrature over (0, 1). The integrand receives x and 1−x
    /// separately so endpoint logs stay accurate.
    pub fn quad(&self, f: impl Fn(&Float, &Float) -> Float) -> Result<Float> {
        let prec = self.prec();
        let one = Float::with_val(prec, 1);
        // Abscissas stop once e^{−u} underflows the working precision with
        // slack for polynomially growing log factors.
        let u_max = (self.ctx.working_digits as f64 + 30.0) * std::f64::consts::LN_10;
        let t_max = (2.0 * u_max / std::f64::consts::PI).asinh();
        let half_pi = self.pi() / 2u32;

        // Contribution of all nodes t = j*h with j odd when `odd_only`,
        // every j >= 1 otherwise, plus optionally the center node.
        let sum_nodes = |h: f64, odd_only: bool| -> Float {
            let mut sum = Float::with_val(prec, 0);
            let mut j: u64 = 1;
            let step = if odd_only { 2 } else { 1 };
            loop {
                let t = j as f64 * h;
                if t > t_max {
                    break;
                }
                let t_f = Float::with_val(prec, t);
                let sinh_t = t_f.clone().sinh();
                let cosh_t = t_f.cosh();
                let u = half_pi.clone() * sinh_t;
                // x₊ = 1/(1+ε), x₋ = ε/(1+ε) with ε = e^{−2u}
                let eps = (u * -2i32).exp();
                let denom = Float::with_val(prec, &one + &eps);
                let x_plus = one.clone() / denom.clone();
                let x_minus = eps.clone() / denom.clone();
                // dx/dt = (π/2) cosh t · 2ε/(1+ε)²
                let weight = half_pi.clone() * cosh_t * 2u32 * eps / denom.square();
                sum += weight.clone() * f(&x_plus, &x_minus);
                sum += weight * f(&x_minus, &x_plus);
                j += step;
            }
            sum
        };

        let center = {
            let half = Float::with_val(prec, 0.5);
            half_pi.clone() / 2u32 * f(&half, &half)
        };

        let mut h = 0.5f64;
        let mut total = center + sum_nodes(h, false);
        let mut value = total.clone() * Float::with_val(prec, h);
        let tol = self.ctx.tolerance();
        for _level in 0..14 {
            h /= 2.0;
            total += sum_nodes(h, true);
            let new_value = total.clone() * Float::with_val(prec, h);
            let delta = Float::with_val(prec, &new_value - &value).abs();
            let scale = Float::with_val(prec, new_value.clone().abs() + 1u32);
            let converged = delta <= tol.clone() * scale;
            value = new_value;
            if converged {
                return Ok(value);
            }
        }
        Err(Error::Numeric(
            "tanh-sinh level schedule exhausted without stabilization".into(),
        ))
    }

    /// |quad(idx) − eval(expr)|.
    pub fn check_closed_form(&self, idx: IntegralIndex, expr: &ConstExpr) -> Result<Float> {
        let lhs = self.quad_index(idx)?;
        let rhs = self.eval_expr(expr)?;
        Ok(Float::with_val(self.prec(), lhs - rhs).abs())
    }

    /// Rounds to the target digit count as a decimal string.
    pub fn to_decimal(&self, v: &Float) -> String {
        format!("{:.*e}", self.ctx.digits as usize - 1, v)
    }
}

/// Cohen–Rodriguez Villegas–Zagier acceleration of Σ (−1)^k a(k), k ≥ 0.
fn alternating_sum(prec: u32, digits: u32, a: impl Fn(u64) -> Float) -> Float {
    let n = (digits as u64 * 131) / 100 + 5;
    // d = (3+√8)^n, symmetrized
    let root8 = Float::with_val(prec, 8).sqrt();
    let base = Float::with_val(prec, 3) + root8;
    let dn = base.pow(n as u32);
    let d = (dn.clone() + dn.recip()) / 2u32;
    let mut b = Float::with_val(prec, -1);
    let mut c = -d.clone();
    let mut s = Float::with_val(prec, 0);
    for k in 0..n {
        c = b.clone() - c;
        s += c.clone() * a(k);
        let num = Float::with_val(prec, (k + n) as i64) * Float::with_val(prec, k as i64 - n as i64);
        let den = (Float::with_val(prec, k) + Float::with_val(prec, 0.5))
            * Float::with_val(prec, k + 1);
        b = num * b / den;
    }
    s / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constalg::{rat, sym_li_half, sym_log2, sym_pi, sym_zeta, ConstExpr};

    fn ev() -> Evaluator {
        Evaluator::with_digits(40)
    }

    fn assert_close(ev: &Evaluator, a: &Float, b: &Float, digits: u32) {
        let diff = Float::with_val(ev.ctx.prec_bits, a - b).abs();
        let tol = Float::with_val(ev.ctx.prec_bits, 10).pow(-(digits as i32));
        assert!(
            diff < tol,
            "difference {} exceeds 1e-{digits}",
            ev.to_decimal(&diff)
        );
    }

    #[test]
    fn zeta_matches_mpfr() {
        let e = ev();
        for n in [2u32, 3, 4, 5, 7, 11] {
            let ours = e.zeta(n);
            let reference = Float::with_val(e.ctx.prec_bits, n).zeta();
            assert_close(&e, &ours, &reference, 55);
        }
    }

    #[test]
    fn zeta_known_digits() {
        let e = ev();
        let z3 = e.zeta(3);
        let expected = Float::with_val(
            e.ctx.prec_bits,
            Float::parse("1.2020569031595942853997381615114499907650").unwrap(),
        );
        assert_close(&e, &z3, &expected, 38);
    }

    #[test]
    fn li_half_values() {
        let e = ev();
        // Li₄(1/2) = 0.5174790616738993863…
        let li4 = e.li_half(4);
        let expected = Float::with_val(
            e.ctx.prec_bits,
            Float::parse("0.5174790616738993863307581618988629456223").unwrap(),
        );
        assert_close(&e, &li4, &expected, 38);
        // Li₂(1/2) must equal its reduction π²/12 − log²2/2.
        let li2 = e.li_half(2);
        let reduced = e.eval_expr(&sym_li_half(2)).unwrap();
        assert_close(&e, &li2, &reduced, 55);
        // Li₃(1/2) likewise.
        let li3 = e.li_half(3);
        let reduced3 = e.eval_expr(&sym_li_half(3)).unwrap();
        assert_close(&e, &li3, &reduced3, 55);
    }

    #[test]
    fn quad_seed_values() {
        let e = ev();
        // i₀₁₀₀ = −π²/6
        let i0100 = e
            .quad_index(IntegralIndex::from_parts(0, 1, 0, 0).unwrap())
            .unwrap();
        let expected = e.eval_expr(&sym_pi().pow(2).scale(&rat(-1, 6))).unwrap();
        assert_close(&e, &i0100, &expected, 40);
        // i₀₀₁₂ = log²2/2 = 0.2402265069591007…
        let i0012 = e
            .quad_index(IntegralIndex::from_parts(0, 0, 1, 2).unwrap())
            .unwrap();
        let expected = e.eval_expr(&sym_log2().pow(2).scale(&rat(1, 2))).unwrap();
        assert_close(&e, &i0012, &expected, 40);
    }

    #[test]
    fn quad_f1_value() {
        let e = ev();
        let f1 = e
            .quad_index(IntegralIndex::from_parts(0, 4, 1, 2).unwrap())
            .unwrap();
        let expected = Float::with_val(
            e.ctx.prec_bits,
            Float::parse("0.633579571034807").unwrap(),
        );
        assert_close(&e, &f1, &expected, 15);
    }

    #[test]
    fn quad_weight4_closed_form() {
        // i₁₁₁₁ = 2Li₄(1/2) + 7/4·ζ(3)log2 − 3π⁴/160 + log⁴2/12 − π²log²2/12
        let e = ev();
        let expr = sym_li_half(4)
            .scale(&rat(2, 1))
            .add(&sym_zeta(3).mul(&sym_log2()).scale(&rat(7, 4)))
            .add(&sym_pi().pow(4).scale(&rat(-3, 160)))
            .add(&sym_log2().pow(4).scale(&rat(1, 12)))
            .add(&sym_pi().pow(2).mul(&sym_log2().pow(2)).scale(&rat(-1, 12)));
        let resid = e
            .check_closed_form(IntegralIndex::from_parts(1, 1, 1, 1).unwrap(), &expr)
            .unwrap();
        let tol = Float::with_val(e.ctx.prec_bits, 10).pow(-30);
        assert!(resid < tol, "residual {}", e.to_decimal(&resid));
    }

    #[test]
    fn quad_aux_converges() {
        let e = ev();
        // ∫₀¹ x^{−1/2} log x/(1−x) dx = π² − 8 log 2 ... cross-check by the
        // series Σ 1/(k+1/2): ∫ x^{k−1/2} log x = −1/(k+1/2)², summed:
        // Σ_{k≥0} −1/(k+1/2)² = −π²/2.
        let aux = e.quad_aux(AuxHalfIntegral::new(1, 0).unwrap()).unwrap();
        let expected = -(e.pi().square()) / 2u32;
        assert_close(&e, &aux, &expected, 40);
    }

    #[test]
    fn quad_rejects_divergent() {
        let e = ev();
        assert!(e
            .quad_index(IntegralIndex::from_parts(0, 0, 0, 0).unwrap())
            .is_err());
    }

    #[test]
    fn reduction_is_numerically_consistent() {
        let e = ev();
        // eval(reduce(x)) == eval(x) for a randomized-ish mixed expression.
        let raw = ConstExpr::term(
            rat(3, 7),
            crate::constalg::ConstMonomial::from_factors(vec![
                (ConstSymbol::Zeta(4), 1),
                (ConstSymbol::LiHalf(2), 1),
            ]),
        )
        .add(&ConstExpr::term(
            rat(-2, 5),
            crate::constalg::ConstMonomial::from_factors(vec![
                (ConstSymbol::Zeta(2), 2),
                (ConstSymbol::LiHalf(3), 1),
            ]),
        ));
        let a = e.eval_expr(&raw).unwrap();
        let b = e.eval_expr(&raw.reduce()).unwrap();
        assert_close(&e, &a, &b, (e.ctx.digits - 5) as u32);
    }
}
