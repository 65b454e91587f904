//! Exact univariate polynomials in `s` over the rationals, and truncated
//! power series in `z` whose coefficients are such polynomials.

use crate::{Error, Result};
use once_cell::sync::Lazy;
use rug::{Complex, Float, Integer, Rational};
use std::fmt;

pub type Rat = Rational;
pub type ComplexHP = Complex;

/// Shorthand for a rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rational::from((n, d))
}

/// Shorthand for an integer rational.
pub fn rat_i(n: i64) -> Rat {
    Rational::from(n)
}

static FACTORIALS: Lazy<Vec<Integer>> = Lazy::new(|| {
    let mut v = Vec::with_capacity(201);
    let mut acc = Integer::from(1);
    v.push(acc.clone());
    for k in 1..=200u32 {
        acc *= k;
        v.push(acc.clone());
    }
    v
});

/// n! as an exact integer (cached up to 200).
pub fn factorial(n: usize) -> Integer {
    if n < FACTORIALS.len() {
        FACTORIALS[n].clone()
    } else {
        let mut acc = FACTORIALS[200].clone();
        for k in 201..=n {
            acc *= k as u64;
        }
        acc
    }
}

/// Binomial coefficient C(n,k) for natural n, k.
pub fn binomial(n: usize, k: usize) -> Integer {
    if k > n {
        return Integer::from(0);
    }
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// Polynomial in `s` with exact rational coefficients.
/// Zero polynomial is the empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SPoly {
    coeffs: Vec<Rat>,
}

impl SPoly {
    pub fn zero() -> Self {
        SPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SPoly::constant(rat_i(1))
    }

    pub fn constant(c: Rat) -> Self {
        SPoly::from_coeffs(vec![c])
    }

    /// The monomial `s`.
    pub fn var() -> Self {
        SPoly::from_coeffs(vec![rat_i(0), rat_i(1)])
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = SPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| rat_i(0))
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &SPoly) -> SPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        SPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &SPoly) -> SPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        SPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> SPoly {
        SPoly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &SPoly) -> SPoly {
        if self.is_zero() || other.is_zero() {
            return SPoly::zero();
        }
        let mut out = vec![rat_i(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rat::from(a * b);
            }
        }
        SPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> SPoly {
        if c.is_zero() {
            return SPoly::zero();
        }
        SPoly::from_coeffs(self.coeffs.iter().map(|a| Rat::from(a * c)).collect())
    }

    /// p(a + b·s), computed by Horner with exact arithmetic.
    pub fn compose_linear(&self, a: &Rat, b: &Rat) -> SPoly {
        let lin = SPoly::from_coeffs(vec![a.clone(), b.clone()]);
        let mut acc = SPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin);
            acc = acc.add(&SPoly::constant(c.clone()));
        }
        acc
    }

    pub fn eval_rat(&self, at: &Rat) -> Rat {
        let mut acc = rat_i(0);
        for c in self.coeffs.iter().rev() {
            acc *= at;
            acc += c;
        }
        acc
    }

    /// Coefficients rounded to f64, low degree first.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Derivative with respect to s.
    pub fn derivative(&self) -> SPoly {
        if self.coeffs.len() <= 1 {
            return SPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(Rat::from(c * &rat_i(k as i64)));
        }
        SPoly::from_coeffs(out)
    }
}

impl fmt::Debug for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SPoly({})", self)
    }
}

impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.clone() < 0;
            let mag = c.clone().abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = mag != rat_i(1) || k == 0;
            if show_coeff {
                write!(f, "{}", mag)?;
            }
            if k >= 1 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "s")?;
                if k >= 2 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

/// Horner evaluation result with an a-priori roundoff bound.
pub struct EvalResult {
    pub value: ComplexHP,
    pub abs_error_bound: f64,
}

/// Evaluate `poly` at a complex point, returning the value together with the
/// standard Horner accumulation bound gamma_{2n} * sum |a_k| |x|^k.
pub fn spoly_eval(poly: &SPoly, at: &ComplexHP) -> EvalResult {
    let prec = at.prec().0.max(at.prec().1);
    let mut acc = Complex::with_val(prec, 0);
    let mut cond = Float::with_val(prec, 0);
    let absx = Float::with_val(prec, at.abs_ref());
    for c in poly.coeffs().iter().rev() {
        let cf = Float::with_val(prec, c);
        acc *= at;
        acc += &cf;
        cond *= &absx;
        cond += cf.abs();
    }
    let n = poly.coeffs().len().max(1) as f64;
    let u = 2f64.powi(-(prec as i32) + 1);
    let m = 2.0 * n * u;
    let gamma = m / (1.0 - m);
    EvalResult {
        abs_error_bound: gamma * cond.to_f64(),
        value: acc,
    }
}

/// Truncated power series in `z` with SPoly coefficients.
/// `coeffs.len() == order + 1` always.
#[derive(Clone, PartialEq, Debug)]
pub struct ZSeries {
    coeffs: Vec<SPoly>,
}

impl ZSeries {
    pub fn from_coeffs(coeffs: Vec<SPoly>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        ZSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        ZSeries {
            coeffs: vec![SPoly::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = ZSeries::zero(order);
        s.coeffs[0] = SPoly::one();
        s
    }

    /// The series `z` truncated at `order`.
    pub fn var(order: usize) -> Self {
        let mut s = ZSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = SPoly::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &SPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[SPoly] {
        &self.coeffs
    }

    pub fn is_var(&self) -> bool {
        self.coeffs[0].is_zero()
            && self.coeffs.iter().skip(1).enumerate().all(|(i, c)| {
                if i == 0 {
                    *c == SPoly::one()
                } else {
                    c.is_zero()
                }
            })
            && self.order() >= 1
    }

    fn check_order(&self, other: &ZSeries) -> Result<()> {
        if self.order() != other.order() {
            Err(Error::MismatchedOrder(self.order(), other.order()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &ZSeries) -> Result<ZSeries> {
        self.check_order(other)?;
        Ok(ZSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &ZSeries) -> Result<ZSeries> {
        self.check_order(other)?;
        Ok(ZSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> ZSeries {
        ZSeries {
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn scale_poly(&self, p: &SPoly) -> ZSeries {
        ZSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul(p)).collect(),
        }
    }

    /// Cauchy product under the shared truncation order.
    pub fn mul(&self, other: &ZSeries) -> Result<ZSeries> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![SPoly::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(ZSeries { coeffs: out })
    }

    /// base^expo for a series with constant term 1, via the first-order ODE
    /// recurrence n·h_n = sum_{k=1..n} (expo·k - (n-k))·f_k·h_{n-k}.
    pub fn real_pow(&self, expo: &Rat) -> Result<ZSeries> {
        if self.coeffs[0] != SPoly::one() {
            return Err(Error::InvalidParam(
                "series_real_pow requires constant term 1".into(),
            ));
        }
        let n = self.order();
        let mut h = vec![SPoly::zero(); n + 1];
        h[0] = SPoly::one();
        for m in 1..=n {
            let mut acc = SPoly::zero();
            for k in 1..=m {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                let w = Rat::from(expo * &rat_i(k as i64)) - rat_i((m - k) as i64);
                if w.is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&h[m - k]).scale(&w));
            }
            h[m] = acc.scale(&rat(1, m as i64));
        }
        Ok(ZSeries { coeffs: h })
    }

    /// exp of a series with zero constant term.
    pub fn exp(&self) -> Result<ZSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidParam(
                "series exp requires zero constant term".into(),
            ));
        }
        let n = self.order();
        let mut h = vec![SPoly::zero(); n + 1];
        h[0] = SPoly::one();
        for m in 1..=n {
            let mut acc = SPoly::zero();
            for k in 1..=m {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&h[m - k]).scale(&rat_i(k as i64)));
            }
            h[m] = acc.scale(&rat(1, m as i64));
        }
        Ok(ZSeries { coeffs: h })
    }

    /// self(inner(z)) for inner with zero constant term, by Horner on the
    /// outer coefficients.
    pub fn compose(&self, inner: &ZSeries) -> Result<ZSeries> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidParam(
                "series composition requires inner constant term 0".into(),
            ));
        }
        if inner.is_var() {
            return Ok(self.clone());
        }
        let n = self.order();
        let mut acc = ZSeries::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }
}

/// Truncation of (1 + cmul·z)^(a0 + a1·s): coefficient of z^k is the
/// generalized binomial C(a0 + a1·s, k) · cmul^k.
pub fn expand_binomial_linear(a0: &Rat, a1: &Rat, cmul: &Rat, order: usize) -> ZSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(SPoly::one());
    // running product (x)(x-1)...(x-k+1)/k! with x = a0 + a1 s, times cmul^k
    let mut prod = SPoly::one();
    let mut cpow = rat_i(1);
    for k in 1..=order {
        let shifted = SPoly::from_coeffs(vec![a0.clone() - rat_i(k as i64 - 1), a1.clone()]);
        prod = prod.mul(&shifted);
        cpow *= cmul;
        let kfac = Rat::from(factorial(k));
        coeffs.push(prod.scale(&Rat::from(&cpow / &kfac)));
    }
    ZSeries::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_linear_plain() {
        let s = expand_binomial_linear(&rat_i(1), &rat_i(0), &rat_i(1), 2);
        assert_eq!(*s.coeff(0), SPoly::one());
        assert_eq!(*s.coeff(1), SPoly::one());
        assert!(s.coeff(2).is_zero());
    }

    #[test]
    fn binomial_linear_first_order() {
        let s = expand_binomial_linear(&rat_i(0), &rat_i(1), &rat_i(-1), 1);
        assert_eq!(*s.coeff(0), SPoly::one());
        assert_eq!(*s.coeff(1), SPoly::var().neg());
    }

    #[test]
    fn binomial_linear_choose_two() {
        // C(s,2) = (s^2 - s)/2
        let s = expand_binomial_linear(&rat_i(0), &rat_i(1), &rat_i(-1), 2);
        let expected = SPoly::from_coeffs(vec![rat_i(0), rat(-1, 2), rat(1, 2)]);
        assert_eq!(*s.coeff(2), expected);
    }

    #[test]
    fn binomial_linear_scalar_matches_bruteforce() {
        // a1 = 0: coefficient of z^k must be C(a, k) cmul^k for scalar a
        let a = rat(7, 3);
        let cm = rat(-2, 5);
        let s = expand_binomial_linear(&a, &rat_i(0), &cm, 20);
        let mut expect = rat_i(1);
        for k in 0..=20usize {
            assert_eq!(s.coeff(k).coeff(0), expect, "k={}", k);
            assert!(s.coeff(k).degree().unwrap_or(0) == 0);
            let next = Rat::from(&a - &rat_i(k as i64)) / rat_i(k as i64 + 1);
            expect = Rat::from(&expect * &next) * cm.clone();
        }
    }

    #[test]
    fn mul_basic() {
        let one_plus = expand_binomial_linear(&rat_i(1), &rat_i(0), &rat_i(1), 2);
        let one_minus = expand_binomial_linear(&rat_i(1), &rat_i(0), &rat_i(-1), 2);
        let prod = one_plus.mul(&one_minus).unwrap();
        assert_eq!(*prod.coeff(0), SPoly::one());
        assert!(prod.coeff(1).is_zero());
        assert_eq!(*prod.coeff(2), SPoly::constant(rat_i(-1)));
    }

    #[test]
    fn mul_with_s_coeff() {
        // (1 + s z)^2 = 1 + 2 s z + s^2 z^2
        let base = ZSeries::from_coeffs(vec![SPoly::one(), SPoly::var(), SPoly::zero()]);
        let sq = base.mul(&base).unwrap();
        assert_eq!(*sq.coeff(1), SPoly::var().scale(&rat_i(2)));
        assert_eq!(*sq.coeff(2), SPoly::var().mul(&SPoly::var()));
    }

    #[test]
    fn mul_order_mismatch() {
        let a = ZSeries::one(2);
        let b = ZSeries::one(3);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn real_pow_identity() {
        let base = expand_binomial_linear(&rat_i(1), &rat_i(0), &rat_i(-1), 4)
            .mul(&expand_binomial_linear(&rat_i(1), &rat_i(0), &rat_i(1), 4))
            .unwrap();
        // base = 1 - z^2
        let p = base.real_pow(&rat_i(1)).unwrap();
        assert_eq!(p, base);
    }

    #[test]
    fn real_pow_sqrt() {
        // (1 - 4z^2)^(1/2) = 1 - 2z^2 - 2z^4 + O(z^6)
        let mut c = vec![SPoly::zero(); 5];
        c[0] = SPoly::one();
        c[2] = SPoly::constant(rat_i(-4));
        let base = ZSeries::from_coeffs(c);
        let p = base.real_pow(&rat(1, 2)).unwrap();
        assert_eq!(*p.coeff(0), SPoly::one());
        assert!(p.coeff(1).is_zero());
        assert_eq!(*p.coeff(2), SPoly::constant(rat_i(-2)));
        assert!(p.coeff(3).is_zero());
        assert_eq!(*p.coeff(4), SPoly::constant(rat_i(-2)));
    }

    #[test]
    fn real_pow_geometric() {
        let mut c = vec![SPoly::zero(); 5];
        c[0] = SPoly::one();
        c[2] = SPoly::constant(rat_i(-1));
        let base = ZSeries::from_coeffs(c);
        let p = base.real_pow(&rat_i(-1)).unwrap();
        for k in 0..=4 {
            if k % 2 == 0 {
                assert_eq!(*p.coeff(k), SPoly::one());
            } else {
                assert!(p.coeff(k).is_zero());
            }
        }
    }

    #[test]
    fn real_pow_inverse_cancels_exactly() {
        let base = expand_binomial_linear(&rat(1, 3), &rat(2, 7), &rat(-3, 2), 8);
        // force constant term 1 input: (1 + cz)^x already has constant 1
        let a = rat(5, 4);
        let p = base.real_pow(&a).unwrap();
        let q = base.real_pow(&Rat::from(-&a)).unwrap();
        let prod = p.mul(&q).unwrap();
        assert_eq!(prod, ZSeries::one(8));
    }

    #[test]
    fn real_pow_requires_unit_constant() {
        let base = ZSeries::var(3);
        assert!(base.real_pow(&rat_i(2)).is_err());
    }

    #[test]
    fn exp_basic() {
        // exp(z) through order 4
        let z = ZSeries::var(4);
        let e = z.exp().unwrap();
        for k in 0..=4usize {
            assert_eq!(e.coeff(k).coeff(0), Rat::from(factorial(k)).recip());
        }
    }

    #[test]
    fn compose_identity() {
        let b = expand_binomial_linear(&rat(1, 2), &rat(1, 3), &rat_i(1), 5);
        let z = ZSeries::var(5);
        assert_eq!(b.compose(&z).unwrap(), b);
    }

    #[test]
    fn compose_geometric_double() {
        // 1/(1-w) at w = 2z gives sum (2z)^k
        let mut c = vec![SPoly::zero(); 4];
        c[0] = SPoly::one();
        c[1] = SPoly::constant(rat_i(-1));
        let base = ZSeries::from_coeffs(c);
        let geo = base.real_pow(&rat_i(-1)).unwrap();
        let inner = ZSeries::var(3).scale(&rat_i(2));
        let comp = geo.compose(&inner).unwrap();
        for k in 0..=3usize {
            assert_eq!(comp.coeff(k).coeff(0), rat_i(1i64 << k));
        }
    }

    #[test]
    fn eval_product_consistency() {
        let p = SPoly::from_coeffs(vec![rat_i(1), rat(-3, 2), rat(5, 7)]);
        let q = SPoly::from_coeffs(vec![rat_i(-2), rat_i(0), rat_i(1), rat(1, 3)]);
        let w = Complex::with_val(128, (0.7, -1.3));
        let lhs = spoly_eval(&p.mul(&q), &w);
        let rhs_p = spoly_eval(&p, &w);
        let rhs_q = spoly_eval(&q, &w);
        let rhs = rhs_p.value * rhs_q.value;
        let diff = Complex::from(lhs.value - rhs).abs().real().to_f64();
        assert!(diff < 1e-30, "diff = {:e}", diff);
    }

    #[test]
    fn eval_examples() {
        let p = SPoly::from_coeffs(vec![rat_i(1), rat_i(-2)]);
        let at = Complex::with_val(128, (0.5, 0.0));
        let r = spoly_eval(&p, &at);
        assert!(r.value.real().to_f64().abs() < 1e-35);

        let p2 = SPoly::from_coeffs(vec![rat_i(0), rat_i(-4), rat_i(4)]);
        let at1 = Complex::with_val(128, (1.0, 0.0));
        let r2 = spoly_eval(&p2, &at1);
        assert!(r2.value.real().to_f64().abs() < 1e-35);

        let sq = SPoly::from_coeffs(vec![rat_i(0), rat_i(0), rat_i(1)]);
        let ati = Complex::with_val(128, (0.0, 1.0));
        let r3 = spoly_eval(&sq, &ati);
        assert!((r3.value.real().to_f64() + 1.0).abs() < 1e-35);
        assert!(r3.value.imag().to_f64().abs() < 1e-35);
    }

    #[test]
    fn compose_linear_shift() {
        // p(s) = s^2, p(s+1) = s^2 + 2s + 1
        let p = SPoly::from_coeffs(vec![rat_i(0), rat_i(0), rat_i(1)]);
        let shifted = p.compose_linear(&rat_i(1), &rat_i(1));
        assert_eq!(
            shifted,
            SPoly::from_coeffs(vec![rat_i(1), rat_i(2), rat_i(1)])
        );
    }

    #[test]
    fn display_reads_naturally() {
        let p = SPoly::from_coeffs(vec![rat_i(1), rat_i(-2)]);
        assert_eq!(format!("{}", p), "-2*s + 1");
    }
}
