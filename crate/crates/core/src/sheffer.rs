//! The polynomial families under study: q_n, h_n, Meixner, Laguerre, the
//! bump polynomials P_n, the Phi_n prefactors, and the Riordan-array
//! machinery tying them together.

use crate::series::{expand_binomial_linear, factorial, rat_i, Rat, SPoly, ZSeries};
use crate::{Error, Result};
use rug::Rational;

/// Family parameters: alpha_0..alpha_N, exponents p_1..p_N, and the
/// endpoint exponents p, p*.  The line of interest is Re(s) = c = (p*-p)/2.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub alpha: Vec<Rat>,
    pub pexp: Vec<Rat>,
    pub p: Rat,
    pub pstar: Rat,
}

impl ParamSet {
    pub fn new(alpha: Vec<Rat>, pexp: Vec<Rat>, p: Rat, pstar: Rat) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParam("alpha_0 is required".into()));
        }
        if alpha[0].is_zero() {
            return Err(Error::InvalidParam(
                "alpha_0 = 0 is the degenerate case (all h_n constant)".into(),
            ));
        }
        if pexp.len() + 1 != alpha.len() {
            return Err(Error::InvalidParam(format!(
                "expected {} exponents p_i for {} alphas, got {}",
                alpha.len() - 1,
                alpha.len(),
                pexp.len()
            )));
        }
        // the line theorem needs the extra singularities/zeros at z =
        // +-1/alpha_i to sit on the cuts |z| >= 1/|alpha_0|, i.e. every
        // |alpha_i| strictly below |alpha_0|
        let a0 = Rational::from(alpha[0].abs_ref());
        for a in alpha.iter().skip(1) {
            if Rational::from(a.abs_ref()) >= a0 {
                return Err(Error::InvalidParam(
                    "each |alpha_i| (i >= 1) must be strictly below |alpha_0|".into(),
                ));
            }
        }
        Ok(ParamSet {
            alpha,
            pexp,
            p,
            pstar,
        })
    }

    /// N = number of quadratic factors.
    pub fn n_factors(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn c(&self) -> Rat {
        Rational::from(&self.pstar - &self.p) / rat_i(2)
    }

    /// Same family after the harmless rescaling z -> z/alpha_0, which
    /// normalizes alpha_0 to 1 without moving any zero of h_n.
    pub fn normalized(&self) -> ParamSet {
        let a0 = self.alpha[0].clone();
        ParamSet {
            alpha: self
                .alpha
                .iter()
                .map(|a| Rational::from(a / &a0))
                .collect(),
            pexp: self.pexp.clone(),
            p: self.p.clone(),
            pstar: self.pstar.clone(),
        }
    }
}

/// Falling factorial (x)_m = x(x-1)...(x-m+1) for rational x.
pub fn falling(x: &Rat, m: usize) -> Rat {
    let mut acc = rat_i(1);
    for j in 0..m {
        acc *= Rational::from(x - &rat_i(j as i64));
    }
    acc
}

/// Ordinary coefficients b_0..b_upto of prod_{i>=1} (1 - alpha_i^2 z^2)^{p_i}.
pub fn coeff_b(params: &ParamSet, upto: usize) -> Result<Vec<Rat>> {
    let half = upto / 2;
    // work in w = z^2
    let mut acc = ZSeries::one(half);
    for (a, pe) in params.alpha.iter().skip(1).zip(&params.pexp) {
        let c = -Rational::from(a * a);
        let factor = expand_binomial_linear(pe, &rat_i(0), &c, half);
        acc = acc.mul(&factor)?;
    }
    let mut out = Vec::with_capacity(upto + 1);
    for k in 0..=upto {
        if k % 2 == 0 {
            let c = acc.coeff(k / 2);
            debug_assert!(c.degree().unwrap_or(0) == 0 || c.is_zero());
            out.push(c.coeff(0));
        } else {
            out.push(rat_i(0));
        }
    }
    Ok(out)
}

/// The series (1 - z)^(p+s) (1 + z)^(p*-s) truncated at `order`.
fn q_series(p: &Rat, pstar: &Rat, order: usize) -> ZSeries {
    let left = expand_binomial_linear(p, &rat_i(1), &rat_i(-1), order);
    let right = expand_binomial_linear(pstar, &rat_i(-1), &rat_i(1), order);
    left.mul(&right).expect("orders match by construction")
}

/// q_0..q_nmax for the given endpoint exponents, computed by series
/// expansion and cross-checked against the explicit double-binomial sum.
pub fn gen_q_upto(nmax: usize, p: &Rat, pstar: &Rat) -> Result<Vec<SPoly>> {
    let series = q_series(p, pstar, nmax);
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let qn = series.coeff(n).scale(&Rat::from(factorial(n)));
        let explicit = q_explicit(n, p, pstar);
        if qn != explicit {
            return Err(Error::CrossCheck(format!(
                "q_{} series vs explicit sum disagree for p={}, p*={}",
                n, p, pstar
            )));
        }
        out.push(qn);
    }
    Ok(out)
}

/// q_n(s) for a single n.
pub fn gen_q(n: usize, p: &Rat, pstar: &Rat) -> Result<SPoly> {
    Ok(gen_q_upto(n, p, pstar)?.pop().expect("nonempty"))
}

/// Explicit formula: q_n(s) = n! sum_k (-1)^k C(p+s, k) C(p*-s, n-k).
fn q_explicit(n: usize, p: &Rat, pstar: &Rat) -> SPoly {
    let mut acc = SPoly::zero();
    for k in 0..=n {
        let a = binom_poly(p, &rat_i(1), k);
        let b = binom_poly(pstar, &rat_i(-1), n - k);
        let term = a.mul(&b);
        if k % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc.scale(&Rat::from(factorial(n)))
}

/// C(a0 + a1 s, k) as an SPoly.
fn binom_poly(a0: &Rat, a1: &Rat, k: usize) -> SPoly {
    let mut prod = SPoly::one();
    for j in 0..k {
        prod = prod.mul(&SPoly::from_coeffs(vec![
            Rational::from(a0 - &rat_i(j as i64)),
            a1.clone(),
        ]));
    }
    prod.scale(&Rat::from(factorial(k)).recip())
}

/// h_0..h_nmax by the b*q convolution, cross-checked against the direct
/// expansion of the full generating product.  alpha_0 is normalized to 1
/// internally (pure rescaling of z; zero locations unaffected).
pub fn gen_h_upto(nmax: usize, params: &ParamSet) -> Result<Vec<SPoly>> {
    let norm = params.normalized();
    let qs = gen_q_upto(nmax, &norm.p, &norm.pstar)?;
    let bs = coeff_b(&norm, nmax)?;

    // direct route: full product series
    let mut series = q_series(&norm.p, &norm.pstar, nmax);
    for (a, pe) in norm.alpha.iter().skip(1).zip(&norm.pexp) {
        let asq = -Rational::from(a * a);
        let half = nmax / 2;
        let factor_w = expand_binomial_linear(pe, &rat_i(0), &asq, half);
        // interleave into a z-series
        let mut coeffs = vec![SPoly::zero(); nmax + 1];
        for k in 0..=half {
            coeffs[2 * k] = factor_w.coeff(k).clone();
        }
        series = series.mul(&ZSeries::from_coeffs(coeffs))?;
    }

    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        // h_n = sum_k n!/k! b_{n-k} q_k
        let nfac = factorial(n);
        let mut acc = SPoly::zero();
        for k in 0..=n {
            if bs[n - k].is_zero() {
                continue;
            }
            let w = Rat::from(&bs[n - k] * &Rat::from(&nfac / factorial(k)));
            acc = acc.add(&qs[k].scale(&w));
        }
        let direct = series.coeff(n).scale(&Rat::from(nfac));
        if acc != direct {
            return Err(Error::CrossCheck(format!(
                "h_{} convolution vs direct expansion disagree",
                n
            )));
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn gen_h(n: usize, params: &ParamSet) -> Result<SPoly> {
    Ok(gen_h_upto(n, params)?.pop().expect("nonempty"))
}

/// Three-term step: q_{n+1} = (p*-p-2s) q_n + n(n-p*-p-1) q_{n-1}.
pub fn three_term_next(qn: &SPoly, qnm1: &SPoly, n: usize, p: &Rat, pstar: &Rat) -> SPoly {
    let lin = SPoly::from_coeffs(vec![Rational::from(pstar - p), rat_i(-2)]);
    let nn = rat_i(n as i64);
    let w = Rat::from(&nn * &(Rational::from(&nn - pstar) - p - rat_i(1)));
    lin.mul(qn).add(&qnm1.scale(&w))
}

/// Exact check of the shift recurrence
/// 2 q_{n+1}(s) = (p*-p-2s) q_n(s) + (p*-s) q_n(s+1) - (p+s) q_n(s-1).
pub fn shift_recurrence_check(n: usize, p: &Rat, pstar: &Rat) -> Result<bool> {
    let qs = gen_q_upto(n + 1, p, pstar)?;
    let qn = &qs[n];
    let lin = SPoly::from_coeffs(vec![Rational::from(pstar - p), rat_i(-2)]);
    let up = qn.compose_linear(&rat_i(1), &rat_i(1));
    let dn = qn.compose_linear(&rat_i(-1), &rat_i(1));
    let wup = SPoly::from_coeffs(vec![pstar.clone(), rat_i(-1)]);
    let wdn = SPoly::from_coeffs(vec![p.clone(), rat_i(1)]);
    let rhs = lin.mul(qn).add(&wup.mul(&up)).sub(&wdn.mul(&dn));
    Ok(rhs == qs[n + 1].scale(&rat_i(2)))
}

/// Exact check of q_n(s) = (-1)^n q_n(p*-p-s).
pub fn functional_eq_check(n: usize, p: &Rat, pstar: &Rat) -> Result<bool> {
    let qn = gen_q(n, p, pstar)?;
    let reflected = qn.compose_linear(&Rational::from(pstar - p), &rat_i(-1));
    let signed = if n % 2 == 0 {
        reflected
    } else {
        reflected.neg()
    };
    Ok(qn == signed)
}

/// Meixner polynomial M_n(x; b, c) = n! [z^n] (1 - z/c)^x (1 - z)^(-x-b).
pub fn meixner(n: usize, b: &Rat, cpar: &Rat) -> Result<SPoly> {
    if cpar.is_zero() || *cpar == rat_i(1) {
        return Err(Error::InvalidParam(
            "Meixner parameter c must avoid 0 and 1".into(),
        ));
    }
    let inv_c = -Rat::from(cpar.clone().recip());
    let left = expand_binomial_linear(&rat_i(0), &rat_i(1), &inv_c, n);
    let right = expand_binomial_linear(&Rat::from(-b.clone()), &rat_i(-1), &rat_i(-1), n);
    let prod = left.mul(&right)?;
    Ok(prod.coeff(n).scale(&Rat::from(factorial(n))))
}

/// q_n recovered through the Meixner expansion:
/// q_n(s) = sum_k C(n,k) (p*)_{n-k} M_k(-s; -p, -1).
pub fn q_via_meixner(n: usize, p: &Rat, pstar: &Rat) -> Result<SPoly> {
    let mb = Rat::from(-p.clone());
    let mut acc = SPoly::zero();
    for k in 0..=n {
        let m = meixner(k, &mb, &rat_i(-1))?;
        let m_neg = m.compose_linear(&rat_i(0), &rat_i(-1));
        let w = Rat::from(crate::series::binomial(n, k)) * falling(pstar, n - k);
        acc = acc.add(&m_neg.scale(&w));
    }
    Ok(acc)
}

/// Laguerre polynomial L_n^(alpha)(x) = [z^n] (1-z)^(-alpha-1) e^(-zx/(1-z)).
pub fn laguerre(n: usize, alpha: &Rat) -> Result<SPoly> {
    let expo = -Rational::from(alpha + &rat_i(1));
    let front = expand_binomial_linear(&expo, &rat_i(0), &rat_i(-1), n);
    // u = -x * z/(1-z): coefficient of z^k is -x for k >= 1
    let mut ucoeffs = vec![SPoly::zero(); n + 1];
    for c in ucoeffs.iter_mut().skip(1) {
        *c = SPoly::var().neg();
    }
    let expu = ZSeries::from_coeffs(ucoeffs).exp()?;
    let prod = front.mul(&expu)?;
    Ok(prod.coeff(n).clone())
}

/// Polynomial prefactor of Phi_n(s): the full function is this times
/// e^(-s/2).  Prefactor = sum_k C(n,k) (p*)_{n-k} k! L_k^(-p-1)(s).
pub fn phi_n(n: usize, p: &Rat, pstar: &Rat) -> Result<SPoly> {
    let la = -Rational::from(p + &rat_i(1));
    let mut acc = SPoly::zero();
    for k in 0..=n {
        let l = laguerre(k, &la)?;
        let w = Rat::from(crate::series::binomial(n, k))
            * falling(pstar, n - k)
            * Rat::from(factorial(k));
        acc = acc.add(&l.scale(&w));
    }
    Ok(acc)
}

fn riordan_pre(g: &ZSeries, f: &ZSeries) -> Result<()> {
    if !f.coeff(0).is_zero() {
        return Err(Error::InvalidParam("riordan: f(0) must be 0".into()));
    }
    if f.order() >= 1 && f.coeff(1).is_zero() {
        return Err(Error::InvalidParam("riordan: f'(0) must be nonzero".into()));
    }
    if g.coeff(0).is_zero() {
        return Err(Error::InvalidParam("riordan: g(0) must be nonzero".into()));
    }
    Ok(())
}

/// Entry p_{n,k} = n!/k! [z^n] g f^k of the exponential Riordan matrix.
pub fn riordan_entry(g: &ZSeries, f: &ZSeries, n: usize, k: usize) -> Result<Rat> {
    riordan_pre(g, f)?;
    if k > n {
        return Ok(rat_i(0));
    }
    if n > g.order() {
        return Err(Error::InvalidParam(format!(
            "riordan_entry: order {} too small for n={}",
            g.order(),
            n
        )));
    }
    let mut acc = g.clone();
    for _ in 0..k {
        acc = acc.mul(f)?;
    }
    let c = acc.coeff(n);
    if !c.is_zero() && c.degree() != Some(0) {
        return Err(Error::InvalidParam(
            "riordan_entry: entry is not a scalar".into(),
        ));
    }
    Ok(c.coeff(0) * Rat::from(factorial(n) / factorial(k)))
}

/// Fundamental property: the matrix acts on EGFs as b -> g * (b o f).
pub fn riordan_apply(g: &ZSeries, f: &ZSeries, bseries: &ZSeries) -> Result<ZSeries> {
    riordan_pre(g, f)?;
    g.mul(&bseries.compose(f)?)
}

/// Bump's polynomials: P_n^(alpha)(s) = q_n(s; p = -1-alpha/2, p* = -alpha/2)/n!.
pub fn bump_p(n: usize, alpha: &Rat) -> Result<SPoly> {
    let half = Rational::from(alpha / &rat_i(2));
    let p = -Rational::from(&half + &rat_i(1));
    let pstar = -half;
    Ok(gen_q(n, &p, &pstar)?.scale(&Rat::from(factorial(n)).recip()))
}
