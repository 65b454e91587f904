//! Complex gamma and zeta, Laguerre functions, double-exponential
//! quadrature, and the Mellin/zeta identity verifiers.

use crate::series::{rat_i, Rat, SPoly};
use crate::sheffer::{bump_p, gen_q, laguerre, meixner, phi_n};
use crate::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

// Lanczos coefficients for g = 607/128 (15 terms).
const LANCZOS_G: f64 = 4.7421875;
const LANCZOS_C: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
];

/// Complex gamma function (Lanczos with reflection for Re(s) < 1/2).
/// Relative error below 1e-13 for |s| <= 50.
pub fn gamma_c(s: C64) -> Result<C64> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.floor() {
        return Err(Error::Domain(format!(
            "gamma pole at nonpositive integer {}",
            s.re
        )));
    }
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: C64) -> C64 {
    if s.re < 0.5 {
        // reflection: Gamma(s) = pi / (sin(pi s) Gamma(1-s))
        let pi = std::f64::consts::PI;
        return pi / ((pi * s).sin() * gamma_unchecked(C64::new(1.0, 0.0) - s));
    }
    let x = s - 1.0;
    let mut a = C64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    let sqrt2pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt2pi * t.powc(x + 0.5) * (-t).exp() * a
}

/// Riemann zeta via Borwein's alternating-series algorithm on the eta
/// function.  Valid for Re(s) > 0, s != 1.
pub fn zeta_c(s: C64) -> Result<C64> {
    if s.re <= 0.0 {
        return Err(Error::Domain(
            "zeta evaluation restricted to Re(s) > 0".into(),
        ));
    }
    if (s - C64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::Domain("zeta pole at s = 1".into()));
    }
    let n = 64usize;
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = vec![0f64; n + 1];
    let mut term = 1f64 / n as f64; // i = 0: (n-1)!/(n)! = 1/n
    let mut acc = term;
    d[0] = n as f64 * acc;
    for i in 1..=n {
        // ratio from i-1 to i: (n+i-1)(n-i+1) * 4 / ((2i-1)(2i))
        term *= 4.0 * ((n + i - 1) as f64) * ((n - i + 1) as f64)
            / (((2 * i - 1) * (2 * i)) as f64);
        acc += term;
        d[i] = n as f64 * acc;
    }
    let mut eta = C64::new(0.0, 0.0);
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kp = ((k + 1) as f64).ln();
        eta += sign * (d[k] - d[n]) * (-s * kp).exp();
    }
    eta /= -d[n];
    let ln2 = std::f64::consts::LN_2;
    let denom = C64::new(1.0, 0.0) - ((1.0 - s.re) * ln2) .exp()
        * C64::new((-(s.im) * ln2).cos(), (-(s.im) * ln2).sin());
    if denom.norm() < 1e-12 {
        return Err(Error::Domain("eta-to-zeta conversion singular".into()));
    }
    Ok(eta / denom)
}

/// Laguerre function L-frak_n^(alpha)(x) = x^(alpha/2) e^(-x/2) L_n^(alpha)(x).
pub fn laguerre_fn(n: usize, alpha: &Rat, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain("laguerre_fn needs x > 0".into()));
    }
    if alpha.to_f64() <= -1.0 {
        return Err(Error::Domain("laguerre_fn needs alpha > -1".into()));
    }
    let l = laguerre(n, alpha)?;
    let a = alpha.to_f64();
    Ok(x.powf(a / 2.0) * (-x / 2.0).exp() * eval_f64(&l, x))
}

/// Evaluate an SPoly at a real point in double precision.
pub fn eval_f64(p: &SPoly, x: f64) -> f64 {
    let mut acc = 0.0;
    for c in p.coeffs().iter().rev() {
        acc = acc * x + c.to_f64();
    }
    acc
}

/// Double-exponential quadrature result.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: C64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// Sum of |term| at the finest level: the natural scale of the
    /// integral when cancellation drives the value itself to zero.
    pub l1_mass: f64,
}

const QUAD_EVAL_CAP: usize = 2_000_000;

/// Mellin transform int_0^infty f(x) x^(s-1) dx by the exp-sinh
/// double-exponential rule.  The x^(s-1) weight and the quadrature
/// Jacobian are combined in log space so extreme nodes never overflow.
pub fn mellin_quad<F: Fn(f64) -> f64>(f: F, s: C64, reltol: f64) -> Result<QuadResult> {
    let half_pi = 0.5 * std::f64::consts::PI;
    let kmax_t = 6.0f64;
    let mut evals = 0usize;

    let sum_level = |h: f64, evals: &mut usize| -> Result<(C64, f64)> {
        let kmax = (kmax_t / h).ceil() as i64;
        let mut total = C64::new(0.0, 0.0);
        let mut l1 = 0.0f64;
        for dir in [1i64, -1] {
            let mut small_streak = 0;
            let start = if dir == 1 { 0 } else { -1 };
            let mut k = start;
            loop {
                if (dir == 1 && k > kmax) || (dir == -1 && k < -kmax) {
                    break;
                }
                let u = k as f64 * h;
                let lx = half_pi * u.sinh();
                let x = lx.exp();
                let fv = f(x);
                *evals += 1;
                if *evals > QUAD_EVAL_CAP {
                    return Err(Error::NonConvergence(
                        "quadrature evaluation cap exceeded".into(),
                    ));
                }
                if !fv.is_finite() {
                    return Err(Error::Domain(format!(
                        "integrand not finite at x = {:e}",
                        x
                    )));
                }
                let term = if fv == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    // w * x^(s-1) = exp(s*lx + ln(pi/2 cosh(u) h))
                    let logw = (half_pi * u.cosh() * h).ln();
                    fv * (s * lx + logw).exp()
                };
                total += term;
                l1 += term.norm();
                if term.norm() < 1e-20 * total.norm().max(1e-300) {
                    small_streak += 1;
                    if small_streak >= 4 {
                        break;
                    }
                } else {
                    small_streak = 0;
                }
                k += dir;
            }
        }
        Ok((total, l1))
    };

    let mut h = 0.5f64;
    let (mut prev, _) = sum_level(h, &mut evals)?;
    for _ in 0..8 {
        h *= 0.5;
        let (cur, l1) = sum_level(h, &mut evals)?;
        let err = (cur - prev).norm();
        // scale by the L1 mass, not just |cur|: a cancelling integrand can
        // have value 0 while the achievable accuracy is still eps * mass
        if err <= reltol * cur.norm().max(l1).max(1e-300) {
            return Ok(QuadResult {
                value: cur,
                abs_error_estimate: err,
                evaluations: evals,
                l1_mass: l1,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(
        "quadrature failed to reach requested tolerance".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MellinMode {
    Bump,
    Meixner,
    Phi,
    PhiX2,
}

/// One verified grid point of a Mellin identity.
#[derive(Clone, Debug)]
pub struct MellinPoint {
    pub s: f64,
    pub lhs: C64,
    pub rhs: C64,
    pub rel_err: f64,
    pub evaluations: usize,
}

/// Check one of the four Mellin identities on a real s-grid.
/// The index pair is (n, -) for bump/phi modes and (k, -) for meixner;
/// `aux` carries alpha (bump), (b, c) (meixner) or (p, p*) (phi modes).
pub fn verify_mellin_family(
    mode: MellinMode,
    n: usize,
    aux: &MellinAux,
    s_grid: &[f64],
    reltol: f64,
) -> Result<Vec<MellinPoint>> {
    let mut out = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let sc = C64::new(s, 0.0);
        let (q, rhs) = match (mode, aux) {
            (MellinMode::Bump, MellinAux::Bump { alpha }) => {
                let a = alpha.to_f64();
                let l = laguerre(n, alpha)?;
                let q = mellin_quad(
                    |x| x.powf(a / 2.0) * (-x / 2.0).exp() * eval_f64(&l, x),
                    sc,
                    reltol,
                )?;
                let p = bump_p(n, alpha)?;
                let rhs = C64::new(2f64.ln() * (s + a / 2.0), 0.0).exp()
                    * gamma_c(C64::new(s + a / 2.0, 0.0))?
                    * eval_f64(&p, s);
                (q, rhs)
            }
            (MellinMode::Meixner, MellinAux::Meixner { b, cpar }) => {
                let bm1 = b.clone() - rat_i(1);
                let l = laguerre(n, &bm1)?;
                let scale = 1.0 - 1.0 / cpar.to_f64();
                let kfac: f64 = crate::series::factorial(n).to_f64();
                let q = mellin_quad(
                    |x| kfac * eval_f64(&l, scale * x) * (-x).exp(),
                    sc,
                    reltol,
                )?;
                let m = meixner(n, b, cpar)?;
                let rhs = gamma_c(sc)? * eval_f64(&m, -s);
                (q, rhs)
            }
            (MellinMode::Phi, MellinAux::Endpoints { p, pstar }) => {
                let pre = phi_n(n, p, pstar)?;
                let pi = std::f64::consts::PI;
                let q = mellin_quad(
                    |x| eval_f64(&pre, 2.0 * pi * x) * (-pi * x).exp(),
                    sc,
                    reltol,
                )?;
                let qn = gen_q(n, p, pstar)?;
                let rhs = (-sc * pi.ln()).exp() * gamma_c(sc)? * eval_f64(&qn, s);
                (q, rhs)
            }
            (MellinMode::PhiX2, MellinAux::Endpoints { p, pstar }) => {
                let pre = phi_n(n, p, pstar)?;
                let pi = std::f64::consts::PI;
                let q = mellin_quad(
                    |x| {
                        let u = x * x;
                        eval_f64(&pre, 2.0 * pi * u) * (-pi * u).exp()
                    },
                    sc,
                    reltol,
                )?;
                let qn = gen_q(n, p, pstar)?;
                let half = C64::new(s / 2.0, 0.0);
                let rhs = 0.5 * (-half * pi.ln()).exp() * gamma_c(half)? * eval_f64(&qn, s / 2.0);
                (q, rhs)
            }
            _ => {
                return Err(Error::InvalidParam(
                    "mellin mode/parameter combination mismatch".into(),
                ))
            }
        };
        // measure against the integral's L1 mass when the value itself
        // sits at a zero of the identity (cancellation-dominated points)
        let rel_err = (q.value - rhs).norm() / rhs.norm().max(q.l1_mass).max(1e-300);
        out.push(MellinPoint {
            s,
            lhs: q.value,
            rhs,
            rel_err,
            evaluations: q.evaluations,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum MellinAux {
    Bump { alpha: Rat },
    Meixner { b: Rat, cpar: Rat },
    Endpoints { p: Rat, pstar: Rat },
}

/// Truncation data for the theta-like sum psi*_j.
#[derive(Clone, Debug)]
pub struct ThetaTail {
    pub truncation: usize,
    pub tail_bound: f64,
}

const PSI_TERM_CAP: usize = 400_000;

/// psi*_j(x) = sum_{m>=1} Phi_j(2 pi m^2 x), with a certified geometric
/// tail bound.  For x so small that the cap is reached, the reported
/// tail_bound reflects the actual truncation.
pub fn psi_star(j: usize, p: &Rat, pstar: &Rat, x: f64, reltol: f64) -> Result<(f64, ThetaTail)> {
    if x <= 0.0 {
        return Err(Error::Domain("psi_star needs x > 0".into()));
    }
    let pre = phi_n(j, p, pstar)?;
    let coeffs = pre.to_f64_coeffs();
    let deg = coeffs.len().saturating_sub(1) as f64;
    let pi = std::f64::consts::PI;
    let eval = |u: f64| -> f64 {
        let mut acc = 0.0;
        for c in coeffs.iter().rev() {
            acc = acc * (2.0 * u) + c;
        }
        acc * (-u).exp()
    };
    let mut sum = 0.0f64;
    let mut m = 1usize;
    loop {
        let u = pi * (m * m) as f64 * x;
        let term = eval(u);
        sum += term;
        let last = term.abs();
        // ratio bound for the next term: polynomial growth vs Gaussian decay
        let grow = (((m + 1) as f64 / m as f64).ln() * 2.0 * deg).exp();
        let decay = (-pi * x * (2 * m + 1) as f64).exp();
        let r = grow * decay;
        if r < 1.0 {
            let bound = last * r / (1.0 - r);
            if bound <= reltol * sum.abs().max(1e-300) || bound < 1e-280 {
                return Ok((
                    sum,
                    ThetaTail {
                        truncation: m,
                        tail_bound: bound,
                    },
                ));
            }
        }
        m += 1;
        if m > PSI_TERM_CAP {
            let bound = if r_final(deg, pi, x, m) < 1.0 {
                last * r_final(deg, pi, x, m) / (1.0 - r_final(deg, pi, x, m))
            } else {
                f64::INFINITY
            };
            return Ok((
                sum,
                ThetaTail {
                    truncation: m,
                    tail_bound: bound,
                },
            ));
        }
    }
}

fn r_final(deg: f64, pi: f64, x: f64, m: usize) -> f64 {
    let grow = (((m + 1) as f64 / m as f64).ln() * 2.0 * deg).exp();
    grow * (-pi * x * (2 * m + 1) as f64).exp()
}

/// One verified grid point of the zeta identity.
#[derive(Clone, Debug)]
pub struct ZetaPoint {
    pub s: f64,
    pub lhs: C64,
    pub rhs: C64,
    pub rel_err: f64,
    pub evaluations: usize,
}

/// Check int_0^infty psi*_j(x) x^(s/2-1) dx = q_j(s/2) pi^(-s/2) Gamma(s/2) zeta(s)
/// on a real s-grid with s > 2.
pub fn verify_zeta_identity(
    j: usize,
    p: &Rat,
    pstar: &Rat,
    s_grid: &[f64],
    reltol: f64,
) -> Result<Vec<ZetaPoint>> {
    let mut out = Vec::with_capacity(s_grid.len());
    // below this the integrand contributes less than ~delta^((s-1)/2)
    let delta = 1e-8;
    for &s in s_grid {
        if s <= 2.0 {
            return Err(Error::Domain(
                "zeta identity verified for s > 2 only".into(),
            ));
        }
        let half = C64::new(s / 2.0, 0.0);
        let q = mellin_quad(
            |x| {
                if x < delta {
                    return 0.0;
                }
                psi_star(j, p, pstar, x, reltol * 0.1)
                    .map(|(v, _)| v)
                    .unwrap_or(f64::NAN)
            },
            half,
            reltol,
        )?;
        let pi = std::f64::consts::PI;
        let qj = gen_q(j, p, pstar)?;
        let rhs = eval_f64(&qj, s / 2.0)
            * (-half * pi.ln()).exp()
            * gamma_c(half)?
            * zeta_c(C64::new(s, 0.0))?;
        let rel_err = (q.value - rhs).norm() / rhs.norm().max(1e-300);
        out.push(ZetaPoint {
            s,
            lhs: q.value,
            rhs,
            rel_err,
            evaluations: q.evaluations,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn gamma_values() {
        assert!((gamma_c(C64::new(1.0, 0.0)).unwrap().re - 1.0).abs() < 1e-14);
        let half = gamma_c(C64::new(0.5, 0.0)).unwrap();
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let g1i = gamma_c(C64::new(1.0, 1.0)).unwrap().norm();
        let expect = (std::f64::consts::PI / std::f64::consts::PI.sinh()).sqrt();
        assert!((g1i - expect).abs() < 1e-13, "{} vs {}", g1i, expect);
        assert!(gamma_c(C64::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn gamma_recurrence_grid() {
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for k in 0..10 {
                let s = C64::new(0.3 + 0.9 * i as f64, -4.0 + 0.9 * k as f64);
                if s.im == 0.0 && s.re <= 0.0 {
                    continue;
                }
                let lhs = gamma_unchecked(s + 1.0);
                let rhs = s * gamma_unchecked(s);
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
        }
        assert!(worst < 1e-12, "worst rel err {:e}", worst);
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        let z2 = zeta_c(C64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - pi * pi / 6.0).abs() < 1e-12);
        let z4 = zeta_c(C64::new(4.0, 0.0)).unwrap();
        assert!((z4.re - pi.powi(4) / 90.0).abs() < 1e-12);
        let z3 = zeta_c(C64::new(3.0, 0.0)).unwrap();
        assert!((z3.re - 1.2020569031595942854).abs() < 1e-12);
        assert!(zeta_c(C64::new(1.0, 0.0)).is_err());
        assert!(zeta_c(C64::new(-1.0, 0.0)).is_err());
        let zc = zeta_c(C64::new(0.5, 14.0)).unwrap();
        assert!(zc.norm() > 0.0 && zc.norm().is_finite());
    }

    #[test]
    fn laguerre_fn_values() {
        let e = std::f64::consts::E;
        assert!((laguerre_fn(0, &rat_i(0), 2.0).unwrap() - 1.0 / e).abs() < 1e-14);
        assert!(laguerre_fn(1, &rat_i(0), 1.0).unwrap().abs() < 1e-14);
        let v = laguerre_fn(0, &rat_i(2), 1.0).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-14);
        assert!(laguerre_fn(0, &rat_i(0), -1.0).is_err());
    }

    #[test]
    fn quadrature_closed_forms() {
        let pi = std::f64::consts::PI;
        let q = mellin_quad(|x| (-pi * x).exp(), C64::new(2.0, 0.0), 1e-11).unwrap();
        assert!((q.value.re - 1.0 / (pi * pi)).abs() < 1e-10);

        let q2 = mellin_quad(|x| (-x).exp(), C64::new(1.0, 0.0), 1e-11).unwrap();
        assert!((q2.value.re - 1.0).abs() < 1e-10);

        // Laguerre function n=0: int e^{-x/2} x^{s-1} dx at s=1 is 2
        let q3 = mellin_quad(|x| (-x / 2.0).exp(), C64::new(1.0, 0.0), 1e-11).unwrap();
        assert!((q3.value.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mellin_scaling_law() {
        // int x^lambda e^{-a x^b} x^{s-1} dx = (1/b) a^{-(s+lambda)/b} Gamma((s+lambda)/b)
        let pi = std::f64::consts::PI;
        let cases = [(0.0, pi, 1.0), (0.0, pi, 2.0), (1.0, 2.0, 1.0)];
        for (lam, a, b) in cases {
            let s = 1.7f64;
            let q = mellin_quad(
                |x| x.powf(lam) * (-a * x.powf(b)).exp(),
                C64::new(s, 0.0),
                1e-11,
            )
            .unwrap();
            let arg = (s + lam) / b;
            let expect = a.powf(-arg) / b * gamma_c(C64::new(arg, 0.0)).unwrap().re;
            let rel = (q.value.re - expect).abs() / expect.abs();
            assert!(rel < 1e-9, "case {:?}: rel {:e}", (lam, a, b), rel);
        }
    }

    #[test]
    fn mellin_phi_trivial_point() {
        let aux = MellinAux::Endpoints {
            p: rat_i(0),
            pstar: rat_i(1),
        };
        let pts = verify_mellin_family(MellinMode::Phi, 0, &aux, &[2.0], 1e-11).unwrap();
        let pi = std::f64::consts::PI;
        assert!((pts[0].lhs.re - 1.0 / (pi * pi)).abs() < 1e-10);
        assert!(pts[0].rel_err < 1e-10);
    }

    #[test]
    fn mellin_meixner_point() {
        let aux = MellinAux::Meixner {
            b: rat_i(1),
            cpar: rat_i(2),
        };
        let pts = verify_mellin_family(MellinMode::Meixner, 1, &aux, &[3.0], 1e-10).unwrap();
        assert!(pts[0].rel_err < 1e-8, "rel err {:e}", pts[0].rel_err);
    }

    #[test]
    fn mellin_bump_points() {
        let aux = MellinAux::Bump { alpha: rat(1, 2) };
        let pts = verify_mellin_family(MellinMode::Bump, 2, &aux, &[1.5, 2.0], 1e-10).unwrap();
        for p in &pts {
            assert!(p.rel_err < 1e-8, "s={} rel {:e}", p.s, p.rel_err);
        }
    }

    #[test]
    fn psi_star_values() {
        // classical theta sum at x = 1: e^-pi + e^-4pi + e^-9pi + ...
        let expect1: f64 = (1..=6)
            .map(|n| (-std::f64::consts::PI * (n * n) as f64).exp())
            .sum();
        let (v, tail) = psi_star(0, &rat_i(0), &rat_i(1), 1.0, 1e-12).unwrap();
        assert!((v - expect1).abs() < 1e-12, "{} vs {}", v, expect1);
        assert!(tail.truncation <= 6);

        let (v4, _) = psi_star(0, &rat_i(0), &rat_i(1), 4.0, 1e-12).unwrap();
        let expect = (-4.0 * std::f64::consts::PI).exp();
        assert!((v4 - expect).abs() / expect < 1e-9);

        let (vbig, _) = psi_star(0, &rat_i(0), &rat_i(1), 400.0, 1e-12).unwrap();
        assert!(vbig.abs() < 1e-300);
    }

    #[test]
    fn psi_star_tail_monotone_in_truncation() {
        // tighter tolerance forces deeper truncation and a smaller bound
        let mut prev_bound = f64::INFINITY;
        let mut prev_trunc = 0usize;
        for tol in [1e-2, 1e-6, 1e-10] {
            let (_, tail) = psi_star(2, &rat_i(0), &rat_i(1), 0.05, tol).unwrap();
            assert!(tail.truncation >= prev_trunc);
            assert!(tail.tail_bound <= prev_bound);
            prev_trunc = tail.truncation;
            prev_bound = tail.tail_bound;
        }
    }

    #[test]
    fn zeta_identity_classical_point() {
        let pts = verify_zeta_identity(0, &rat_i(0), &rat_i(1), &[4.0], 1e-8).unwrap();
        let pi = std::f64::consts::PI;
        let expect = pi * pi / 90.0;
        assert!((pts[0].rhs.re - expect).abs() < 1e-10);
        assert!(pts[0].rel_err < 1e-6, "rel {:e}", pts[0].rel_err);
    }
}
