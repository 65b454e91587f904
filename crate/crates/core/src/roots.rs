//! Multiprecision root finding and verification of the zero-line and
//! interlacing theorems.

use crate::series::{rat_i, spoly_eval, ComplexHP, Rat, SPoly};
use crate::sheffer::{gen_h, gen_q, ParamSet};
use crate::{Error, Result};
use rug::ops::CompleteRound;
use rug::{Complex, Float, Rational};

/// Roots of one polynomial with residuals and line classification.
#[derive(Clone, Debug)]
pub struct RootReport {
    pub roots: Vec<ComplexHP>,
    pub residuals: Vec<f64>,
    pub line_c: Rat,
    pub on_line: Vec<bool>,
    pub offline_count: usize,
    pub precision_bits: u32,
}

/// Default line tolerance, scaled by max(1, |root|) per root.
pub const TAU_LINE: f64 = 1e-10;

fn trim_poly(v: &mut Vec<Rational>) {
    while v.last().map_or(false, |c| *c == 0) {
        v.pop();
    }
}

/// Exact monic gcd of two rational polynomials (Euclidean algorithm).
fn rat_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rational> {
    let mut a: Vec<Rational> = a.to_vec();
    let mut b: Vec<Rational> = b.to_vec();
    trim_poly(&mut a);
    trim_poly(&mut b);
    while !b.is_empty() {
        while a.len() >= b.len() && !a.is_empty() {
            let k = a.len() - b.len();
            let f = Rational::from(&a[a.len() - 1] / &b[b.len() - 1]);
            for i in 0..b.len() {
                let t = Rational::from(&b[i] * &f);
                a[k + i] -= t;
            }
            trim_poly(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c /= &lead;
        }
    }
    a
}

/// Exact quotient a / b (b must divide a).
fn rat_div_exact(a: &[Rat], b: &[Rational]) -> Vec<Rational> {
    let mut rem: Vec<Rational> = a.to_vec();
    trim_poly(&mut rem);
    let mut quo = vec![Rational::new(); rem.len() + 1 - b.len()];
    while rem.len() >= b.len() && !rem.is_empty() {
        let k = rem.len() - b.len();
        let f = Rational::from(&rem[rem.len() - 1] / &b[b.len() - 1]);
        for i in 0..b.len() {
            let t = Rational::from(&b[i] * &f);
            rem[k + i] -= t;
        }
        quo[k] = f;
        trim_poly(&mut rem);
    }
    debug_assert!(rem.is_empty(), "rat_div_exact: division was not exact");
    quo
}

fn horner(coeffs: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Aberth-Ehrlich simultaneous iteration at the given precision, with a
/// stability check under precision doubling.  Retries internally at doubled
/// precision up to three times before reporting non-convergence.
pub fn find_roots(poly: &SPoly, precision_bits: u32) -> Result<RootReport> {
    find_roots_seeded(poly, precision_bits, None)
}

/// As `find_roots`, but optionally warm-started from a previous root set
/// (typically the roots of the degree-one-lower member of the family);
/// missing starters are taken from the Newton-polygon initialization.
pub fn find_roots_seeded(
    poly: &SPoly,
    precision_bits: u32,
    seeds: Option<&[ComplexHP]>,
) -> Result<RootReport> {
    let deg = poly
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::InvalidParam("find_roots needs degree >= 1".into()))?;
    // deflate an exact root at the origin (vanishing trailing coefficients)
    let m0 = poly
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero polynomial");
    if m0 > 0 {
        let cofactor = SPoly::from_coeffs(poly.coeffs()[m0..].to_vec());
        let mut rep = if cofactor.degree().unwrap_or(0) >= 1 {
            find_roots_seeded(&cofactor, precision_bits, seeds)?
        } else {
            RootReport {
                roots: Vec::new(),
                residuals: Vec::new(),
                line_c: rat_i(0),
                on_line: Vec::new(),
                offline_count: 0,
                precision_bits: precision_bits * 2,
            }
        };
        for _ in 0..m0 {
            rep.roots.push(Complex::with_val(rep.precision_bits, 0));
            rep.residuals.push(0.0);
        }
        let mut pairs: Vec<(Complex, f64)> = rep
            .roots
            .drain(..)
            .zip(rep.residuals.drain(..))
            .collect();
        pairs.sort_by(|(a, _), (b, _)| {
            let (ar, ai) = (a.real().to_f64(), a.imag().to_f64());
            let (br, bi) = (b.real().to_f64(), b.imag().to_f64());
            ai.partial_cmp(&bi).unwrap().then(ar.partial_cmp(&br).unwrap())
        });
        let (roots, residuals): (Vec<Complex>, Vec<f64>) = pairs.into_iter().unzip();
        rep.roots = roots;
        rep.residuals = residuals;
        return Ok(rep);
    }
    // split off repeated roots exactly: gcd(poly, poly') carries every
    // multiplicity-m root with multiplicity m-1 and poly/gcd is square-free;
    // the simultaneous iteration stalls on non-simple roots
    let dpoly = poly.derivative();
    let g = rat_gcd(poly.coeffs(), dpoly.coeffs());
    if g.len() >= 2 {
        let sq_poly = SPoly::from_coeffs(rat_div_exact(poly.coeffs(), &g));
        let g_poly = SPoly::from_coeffs(g);
        let mut rep = find_roots_seeded(&sq_poly, precision_bits, seeds)?;
        let rep2 = find_roots_seeded(&g_poly, precision_bits, None)?;
        rep.precision_bits = rep.precision_bits.min(rep2.precision_bits);
        let mut pairs: Vec<(Complex, f64)> = rep
            .roots
            .drain(..)
            .zip(rep.residuals.drain(..))
            .chain(rep2.roots.into_iter().zip(rep2.residuals))
            .collect();
        pairs.sort_by(|(a, _), (b, _)| {
            let (ar, ai) = (a.real().to_f64(), a.imag().to_f64());
            let (br, bi) = (b.real().to_f64(), b.imag().to_f64());
            ai.partial_cmp(&bi).unwrap().then(ar.partial_cmp(&br).unwrap())
        });
        let (roots, residuals): (Vec<Complex>, Vec<f64>) = pairs.into_iter().unzip();
        rep.roots = roots;
        rep.residuals = residuals;
        return Ok(rep);
    }
    // working precision must beat the cancellation in evaluating the
    // polynomial, i.e. the bit spread of the monic coefficients; the final
    // accuracy comes from the polish step, not from this figure
    let lead = poly.leading().expect("degree checked");
    let spread: i64 = poly
        .coeffs()
        .iter()
        .map(|c| {
            let m = Rational::from(c / lead);
            m.numer().significant_bits() as i64 - m.denom().significant_bits() as i64
        })
        .max()
        .unwrap_or(0)
        .max(0);
    let mut prec = 64u32.max(spread as u32 + 48);
    let mut last_err = String::new();
    for attempt in 0..5 {
        // a poor warm start can trap the simultaneous iteration; after two
        // tries fall back to the fresh Newton-polygon initialization
        let try_seeds = if attempt < 2 { seeds } else { None };
        match aberth_once(poly, deg, prec, try_seeds) {
            Ok(roots) => {
                // polish at doubled target precision; accept when no root
                // moves more than TAU_LINE/10 (relative to its magnitude)
                let hi = precision_bits.max(prec) * 2;
                let mut stable = true;
                let mut polished = Vec::with_capacity(deg);
                for r in &roots {
                    let r2 = newton_polish(poly, r, hi);
                    let moved = (&r2 - r).complete((53, 53)).abs().real().to_f64();
                    let scale = 1f64.max(r2.abs_ref().complete((53, 53)).real().to_f64());
                    if moved > TAU_LINE / 10.0 * scale {
                        stable = false;
                    }
                    polished.push(r2);
                }
                if stable {
                    let mut residuals = Vec::with_capacity(deg);
                    let maxc = poly
                        .coeffs()
                        .iter()
                        .map(|c| c.to_f64().abs())
                        .fold(0.0f64, f64::max);
                    let base = 2f64.powi(-(precision_bits as i32) / 2) * maxc;
                    for r in &polished {
                        let e = spoly_eval(poly, r);
                        let resid = e.value.abs().real().to_f64();
                        let mag = 1f64.max(r.abs_ref().complete((53, 53)).real().to_f64());
                        let bound = base * mag.powi(deg as i32);
                        if !(resid <= bound) {
                            last_err = format!("residual {:e} above bound {:e}", resid, bound);
                            stable = false;
                            break;
                        }
                        residuals.push(resid);
                    }
                    if stable {
                        let mut pairs: Vec<(Complex, f64)> =
                            polished.into_iter().zip(residuals).collect();
                        pairs.sort_by(|(a, _), (b, _)| {
                            let (ar, ai) = (a.real().to_f64(), a.imag().to_f64());
                            let (br, bi) = (b.real().to_f64(), b.imag().to_f64());
                            ai.partial_cmp(&bi).unwrap().then(ar.partial_cmp(&br).unwrap())
                        });
                        let (roots, residuals): (Vec<Complex>, Vec<f64>) =
                            pairs.into_iter().unzip();
                        return Ok(RootReport {
                            roots,
                            residuals,
                            line_c: rat_i(0),
                            on_line: Vec::new(),
                            offline_count: 0,
                            precision_bits: hi,
                        });
                    }
                } else {
                    last_err = "root set not stable under precision doubling".into();
                }
            }
            Err(e) => last_err = e.to_string(),
        }
        prec *= 2;
    }
    Err(Error::NonConvergence(format!(
        "find_roots (degree {}): {}",
        deg, last_err
    )))
}

fn newton_polish(poly: &SPoly, root: &Complex, prec: u32) -> Complex {
    let coeffs: Vec<Complex> = poly
        .coeffs()
        .iter()
        .map(|c| Complex::with_val(prec, Float::with_val(prec, c)))
        .collect();
    let dpoly = poly.derivative();
    let dcoeffs: Vec<Complex> = dpoly
        .coeffs()
        .iter()
        .map(|c| Complex::with_val(prec, Float::with_val(prec, c)))
        .collect();
    let mut z = Complex::with_val(prec, root);
    for _ in 0..4 {
        let p = horner(&coeffs, &z, prec);
        let d = horner(&dcoeffs, &z, prec);
        if d.abs_ref().complete((53, 53)).real().to_f64() == 0.0 {
            break;
        }
        z -= p / d;
    }
    z
}

fn aberth_once(
    poly: &SPoly,
    deg: usize,
    prec: u32,
    seeds: Option<&[ComplexHP]>,
) -> Result<Vec<Complex>> {
    let lead = poly.leading().expect("degree checked").clone();
    let monic: Vec<Rat> = poly
        .coeffs()
        .iter()
        .map(|c| Rational::from(c / &lead))
        .collect();
    let coeffs: Vec<Complex> = monic
        .iter()
        .map(|c| Complex::with_val(prec, Float::with_val(prec, c)))
        .collect();
    let dcoeffs: Vec<Complex> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Complex::with_val(prec, Float::with_val(prec, c) * k as f64))
        .collect();

    // initial guesses on circles whose radii come from the upper convex
    // hull of (k, ln |a_k|): one hull edge of horizontal span m supplies m
    // roots of magnitude exp(-slope), which keeps badly scaled
    // coefficient sequences (|a_0| >> |a_n|) well conditioned
    let lnmag: Vec<Option<f64>> = monic
        .iter()
        .map(|c| {
            if c.is_zero() {
                None
            } else {
                let mut v = c.numer().to_f64().abs().ln() - c.denom().to_f64().abs().ln();
                if !v.is_finite() {
                    // fall back to bit sizes when the parts overflow f64
                    v = (c.numer().significant_bits() as f64
                        - c.denom().significant_bits() as f64)
                        * std::f64::consts::LN_2;
                }
                Some(v)
            }
        })
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for k in 0..=deg {
        let Some(y) = lnmag[k] else { continue };
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (y - y1)
                - (k as f64 - x1 as f64) * (y2 - y1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, y));
    }
    let mut z: Vec<Complex> = Vec::with_capacity(deg);
    for seg in hull.windows(2) {
        let (k1, y1) = seg[0];
        let (k2, y2) = seg[1];
        let m = k2 - k1;
        let radius = ((y1 - y2) / m as f64).exp().clamp(1e-150, 1e150);
        for j in 0..m {
            let theta =
                2.0 * std::f64::consts::PI * j as f64 / m as f64 + 0.4 + k1 as f64 / (deg as f64);
            z.push(Complex::with_val(
                prec,
                (radius * theta.cos(), radius * theta.sin()),
            ));
        }
    }
    debug_assert_eq!(z.len(), deg);
    if let Some(sd) = seeds {
        // drop seeds at the origin (those came from a deflated zero root of
        // the previous polynomial) and near-duplicates: coincident starters
        // receive identical Aberth updates and never separate
        let mut kept: Vec<(f64, f64)> = Vec::new();
        for s in sd {
            let re = s.real().to_f64();
            let im = s.imag().to_f64();
            let mag = re.hypot(im);
            if mag < 1e-30 {
                continue;
            }
            if kept
                .iter()
                .any(|&(kr, ki)| (kr - re).hypot(ki - im) < 1e-9 * (1.0 + mag))
            {
                continue;
            }
            kept.push((re, im));
        }
        if !kept.is_empty() && kept.len() <= deg {
            // keep the largest-magnitude fresh starters for the roots the
            // seed set does not cover
            z.sort_by(|a, b| {
                let ma = a.abs_ref().complete((53, 53)).real().to_f64();
                let mb = b.abs_ref().complete((53, 53)).real().to_f64();
                mb.partial_cmp(&ma).unwrap()
            });
            z.truncate(deg - kept.len());
            for &(re, im) in &kept {
                z.push(Complex::with_val(prec, (re, im)));
            }
        }
    }
    // separate any remaining exact collisions among the starters
    for j in 1..deg {
        for i in 0..j {
            if (&z[j] - &z[i]).complete((53, 53)).abs().real().to_f64() == 0.0 {
                let bump = Complex::with_val(prec, (1e-6 * (j as f64 + 1.0), 1e-6));
                z[j] += bump;
            }
        }
    }

    // stop at 3/4 of the working precision: the last bits are recovered by
    // the Newton polish at doubled precision, and demanding them here makes
    // the iteration spin on evaluation rounding noise for larger degrees
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) * 3 / 4));
    let max_iter = 200 + 4 * deg;
    for _ in 0..max_iter {
        let mut done = true;
        for j in 0..deg {
            let pv = horner(&coeffs, &z[j], prec);
            let dv = horner(&dcoeffs, &z[j], prec);
            if dv.abs_ref().complete((53, 53)).real().to_f64() == 0.0 {
                // nudge off a critical point
                z[j] += Complex::with_val(prec, (1e-6, 1e-6));
                done = false;
                continue;
            }
            let w = (&pv / &dv).complete((prec, prec));
            let mut sum = Complex::with_val(prec, 0);
            for k in 0..deg {
                if k != j {
                    let d = (&z[j] - &z[k]).complete((prec, prec));
                    if d.abs_ref().complete((53, 53)).real().to_f64() == 0.0 {
                        continue;
                    }
                    sum += d.recip();
                }
            }
            let denom = Complex::with_val(prec, 1) - (&w * &sum).complete((prec, prec));
            let corr = (&w / &denom).complete((prec, prec));
            let step = corr.abs_ref().complete((prec, prec)).real().clone();
            let scale = Float::with_val(prec, 1)
                + z[j].abs_ref().complete((prec, prec)).real();
            if step > (&eps * &scale).complete(prec) {
                done = false;
            }
            z[j] -= corr;
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence(format!(
        "Aberth iteration cap reached at {} bits",
        prec
    )))
}

fn ceil_rat(x: &Rat) -> i64 {
    x.clone().ceil().to_f64() as i64
}

/// Outcome of checking one h_n against the vertical-line theorem.
#[derive(Clone, Debug)]
pub struct LineOutcome {
    pub report: RootReport,
    pub bound: Option<usize>,
    pub pass: bool,
}

/// Root h_n and classify its zeros against the line Re(s) = c.
/// For p + p* <= 0 the pass condition is zero off-line roots; otherwise
/// off-line roots must number at most 2*ceil(c + p).
pub fn verify_line(params: &ParamSet, n: usize, precision_bits: u32) -> Result<LineOutcome> {
    let h = gen_h(n, params)?;
    let report = find_roots(&h, precision_bits)?;
    classify_line(params, report)
}

/// `verify_line` for every n in 1..=n_max, warm-starting each root search
/// from the previous root set.  Much faster than independent calls.
pub fn verify_line_sweep(
    params: &ParamSet,
    n_max: usize,
    precision_bits: u32,
) -> Result<Vec<LineOutcome>> {
    let hs = crate::sheffer::gen_h_upto(n_max, params)?;
    let mut out = Vec::with_capacity(n_max);
    let mut seeds: Vec<ComplexHP> = Vec::new();
    for h in hs.iter().skip(1) {
        let report = find_roots_seeded(h, precision_bits, Some(&seeds))?;
        seeds = report.roots.clone();
        out.push(classify_line(params, report)?);
    }
    Ok(out)
}

fn classify_line(params: &ParamSet, mut report: RootReport) -> Result<LineOutcome> {
    let c = params.c();
    report.line_c = c.clone();
    let cf = c.to_f64();
    let mut offline = 0usize;
    let mut on_line = Vec::with_capacity(report.roots.len());
    for r in &report.roots {
        let re = r.real().to_f64();
        let scale = 1f64.max(r.abs_ref().complete((53, 53)).real().to_f64());
        let on = (re - cf).abs() <= TAU_LINE * scale;
        if !on {
            offline += 1;
        }
        on_line.push(on);
    }
    report.on_line = on_line;
    report.offline_count = offline;

    let sum = Rational::from(&params.p + &params.pstar);
    let (bound, pass) = if sum <= 0 {
        (Some(0), offline == 0)
    } else {
        let cp = Rational::from(&c + &params.p);
        let b = 2 * ceil_rat(&cp).max(0) as usize;
        (Some(b), offline <= b)
    };
    Ok(LineOutcome {
        report,
        bound,
        pass,
    })
}

/// Real-coefficient polynomial i^n q_n(c + i s).
#[derive(Clone, Debug, PartialEq)]
pub struct HatPoly {
    pub coeffs: Vec<Rat>,
}

impl HatPoly {
    pub fn as_spoly(&self) -> SPoly {
        SPoly::from_coeffs(self.coeffs.clone())
    }
}

/// Construct the hat polynomial exactly.  Fails if any coefficient of
/// i^n q_n(c + i s) has a nonzero imaginary part.
pub fn hat_poly(n: usize, p: &Rat, pstar: &Rat) -> Result<HatPoly> {
    let q = gen_q(n, p, pstar)?;
    hat_of(&q, n, p, pstar)
}

pub fn hat_of(q: &SPoly, n: usize, p: &Rat, pstar: &Rat) -> Result<HatPoly> {
    let c = Rational::from(pstar - p) / rat_i(2);
    // Horner over the Gaussian-rational linear map s -> c + i*s
    let mut re: Vec<Rat> = vec![];
    let mut im: Vec<Rat> = vec![];
    for coeff in q.coeffs().iter().rev() {
        // (re + i im) * (c + i s): real part c*re[k] - im[k-1], imag c*im[k] + re[k-1]
        let len = re.len() + 1;
        let mut nre = vec![rat_i(0); len];
        let mut nim = vec![rat_i(0); len];
        for k in 0..re.len() {
            nre[k] += Rational::from(&re[k] * &c);
            nim[k] += Rational::from(&im[k] * &c);
            nre[k + 1] -= im[k].clone();
            nim[k + 1] += re[k].clone();
        }
        nre[0] += coeff;
        re = nre;
        im = nim;
    }
    // multiply by i^n
    let (fre, fim): (Vec<Rat>, Vec<Rat>) = match n % 4 {
        0 => (re, im),
        1 => (im.iter().map(|x| -x.clone()).collect(), re),
        2 => (
            re.iter().map(|x| -x.clone()).collect(),
            im.iter().map(|x| -x.clone()).collect(),
        ),
        _ => (im, re.iter().map(|x| -x.clone()).collect()),
    };
    if fim.iter().any(|x| !x.is_zero()) {
        return Err(Error::ImaginaryResidue(format!(
            "hat polynomial of q_{} has complex coefficients",
            n
        )));
    }
    Ok(HatPoly { coeffs: fre })
}

/// Sorted real roots of a hat polynomial; errors if any root strays from
/// the real axis beyond tolerance.
pub fn hat_roots(hat: &HatPoly, precision_bits: u32) -> Result<Vec<f64>> {
    let p = hat.as_spoly();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let rep = find_roots(&p, precision_bits)?;
    let mut out = Vec::with_capacity(rep.roots.len());
    for r in &rep.roots {
        let im = r.imag().to_f64();
        let scale = 1f64.max(r.abs_ref().complete((53, 53)).real().to_f64());
        if im.abs() > TAU_LINE * scale {
            return Err(Error::Domain(format!(
                "hat root {} + {}i is not real",
                r.real().to_f64(),
                im
            )));
        }
        out.push(r.real().to_f64());
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Weak interlacing of the hat roots of q_n and q_{n+1}.
pub fn interlace_check(n: usize, p: &Rat, pstar: &Rat, precision_bits: u32) -> Result<bool> {
    if Rational::from(p + pstar) > 0 {
        return Err(Error::Domain(
            "interlacing hypothesis requires p + p* <= 0".into(),
        ));
    }
    let lo = hat_roots(&hat_poly(n, p, pstar)?, precision_bits)?;
    let hi = hat_roots(&hat_poly(n + 1, p, pstar)?, precision_bits)?;
    if hi.len() != lo.len() + 1 {
        return Ok(false);
    }
    let scale = hi
        .iter()
        .map(|x| x.abs())
        .fold(1.0f64, f64::max);
    let tol = 1e-9 * scale;
    for k in 0..lo.len() {
        if !(hi[k] - tol <= lo[k] && lo[k] <= hi[k + 1] + tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Eigenvalues of a symmetric tridiagonal matrix with zero diagonal and
/// off-diagonal entries `offdiag`, by bisection on the Sturm count.
/// This is the fast route to hat-polynomial roots for large n: the monic
/// hat recurrence is p_{k+1} = s p_k - (k(k - p* - p - 1)/4) p_{k-1},
/// a Jacobi matrix with b_k = sqrt(k(k - p* - p - 1))/2.
pub fn tridiag_zero_diag_eigen(offdiag: &[f64]) -> Vec<f64> {
    let n = offdiag.len() + 1;
    let b2: Vec<f64> = offdiag.iter().map(|b| b * b).collect();
    let bound = {
        let mut m = 0.0f64;
        for k in 0..n {
            let left = if k >= 1 { offdiag[k - 1].abs() } else { 0.0 };
            let right = if k < n - 1 { offdiag[k].abs() } else { 0.0 };
            m = m.max(left + right);
        }
        m + 1e-300
    };
    // count of eigenvalues strictly below x
    let count = |x: f64| -> usize {
        let mut cnt = 0usize;
        let mut d = -x;
        if d < 0.0 {
            cnt += 1;
        }
        for k in 0..n - 1 {
            let mut dd = d;
            if dd == 0.0 {
                dd = 1e-300;
            }
            d = -x - b2[k] / dd;
            if d < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let mut out = Vec::with_capacity(n);
    for idx in 0..n {
        let mut lo = -bound;
        let mut hi = bound;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if count(mid) <= idx {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * bound.max(1.0) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Hat roots of q_n via the Jacobi matrix (valid for p + p* <= 0, where the
/// recurrence weights k(k - p* - p - 1) are nonnegative).
pub fn hat_roots_jacobi(n: usize, p: &Rat, pstar: &Rat) -> Result<Vec<f64>> {
    if Rational::from(p + pstar) > 0 {
        return Err(Error::Domain(
            "Jacobi route requires p + p* <= 0".into(),
        ));
    }
    let sum = Rational::from(p + pstar).to_f64();
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let kk = k as f64;
            (kk * (kk - sum - 1.0)).sqrt() / 2.0
        })
        .collect();
    Ok(tridiag_zero_diag_eigen(&offdiag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn simple_quadratics() {
        let p = SPoly::from_coeffs(vec![rat_i(1), rat_i(0), rat_i(1)]);
        let rep = find_roots(&p, 128).unwrap();
        let mut ims: Vec<f64> = rep.roots.iter().map(|r| r.imag().to_f64()).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close(ims[0], -1.0, 1e-30) && close(ims[1], 1.0, 1e-30));

        let p2 = SPoly::from_coeffs(vec![rat_i(0), rat_i(-4), rat_i(4)]);
        let rep2 = find_roots(&p2, 128).unwrap();
        let mut res: Vec<f64> = rep2.roots.iter().map(|r| r.real().to_f64()).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close(res[0], 0.0, 1e-30) && close(res[1], 1.0, 1e-30));

        let lin = SPoly::from_coeffs(vec![rat_i(1), rat_i(-2)]);
        let rep3 = find_roots(&lin, 128).unwrap();
        assert!(close(rep3.roots[0].real().to_f64(), 0.5, 1e-30));
    }

    #[test]
    fn line_verification_examples() {
        let params =
            ParamSet::new(vec![rat_i(1)], vec![], rat_i(-1), rat_i(0)).unwrap();
        let out = verify_line(&params, 10, 256).unwrap();
        assert!(out.pass);
        assert_eq!(out.report.offline_count, 0);
        for r in &out.report.roots {
            assert!(close(r.real().to_f64(), 0.5, 1e-10));
        }

        let params2 = ParamSet::new(vec![rat_i(1)], vec![], rat_i(0), rat_i(1)).unwrap();
        let out2 = verify_line(&params2, 2, 256).unwrap();
        assert!(out2.pass);
        assert_eq!(out2.report.offline_count, 2);
        assert_eq!(out2.bound, Some(2));

        let params3 = ParamSet::new(vec![rat_i(1)], vec![], rat_i(0), rat_i(0)).unwrap();
        let out3 = verify_line(&params3, 1, 128).unwrap();
        assert!(out3.pass);
        assert!(close(out3.report.roots[0].real().to_f64(), 0.0, 1e-20));
    }

    #[test]
    fn functional_symmetry_of_root_multiset() {
        // roots of q_n map to themselves under s -> p* - p - s
        let p = rat_i(-1);
        let pstar = rat_i(0);
        let q = gen_q(7, &p, &pstar).unwrap();
        let rep = find_roots(&q, 256).unwrap();
        let shift = Rational::from(&pstar - &p).to_f64();
        for r in &rep.roots {
            let target = (shift - r.real().to_f64(), -r.imag().to_f64());
            let found = rep.roots.iter().any(|s| {
                close(s.real().to_f64(), target.0, 1e-9)
                    && close(s.imag().to_f64(), target.1, 1e-9)
            });
            assert!(found);
        }
    }

    #[test]
    fn hat_examples() {
        let h1 = hat_poly(1, &rat_i(0), &rat_i(1)).unwrap();
        assert_eq!(h1.coeffs, vec![rat_i(0), rat_i(2)]);
        let h2 = hat_poly(2, &rat_i(0), &rat_i(1)).unwrap();
        assert_eq!(h2.coeffs, vec![rat_i(1), rat_i(0), rat_i(4)]);
        let h0 = hat_poly(0, &rat_i(0), &rat_i(1)).unwrap();
        assert_eq!(h0.coeffs, vec![rat_i(1)]);
    }

    #[test]
    fn hat_not_real_rooted_when_sum_positive() {
        // p + p* = 1 > 0: hat q_2 = 4s^2 + 1 has roots +- i/2
        let h2 = hat_poly(2, &rat_i(0), &rat_i(1)).unwrap();
        assert!(hat_roots(&h2, 128).is_err());
    }

    #[test]
    fn interlace_examples() {
        assert!(interlace_check(0, &rat_i(-1), &rat_i(0), 192).unwrap());
        assert!(interlace_check(1, &rat_i(-1), &rat_i(0), 192).unwrap());
        assert!(interlace_check(9, &rat_i(-1), &rat_i(0), 256).unwrap());
        assert!(interlace_check(1, &rat(-1, 2), &rat(1, 4), 192).unwrap());
        assert!(interlace_check(1, &rat_i(0), &rat_i(1), 192).is_err());
    }

    #[test]
    fn jacobi_route_matches_aberth() {
        let p = rat_i(-1);
        let pstar = rat_i(0);
        let fast = hat_roots_jacobi(6, &p, &pstar).unwrap();
        let slow = hat_roots(&hat_poly(6, &p, &pstar).unwrap(), 256).unwrap();
        assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.iter().zip(&slow) {
            assert!(close(*a, *b, 1e-9), "{} vs {}", a, b);
        }
    }

    #[test]
    fn tridiag_eigen_known_matrix() {
        // [[0,1/2],[1/2,0]] has eigenvalues +-1/2
        let ev = tridiag_zero_diag_eigen(&[0.5]);
        assert!(close(ev[0], -0.5, 1e-12) && close(ev[1], 0.5, 1e-12));
    }
}
