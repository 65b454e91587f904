//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single pass/fail line (visible with --nocapture) and asserts it.

use rayon::prelude::*;
use sheffer_zeros::asymptotics::{
    appendix_audit, asymp_formula, density_integral, empirical_density, h_ratio, ln_factorial,
    p_n_contour, parity_check, trace_curve, AsympMode, FloatParams,
};
use sheffer_zeros::roots::{hat_roots_jacobi, interlace_check, verify_line_sweep};
use sheffer_zeros::series::{rat, rat_i, SPoly};
use sheffer_zeros::sheffer::{gen_q, gen_q_upto, ParamSet};
use sheffer_zeros::special::{verify_mellin_family, verify_zeta_identity, MellinAux, MellinMode};

fn report(id: u32, name: &str, pass: bool) {
    println!(
        "acceptance {:02} {}: {}",
        id,
        name,
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {:02} ({}) failed", id, name);
}

fn params(alpha: &[(i64, i64)], pexp: &[(i64, i64)], p: (i64, i64), pstar: (i64, i64)) -> ParamSet {
    ParamSet::new(
        alpha.iter().map(|&(a, b)| rat(a, b)).collect(),
        pexp.iter().map(|&(a, b)| rat(a, b)).collect(),
        rat(p.0, p.1),
        rat(pstar.0, pstar.1),
    )
    .unwrap()
}

#[test]
fn criterion_01_q_table_reproduction() {
    let qs = gen_q_upto(4, &rat_i(0), &rat_i(1)).unwrap();
    let expect: [&[i64]; 5] = [
        &[1],
        &[1, -2],
        &[0, -4, 4],
        &[0, -4, 12, -8],
        &[0, -16, 32, -32, 16],
    ];
    let pass = qs.len() == 5
        && qs.iter().zip(expect.iter()).all(|(q, e)| {
            *q == SPoly::from_coeffs(e.iter().map(|&c| rat_i(c)).collect())
        });
    report(1, "q-table p=0 p*=1 matches the published table", pass);
}

#[test]
fn criterion_02_example_polynomials() {
    let q9 = gen_q(9, &rat_i(-1), &rat_i(0)).unwrap();
    let q10 = gen_q(10, &rat_i(-1), &rat_i(0)).unwrap();
    let e9: Vec<i64> = vec![
        362880, -1297152, 1884672, -1838080, 919296, -462336, 96768, -30720, 2304, -512,
    ];
    let e10: Vec<i64> = vec![
        3628800, -12971520, 21441024, -18380800, 12869120, -4623360, 1892352, -307200, 84480,
        -5120, 1024,
    ];
    let pass = q9 == SPoly::from_coeffs(e9.into_iter().map(rat_i).collect())
        && q10 == SPoly::from_coeffs(e10.into_iter().map(rat_i).collect());
    report(2, "q9/q10 example coefficients bit-exact", pass);
}

#[test]
fn criterion_03_zero_line_sweep() {
    let one = [(1, 1)];
    let on_line: Vec<ParamSet> = vec![
        params(&one, &[], (-1, 1), (0, 1)),
        params(&one, &[], (0, 1), (0, 1)),
        params(&one, &[], (-1, 2), (1, 2)),
        params(&one, &[], (-2, 1), (1, 1)),
        params(&one, &[], (-3, 2), (-1, 2)),
        params(&one, &[], (1, 1), (-1, 1)),
        params(&one, &[], (-1, 1), (1, 1)),
        params(&one, &[], (-5, 2), (3, 2)),
        params(&one, &[], (0, 1), (-2, 1)),
        params(&one, &[], (-1, 3), (1, 3)),
        params(&[(1, 1), (1, 2)], &[(1, 1)], (-1, 1), (0, 1)),
        params(&[(1, 1), (1, 2)], &[(-1, 1)], (-1, 1), (0, 1)),
        params(&[(1, 1), (1, 4)], &[(2, 1)], (-1, 1), (0, 1)),
        params(&[(1, 1), (1, 2), (1, 3)], &[(1, 1), (1, 1)], (-2, 1), (0, 1)),
        params(&[(1, 1), (2, 5)], &[(1, 2)], (-1, 2), (-1, 2)),
        params(&[(1, 1), (1, 2)], &[(3, 1)], (-3, 1), (0, 1)),
        params(&[(1, 1), (1, 4)], &[(1, 1)], (-3, 1), (2, 1)),
        params(&[(1, 1), (1, 3)], &[(2, 1)], (0, 1), (-1, 1)),
        params(&[(2, 1), (1, 1)], &[(1, 1)], (-1, 1), (0, 1)),
        params(&[(1, 1), (1, 2)], &[(1, 1)], (-5, 4), (1, 4)),
    ];
    let off_line: Vec<ParamSet> = vec![
        params(&one, &[], (1, 1), (0, 1)),
        params(&one, &[], (1, 2), (1, 2)),
        params(&one, &[], (2, 1), (-1, 1)),
        params(&one, &[], (0, 1), (1, 1)),
        params(&one, &[], (1, 1), (1, 1)),
        params(&one, &[], (3, 2), (-1, 2)),
        params(&one, &[], (1, 4), (1, 4)),
        params(&[(1, 1), (1, 2)], &[(1, 1)], (1, 1), (0, 1)),
        params(&[(1, 1), (1, 3)], &[(1, 1)], (0, 1), (1, 1)),
        params(&[(1, 1), (1, 4)], &[(2, 1)], (1, 2), (1, 2)),
    ];
    let all: Vec<&ParamSet> = on_line.iter().chain(off_line.iter()).collect();
    let fails: usize = all
        .par_iter()
        .map(|ps| {
            verify_line_sweep(ps, 60, 256)
                .unwrap()
                .iter()
                .filter(|o| !o.pass)
                .count()
        })
        .sum();
    report(3, "zero-line theorem sweep (30 instances, n <= 60)", fails == 0);
}

#[test]
fn criterion_04_interlacing() {
    let p = rat_i(-1);
    let pstar = rat_i(0);
    let all: bool = (2..=50)
        .into_par_iter()
        .map(|n| interlace_check(n, &p, &pstar, 192).unwrap())
        .reduce(|| true, |a, b| a && b);
    // figure configuration: ten real hat-roots separating nine
    let r9 = hat_roots_jacobi(9, &p, &pstar).unwrap();
    let r10 = hat_roots_jacobi(10, &p, &pstar).unwrap();
    let mut sep = r9.len() == 9 && r10.len() == 10;
    if sep {
        let mut a: Vec<f64> = r9.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut b: Vec<f64> = r10.clone();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for k in 0..9 {
            sep &= b[k] < a[k] && a[k] < b[k + 1];
        }
    }
    report(4, "interlacing p=-1 p*=0 up to n=50", all && sep);
}

#[test]
fn criterion_05_mellin_identity() {
    let aux = MellinAux::Endpoints {
        p: rat_i(0),
        pstar: rat_i(1),
    };
    let grid = [1.5, 2.0, 2.5, 3.0];
    let pass = (0..=8usize)
        .into_par_iter()
        .map(|n| {
            let a = verify_mellin_family(MellinMode::Phi, n, &aux, &grid, 1e-10).unwrap();
            let b = verify_mellin_family(MellinMode::PhiX2, n, &aux, &grid, 1e-10).unwrap();
            a.iter().chain(b.iter()).all(|pt| pt.rel_err < 1e-8)
        })
        .reduce(|| true, |x, y| x && y);
    report(5, "Mellin identity and x^2 consistency, n <= 8", pass);
}

#[test]
fn criterion_06_zeta_identity() {
    let p = rat_i(0);
    let pstar = rat_i(1);
    let grid = [4.0, 5.0, 6.0, 8.0];
    let mut pass = true;
    let mut base_rhs = 0.0;
    for j in 0..=4usize {
        let pts = verify_zeta_identity(j, &p, &pstar, &grid, 1e-6).unwrap();
        for pt in &pts {
            pass &= pt.rel_err < 1e-5;
            if j == 0 && pt.s == 4.0 {
                base_rhs = pt.rhs.re;
            }
        }
    }
    let closed = std::f64::consts::PI.powi(2) / 90.0;
    pass &= (base_rhs - closed).abs() < 1e-12 * closed;
    report(6, "zeta identity j <= 4 with pi^2/90 anchor", pass);
}

#[test]
fn criterion_07_asymptotics() {
    let ps = params(&[(1, 1)], &[], (-1, 1), (0, 1));
    let devs: Vec<f64> = [100usize, 200, 400, 800]
        .par_iter()
        .map(|&n| {
            let pn = p_n_contour(n, 0.5, &ps).unwrap();
            let asy = asymp_formula(n, 0.5, &ps, AsympMode::Global).unwrap();
            let ratio = pn.value.div(asy).to_c64();
            (ratio - num_complex::Complex64::new(1.0, 0.0)).norm()
        })
        .collect();
    let mut pass = devs.windows(2).all(|w| w[1] < w[0]) && devs[3] < 0.05;
    // small-t regime at nt = 1: the formula approximates the parity
    // projection of the contour integral, i.e. pi h_n / n! against the
    // imaginary part (n even) of the asymptotic value
    let n = 10_000usize;
    let t = 1.0 / n as f64;
    let fp = FloatParams::new(&ps);
    let s0 = num_complex::Complex64::new(fp.c, -(n as f64) * t);
    let lhs = h_ratio(n, s0, &ps).unwrap();
    let asy = asymp_formula(n, t, &ps, AsympMode::SmallT)
        .unwrap()
        .scale_ln(-ln_factorial(n));
    let ratio = (lhs.m.re / asy.m.im) * (lhs.e - asy.e).exp();
    pass &= (ratio - 1.0).abs() < 0.1;
    report(7, "global ratio convergence and small-t regime", pass);
}

#[test]
fn criterion_08_parity_rule() {
    let ps = params(&[(1, 1)], &[], (-1, 1), (0, 1));
    let mut pass = true;
    for n in 2..=9usize {
        for &t in &[0.2, 0.5, 0.8] {
            let rep = parity_check(n, t, &ps).unwrap();
            pass &= rep.rel_err < 1e-6 && rep.even_branch == (n % 2 == 0);
        }
    }
    report(8, "parity rule, branch set by n mod 2", pass);
}

#[test]
fn criterion_09_limiting_density() {
    let ps = params(&[(1, 1)], &[], (-1, 1), (0, 1));
    let integral = density_integral();
    let d100 = empirical_density(100, &ps, 25).unwrap();
    let d500 = empirical_density(500, &ps, 25).unwrap();
    let pass = (integral - 0.5).abs() < 1e-9
        && d500.ks_distance < 0.05
        && d500.ks_distance < d100.ks_distance;
    report(9, "density integrates to 1/2 and KS shrinks with n", pass);
}

#[test]
fn criterion_10_appendix_constants() {
    let rep = appendix_audit().unwrap();
    let mut pass = (rep.t_min_re_surface - 0.924256).abs() < 1e-4
        && (rep.t_max_im_surface - 0.707107).abs() < 1e-4
        && rep.g_counterexamples.is_empty()
        && rep.g_points_checked > 10_000;
    for k in 1..=9usize {
        let t = 0.1 * k as f64;
        let curve = trace_curve(t, 2.0, 60.0, 1e-3, 1e-12).unwrap();
        pass &= curve.im_dz_violations() == 0;
    }
    report(10, "extremal constants, g < 0 grid, Im z'(y) > 0", pass);
}
