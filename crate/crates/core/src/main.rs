//! Command-line front end: parameter ingestion, batch verification
//! drivers, CSV/JSON emission, and static SVG plots.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sheffer_zeros::asymptotics::{
    appendix_audit, asymp_formula, delta_arg_track, density_d, empirical_density, p_n_contour,
    parity_check, phi0_monotone_check, z_star_check, AsympMode, ExpComplex,
};
use sheffer_zeros::roots::{verify_line, verify_line_sweep};
use sheffer_zeros::series::{Rat, SPoly};
use sheffer_zeros::sheffer::{
    functional_eq_check, gen_h_upto, gen_q_upto, shift_recurrence_check, ParamSet,
};
use sheffer_zeros::special::{
    verify_mellin_family, verify_zeta_identity, MellinAux, MellinMode,
};
use sheffer_zeros::Error;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "sheffer-zeros",
    version,
    about = "Constructs the Sheffer families h_n, locates their zeros, and verifies the paper-level claims numerically"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate h_n coefficient tables.
    Gen(Common),
    /// Generate the q_n table (defaults to the p=0, p*=1 instance).
    QTable(Common),
    /// High-precision roots of h_n with line classification.
    Roots(Common),
    /// Verify the vertical-line zero locus and the exact recurrences.
    Verify(Common),
    /// Verify interlacing of consecutive hat-polynomial root sets.
    Interlace(Common),
    /// Verify a Mellin-transform identity on an s-grid.
    Mellin(Common),
    /// Verify the zeta factorization identity on an s-grid.
    ZetaId(Common),
    /// Saddle-point diagnostics: contour p_n vs the asymptotic formulas.
    Asymp(Common),
    /// Empirical zero density against the limit law D.
    Density(Common),
    /// Track the argument change of p_n along the saddle envelope.
    ArgTrack(Common),
    /// Audit the negative-y sign analysis and its extremal constants.
    AppendixAudit(Common),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Gen(_) => "gen",
            Cmd::QTable(_) => "q-table",
            Cmd::Roots(_) => "roots",
            Cmd::Verify(_) => "verify",
            Cmd::Interlace(_) => "interlace",
            Cmd::Mellin(_) => "mellin",
            Cmd::ZetaId(_) => "zeta-id",
            Cmd::Asymp(_) => "asymp",
            Cmd::Density(_) => "density",
            Cmd::ArgTrack(_) => "arg-track",
            Cmd::AppendixAudit(_) => "appendix-audit",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Cmd::Gen(c)
            | Cmd::QTable(c)
            | Cmd::Roots(c)
            | Cmd::Verify(c)
            | Cmd::Interlace(c)
            | Cmd::Mellin(c)
            | Cmd::ZetaId(c)
            | Cmd::Asymp(c)
            | Cmd::Density(c)
            | Cmd::ArgTrack(c)
            | Cmd::AppendixAudit(c) => c,
        }
    }
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Endpoint exponent p, an integer or rational "a/b".
    #[arg(long)]
    p: Option<String>,
    /// Endpoint exponent p*, an integer or rational "a/b".
    #[arg(long)]
    pstar: Option<String>,
    /// Comma-separated alpha_0,...,alpha_N (rationals).
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated exponents p_1,...,p_N (rationals).
    #[arg(long)]
    pexp: Option<String>,
    /// Single polynomial order n.
    #[arg(long)]
    n: Option<usize>,
    /// Largest order for batch commands.
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-steps")]
    t_steps: Option<usize>,
    /// Comma-separated real s values.
    #[arg(long = "s-grid")]
    s_grid: Option<String>,
    #[arg(long = "prec-bits")]
    prec_bits: Option<u32>,
    /// Pass/fail tolerance (meaning depends on the command).
    #[arg(long)]
    tol: Option<f64>,
    /// Output path prefix; writes <out>.csv / <out>.json / <out>.svg.
    #[arg(long)]
    out: Option<String>,
    /// csv, json, or both (default both).
    #[arg(long)]
    format: Option<String>,
    /// Also write an SVG plot where the command supports one.
    #[arg(long)]
    svg: bool,
    /// key=value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mellin identity to check: bump, meixner, phi, or phix2.
    #[arg(long)]
    mode: Option<String>,
    /// Meixner parameter b for --mode meixner (default -p).
    #[arg(long)]
    mb: Option<String>,
    /// Meixner parameter c for --mode meixner (default -1).
    #[arg(long)]
    mc: Option<String>,
}

/// Fully resolved run configuration: config-file values overridden by
/// explicit flags, everything stored as strings for the report echo.
struct Resolved {
    map: BTreeMap<String, String>,
}

impl Resolved {
    fn build(common: &Common) -> Result<Resolved, Error> {
        let mut map = BTreeMap::new();
        if let Some(path) = &common.config {
            let text = std::fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(Error::InvalidParam(format!(
                        "config line {} is not key=value: {:?}",
                        lineno + 1,
                        line
                    )));
                };
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        set("p", common.p.clone());
        set("pstar", common.pstar.clone());
        set("alpha", common.alpha.clone());
        set("pexp", common.pexp.clone());
        set("n", common.n.map(|v| v.to_string()));
        set("n-max", common.n_max.map(|v| v.to_string()));
        set("t-min", common.t_min.map(|v| v.to_string()));
        set("t-max", common.t_max.map(|v| v.to_string()));
        set("t-steps", common.t_steps.map(|v| v.to_string()));
        set("s-grid", common.s_grid.clone());
        set("prec-bits", common.prec_bits.map(|v| v.to_string()));
        set("tol", common.tol.map(|v| v.to_string()));
        set("out", common.out.clone());
        set("format", common.format.clone());
        set("mode", common.mode.clone());
        set("mb", common.mb.clone());
        set("mc", common.mc.clone());
        if common.svg {
            map.insert("svg".to_string(), "true".to_string());
        }
        Ok(Resolved { map })
    }

    fn str(&self, k: &str, default: &str) -> String {
        self.map.get(k).cloned().unwrap_or_else(|| default.to_string())
    }

    fn rat(&self, k: &str, default: &str) -> Result<Rat, Error> {
        parse_rat(&self.str(k, default))
    }

    fn usize(&self, k: &str, default: usize) -> Result<usize, Error> {
        match self.map.get(k) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParam(format!("{} = {:?} is not an integer", k, v))),
        }
    }

    fn f64(&self, k: &str, default: f64) -> Result<f64, Error> {
        match self.map.get(k) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParam(format!("{} = {:?} is not a number", k, v))),
        }
    }

    fn u32(&self, k: &str, default: u32) -> Result<u32, Error> {
        match self.map.get(k) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParam(format!("{} = {:?} is not an integer", k, v))),
        }
    }

    fn params(&self, default_p: &str, default_pstar: &str) -> Result<ParamSet, Error> {
        let p = self.rat("p", default_p)?;
        let pstar = self.rat("pstar", default_pstar)?;
        let alpha = parse_rat_list(&self.str("alpha", "1"))?;
        let pexp = match self.map.get("pexp") {
            Some(v) if !v.trim().is_empty() => parse_rat_list(v)?,
            _ => vec![],
        };
        ParamSet::new(alpha, pexp, p, pstar)
    }

    fn s_grid(&self, default: &str) -> Result<Vec<f64>, Error> {
        self.str("s-grid", default)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParam(format!("bad s-grid entry {:?}", s)))
            })
            .collect()
    }
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    Rat::from_str(s.trim()).map_err(|_| Error::InvalidParam(format!("bad rational {:?}", s)))
}

fn parse_rat_list(s: &str) -> Result<Vec<Rat>, Error> {
    s.split(',').map(parse_rat).collect()
}

/// 17 significant digits, deterministic.
fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

#[derive(Serialize)]
struct RunReport {
    version: &'static str,
    command: String,
    config: BTreeMap<String, String>,
    items: Vec<Value>,
    passed: usize,
    failed: usize,
    wall_ms: u128,
}

struct Output {
    items: Vec<Value>,
    csv: String,
    svg: Option<String>,
}

fn write_atomic(path: &str, data: &str) -> Result<(), Error> {
    let tmp = format!("{}.tmp", path);
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn item_passed(v: &Value) -> bool {
    v.get("pass").and_then(Value::as_bool).unwrap_or(true)
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let common = cli.cmd.common().clone();
    let resolved = match Resolved::build(&common) {
        Ok(r) => r,
        Err(e) => fail(&e),
    };
    let out = match run(&cli.cmd, &resolved) {
        Ok(o) => o,
        Err(e) => fail(&e),
    };
    let passed = out.items.iter().filter(|v| item_passed(v)).count();
    let failed = out.items.len() - passed;
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        command: cli.cmd.name().to_string(),
        config: resolved.map.clone(),
        items: out.items,
        passed,
        failed,
        wall_ms: start.elapsed().as_millis(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let format = resolved.str("format", "both");
    if !matches!(format.as_str(), "csv" | "json" | "both") {
        fail(&Error::InvalidParam(format!(
            "format must be csv, json, or both, got {:?}",
            format
        )));
    }
    if let Some(prefix) = resolved.map.get("out") {
        let mut res = Ok(());
        let mut written = Vec::new();
        if format == "json" || format == "both" {
            res = res.and_then(|_| write_atomic(&format!("{}.json", prefix), &json));
            written.push("json");
        }
        if format == "csv" || format == "both" {
            res = res.and_then(|_| write_atomic(&format!("{}.csv", prefix), &out.csv));
            written.push("csv");
        }
        if let Some(svg) = &out.svg {
            res = res.and_then(|_| write_atomic(&format!("{}.svg", prefix), svg));
            written.push("svg");
        }
        if let Err(e) = res {
            fail(&e);
        }
        println!(
            "{}: {} items, {} passed, {} failed -> {}.{{{}}}",
            cli.cmd.name(),
            passed + failed,
            passed,
            failed,
            prefix,
            written.join(",")
        );
    } else {
        print!("{}", json);
    }
    std::process::exit(if failed > 0 { 1 } else { 0 });
}

fn fail(e: &Error) -> ! {
    eprintln!("error: {}", e);
    let code = match e {
        Error::InvalidParam(_) | Error::Domain(_) => 2,
        Error::NonConvergence(_) => 3,
        _ => 3,
    };
    std::process::exit(code);
}

fn run(cmd: &Cmd, r: &Resolved) -> Result<Output, Error> {
    match cmd {
        Cmd::Gen(_) => cmd_gen(r),
        Cmd::QTable(_) => cmd_q_table(r),
        Cmd::Roots(_) => cmd_roots(r),
        Cmd::Verify(_) => cmd_verify(r),
        Cmd::Interlace(_) => cmd_interlace(r),
        Cmd::Mellin(_) => cmd_mellin(r),
        Cmd::ZetaId(_) => cmd_zeta_id(r),
        Cmd::Asymp(_) => cmd_asymp(r),
        Cmd::Density(_) => cmd_density(r),
        Cmd::ArgTrack(_) => cmd_arg_track(r),
        Cmd::AppendixAudit(_) => cmd_appendix_audit(r),
    }
}

fn poly_rows(csv: &mut String, items: &mut Vec<Value>, n: usize, poly: &SPoly) {
    let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
    for (k, c) in coeffs.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", n, k, c));
    }
    items.push(json!({ "n": n, "coeffs": coeffs }));
}

fn cmd_gen(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("0", "1")?;
    let n_max = r.usize("n-max", r.usize("n", 8)?)?;
    let hs = gen_h_upto(n_max, &params)?;
    let mut csv = String::from("n,k,coeff\n");
    let mut items = Vec::new();
    for (n, h) in hs.iter().enumerate() {
        poly_rows(&mut csv, &mut items, n, h);
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_q_table(r: &Resolved) -> Result<Output, Error> {
    let p = r.rat("p", "0")?;
    let pstar = r.rat("pstar", "1")?;
    let n_max = r.usize("n-max", r.usize("n", 4)?)?;
    let qs = gen_q_upto(n_max, &p, &pstar)?;
    let mut csv = String::from("n,k,coeff\n");
    let mut items = Vec::new();
    for (n, q) in qs.iter().enumerate() {
        poly_rows(&mut csv, &mut items, n, q);
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_roots(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("-1", "0")?;
    let n = r.usize("n", 16)?;
    let prec = r.u32("prec-bits", 256)?;
    let outcome = verify_line(&params, n, prec)?;
    let rep = &outcome.report;
    let mut csv = String::from("re,im,residual,on_line\n");
    let mut roots_json = Vec::new();
    for (i, root) in rep.roots.iter().enumerate() {
        let (re, im) = (root.real().to_f64(), root.imag().to_f64());
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt(re),
            fmt(im),
            fmt(rep.residuals[i]),
            rep.on_line[i]
        ));
        roots_json.push(json!({
            "re": fmt(re),
            "im": fmt(im),
            "residual": fmt(rep.residuals[i]),
            "on_line": rep.on_line[i],
        }));
    }
    let svg = if r.map.contains_key("svg") {
        let pts: Vec<(f64, f64)> = rep
            .roots
            .iter()
            .map(|z| (z.real().to_f64(), z.imag().to_f64()))
            .collect();
        Some(svg_scatter(&pts, Some(rep.line_c.to_f64())))
    } else {
        None
    };
    let items = vec![json!({
        "n": n,
        "line_c": fmt(rep.line_c.to_f64()),
        "offline_count": rep.offline_count,
        "offline_bound": outcome.bound,
        "precision_bits": rep.precision_bits,
        "roots": roots_json,
        "pass": outcome.pass,
    })];
    Ok(Output { items, csv, svg })
}

fn cmd_verify(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("-1", "0")?;
    let n_max = r.usize("n-max", r.usize("n", 20)?)?;
    let prec = r.u32("prec-bits", 256)?;
    let outcomes = verify_line_sweep(&params, n_max, prec)?;
    let rows: Vec<Result<Value, Error>> = outcomes
        .iter()
        .enumerate()
        .map(|(i, outcome)| {
            let n = i + 1;
            let shift = shift_recurrence_check(n, &params.p, &params.pstar)?;
            let feq = functional_eq_check(n, &params.p, &params.pstar)?;
            Ok(json!({
                "n": n,
                "offline_count": outcome.report.offline_count,
                "offline_bound": outcome.bound,
                "line_pass": outcome.pass,
                "shift_recurrence": shift,
                "functional_equation": feq,
                "pass": outcome.pass && shift && feq,
            }))
        })
        .collect();
    let mut items = Vec::new();
    let mut csv = String::from("n,offline_count,offline_bound,line_pass,shift_recurrence,functional_equation,pass\n");
    for row in rows {
        let v = row?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v["n"], v["offline_count"], v["offline_bound"], v["line_pass"], v["shift_recurrence"], v["functional_equation"], v["pass"]
        ));
        items.push(v);
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_interlace(r: &Resolved) -> Result<Output, Error> {
    let p = r.rat("p", "-1")?;
    let pstar = r.rat("pstar", "0")?;
    let n_max = r.usize("n-max", r.usize("n", 50)?)?;
    let prec = r.u32("prec-bits", 192)?;
    let ns: Vec<usize> = (2..=n_max).collect();
    let rows: Vec<Result<Value, Error>> = ns
        .par_iter()
        .map(|&n| {
            let ok = sheffer_zeros::roots::interlace_check(n, &p, &pstar, prec)?;
            Ok(json!({ "n": n, "pass": ok }))
        })
        .collect();
    let mut items = Vec::new();
    let mut csv = String::from("n,pass\n");
    for row in rows {
        let v = row?;
        csv.push_str(&format!("{},{}\n", v["n"], v["pass"]));
        items.push(v);
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_mellin(r: &Resolved) -> Result<Output, Error> {
    let p = r.rat("p", "0")?;
    let pstar = r.rat("pstar", "1")?;
    let mode_s = r.str("mode", "phi");
    let mode = match mode_s.as_str() {
        "bump" => MellinMode::Bump,
        "meixner" => MellinMode::Meixner,
        "phi" => MellinMode::Phi,
        "phix2" => MellinMode::PhiX2,
        other => {
            return Err(Error::InvalidParam(format!(
                "unknown mellin mode {:?} (bump|meixner|phi|phix2)",
                other
            )))
        }
    };
    let aux = match mode {
        MellinMode::Bump => {
            let alpha = parse_rat_list(&r.str("alpha", "1"))?;
            MellinAux::Bump {
                alpha: alpha[0].clone(),
            }
        }
        MellinMode::Meixner => MellinAux::Meixner {
            b: r.rat("mb", &(-p.clone()).to_string())?,
            cpar: r.rat("mc", "-1")?,
        },
        _ => MellinAux::Endpoints {
            p: p.clone(),
            pstar: pstar.clone(),
        },
    };
    let n_max = r.usize("n-max", r.usize("n", 4)?)?;
    let s_grid = r.s_grid("1.5,2,2.5,3")?;
    let pass_tol = r.f64("tol", 1e-8)?;
    let mut items = Vec::new();
    let mut csv = String::from("mode,n,s,lhs_re,lhs_im,rhs_re,rhs_im,rel_err,evaluations,pass\n");
    for n in 0..=n_max {
        let pts = verify_mellin_family(mode, n, &aux, &s_grid, pass_tol * 1e-2)?;
        for pt in pts {
            let pass = pt.rel_err < pass_tol;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                mode_s,
                n,
                fmt(pt.s),
                fmt(pt.lhs.re),
                fmt(pt.lhs.im),
                fmt(pt.rhs.re),
                fmt(pt.rhs.im),
                fmt(pt.rel_err),
                pt.evaluations,
                pass
            ));
            items.push(json!({
                "mode": mode_s, "n": n, "s": pt.s,
                "lhs": [fmt(pt.lhs.re), fmt(pt.lhs.im)],
                "rhs": [fmt(pt.rhs.re), fmt(pt.rhs.im)],
                "rel_err": fmt(pt.rel_err),
                "evaluations": pt.evaluations,
                "pass": pass,
            }));
        }
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_zeta_id(r: &Resolved) -> Result<Output, Error> {
    let p = r.rat("p", "0")?;
    let pstar = r.rat("pstar", "1")?;
    let j_max = r.usize("n-max", r.usize("n", 4)?)?;
    let s_grid = r.s_grid("4,5,6,8")?;
    let pass_tol = r.f64("tol", 1e-5)?;
    let js: Vec<usize> = (0..=j_max).collect();
    let rows: Vec<Result<Vec<Value>, Error>> = js
        .par_iter()
        .map(|&j| {
            let pts = verify_zeta_identity(j, &p, &pstar, &s_grid, pass_tol * 0.1)?;
            Ok(pts
                .into_iter()
                .map(|pt| {
                    json!({
                        "j": j, "s": pt.s,
                        "lhs": fmt(pt.lhs.re), "rhs": fmt(pt.rhs.re),
                        "rel_err": fmt(pt.rel_err),
                        "evaluations": pt.evaluations,
                        "pass": pt.rel_err < pass_tol,
                    })
                })
                .collect())
        })
        .collect();
    let mut items = Vec::new();
    let mut csv = String::from("j,s,lhs,rhs,rel_err,evaluations,pass\n");
    for row in rows {
        for v in row? {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                v["j"], v["s"], v["lhs"].as_str().unwrap(), v["rhs"].as_str().unwrap(),
                v["rel_err"].as_str().unwrap(), v["evaluations"], v["pass"]
            ));
            items.push(v);
        }
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_asymp(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("-1", "0")?;
    let t = r.f64("t-min", 0.5)?;
    let tol = r.f64("tol", 1e-6)?;
    let ns: Vec<usize> = match r.map.get("n") {
        Some(_) => vec![r.usize("n", 100)?],
        None => vec![100, 200, 400],
    };
    let rows: Vec<Result<Value, Error>> = ns
        .par_iter()
        .map(|&n| {
            let pn = p_n_contour(n, t, &params)?;
            let asy = asymp_formula(n, t, &params, AsympMode::Global)?;
            let ratio = pn.value.div(asy).to_c64();
            let parity = if n <= 32 {
                Some(parity_check(n, t, &params)?)
            } else {
                None
            };
            let pass = parity.as_ref().map(|p| p.rel_err < tol).unwrap_or(true);
            Ok(json!({
                "n": n,
                "t": t,
                "ratio_re": fmt(ratio.re),
                "ratio_im": fmt(ratio.im),
                "abs_ratio_minus_one": fmt((ratio - num_complex::Complex64::new(1.0, 0.0)).norm()),
                "contour_rel_err_est": fmt(pn.rel_err_est),
                "parity_rel_err": parity.as_ref().map(|p| fmt(p.rel_err)),
                "parity_branch_even": parity.as_ref().map(|p| p.even_branch),
                "pass": pass,
            }))
        })
        .collect();
    let mut items = Vec::new();
    let mut csv = String::from("n,t,ratio_re,ratio_im,abs_ratio_minus_one,parity_rel_err,pass\n");
    for row in rows {
        let v = row?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v["n"],
            v["t"],
            v["ratio_re"].as_str().unwrap(),
            v["ratio_im"].as_str().unwrap(),
            v["abs_ratio_minus_one"].as_str().unwrap(),
            v["parity_rel_err"].as_str().unwrap_or(""),
            v["pass"]
        ));
        items.push(v);
    }
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_density(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("-1", "0")?;
    let n = r.usize("n", 500)?;
    let bins = r.usize("t-steps", 25)?;
    let tol = r.f64("tol", 0.05)?;
    let rep = empirical_density(n, &params, bins)?;
    let pass = rep.ks_distance < tol;
    let mut csv = String::from("bin_center,empirical,model\n");
    for i in 0..bins {
        let center = (i as f64 + 0.5) * rep.bin_width;
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt(center),
            fmt(rep.bins[i]),
            fmt(rep.model[i])
        ));
    }
    let svg = if r.map.contains_key("svg") {
        Some(svg_density(&rep.bins, &rep.model, rep.bin_width))
    } else {
        None
    };
    let items = vec![json!({
        "n": n,
        "bins": bins,
        "ks_distance": fmt(rep.ks_distance),
        "empirical": rep.bins.iter().map(|x| fmt(*x)).collect::<Vec<_>>(),
        "model": rep.model.iter().map(|x| fmt(*x)).collect::<Vec<_>>(),
        "pass": pass,
    })];
    Ok(Output { items, csv, svg })
}

fn cmd_arg_track(r: &Resolved) -> Result<Output, Error> {
    let params = r.params("-1", "0")?;
    let n = r.usize("n", 100)?;
    let tau = r.f64("t-min", 0.05)?;
    let t_end = r.f64("t-max", 0.9995)?;
    let steps = r.usize("t-steps", 20_000)?;
    let rep = delta_arg_track(n, &params, tau, t_end, steps)?;
    let csv = format!(
        "n,tau,t_end,delta_arg,predicted,residual,tolerance,zeros_est,zeros_model,zeros_actual,pass\n{},{},{},{},{},{},{},{},{},{},{}\n",
        rep.n,
        fmt(rep.tau),
        fmt(rep.t_end),
        fmt(rep.delta_arg),
        fmt(rep.predicted),
        fmt(rep.residual),
        fmt(rep.tolerance),
        fmt(rep.zeros_est),
        fmt(rep.zeros_model),
        rep.zeros_actual.map(|z| z.to_string()).unwrap_or_default(),
        rep.pass
    );
    let items = vec![json!({
        "n": rep.n,
        "tau": rep.tau,
        "t_end": rep.t_end,
        "grid_len": rep.grid_len,
        "delta_arg": fmt(rep.delta_arg),
        "predicted": fmt(rep.predicted),
        "residual": fmt(rep.residual),
        "tolerance": fmt(rep.tolerance),
        "zeros_est": fmt(rep.zeros_est),
        "zeros_model": fmt(rep.zeros_model),
        "zeros_actual": rep.zeros_actual,
        "pass": rep.pass,
    })];
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

fn cmd_appendix_audit(r: &Resolved) -> Result<Output, Error> {
    let rep = appendix_audit()?;
    let t_grid: Vec<f64> = (1..10).map(|k| 0.1 * k as f64).collect();
    let zs = z_star_check(&t_grid)?;
    let monotone_dev = phi0_monotone_check(100)?;
    let _ = r;
    let mut csv = String::from("check,value,pass\n");
    csv.push_str(&format!(
        "t_min_re_surface,{},{}\n",
        fmt(rep.t_min_re_surface),
        (rep.t_min_re_surface - 0.924256).abs() < 1e-4
    ));
    csv.push_str(&format!(
        "t_max_im_surface,{},{}\n",
        fmt(rep.t_max_im_surface),
        (rep.t_max_im_surface - 0.707107).abs() < 1e-4
    ));
    csv.push_str(&format!(
        "g_counterexamples,{},{}\n",
        rep.g_counterexamples.len(),
        rep.g_counterexamples.is_empty()
    ));
    for z in &zs {
        csv.push_str(&format!("z_star_margin_t_{},{},{}\n", z.t, fmt(z.margin), z.pass));
    }
    let zs_pass = zs.iter().all(|z| z.pass);
    let items = vec![json!({
        "g_points_checked": rep.g_points_checked,
        "g_counterexamples": rep.g_counterexamples,
        "boundary_right_max_err": fmt(rep.boundary_right_max_err),
        "boundary_left_max_err": fmt(rep.boundary_left_max_err),
        "t_min_re_surface": fmt(rep.t_min_re_surface),
        "t_max_im_surface": fmt(rep.t_max_im_surface),
        "remark_points_checked": rep.remark_points_checked,
        "remark_violations": rep.remark_violations,
        "im_dz_violations": rep.im_dz_violations,
        "z_star": zs.iter().map(|z| json!({
            "t": z.t,
            "z_star": fmt(z.z_star),
            "ln_z_star": fmt(z.ln_z_star),
            "margin": fmt(z.margin),
            "closed_form_dev": fmt(z.closed_form_dev),
            "pass": z.pass,
        })).collect::<Vec<_>>(),
        "phi0_monotone_max_dev": fmt(monotone_dev),
        "pass": rep.pass && zs_pass && monotone_dev < 1e-6,
    })];
    Ok(Output {
        items,
        csv,
        svg: None,
    })
}

// --- minimal static SVG plotting ---

fn svg_header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        w, h, w, h, w, h
    )
}

fn svg_scatter(points: &[(f64, f64)], vline_x: Option<f64>) -> String {
    let (w, h) = (640.0, 480.0);
    let margin = 40.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if let Some(v) = vline_x {
        x0 = x0.min(v - 0.5);
        x1 = x1.max(v + 0.5);
    }
    let dx = (x1 - x0).max(1e-9);
    let dy = (y1 - y0).max(1e-9);
    let sx = |x: f64| margin + (x - x0) / dx * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / dy * (h - 2.0 * margin);
    let mut s = svg_header(w, h);
    if let Some(v) = vline_x {
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#cc3333\" stroke-width=\"1\"/>\n",
            sx(v),
            sy(y0),
            sx(v),
            sy(y1)
        ));
    }
    for &(x, y) in points {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#336699\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn svg_density(bins: &[f64], model: &[f64], bw: f64) -> String {
    let (w, h) = (640.0, 480.0);
    let margin = 40.0;
    let top = bins
        .iter()
        .chain(model.iter())
        .cloned()
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let sx = |x: f64| margin + x * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - y / top * (h - 2.0 * margin);
    let mut s = svg_header(w, h);
    for (i, &b) in bins.iter().enumerate() {
        let x = (i as f64) * bw;
        s.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#99bbdd\" stroke=\"#336699\"/>\n",
            sx(x),
            sy(b),
            sx(x + bw) - sx(x),
            sy(0.0) - sy(b)
        ));
    }
    // smooth model curve from the analytic density
    let mut path = String::new();
    for j in 1..=200 {
        let x = (j as f64) / 201.0;
        let y = 2.0 * density_d(x).unwrap_or(0.0);
        let cmd = if j == 1 { 'M' } else { 'L' };
        path.push_str(&format!("{}{:.2} {:.2} ", cmd, sx(x), sy(y.min(top))));
    }
    s.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"#cc3333\" stroke-width=\"1.5\"/>\n",
        path
    ));
    let _ = ExpComplex::zero();
    s.push_str("</svg>\n");
    s
}
