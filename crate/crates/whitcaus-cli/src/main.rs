mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use whitcaus::caustics::{defects, fiber_with_tol, zone, ChamberPoint, Zone};
use whitcaus::oscint::QuadConfig;
use whitcaus::realpoly::parse_rat;
use whitcaus::whittaker::*;

use report::{CheckLine, Report};

#[derive(Parser)]
#[command(name = "whitcaus", version, about = "Caustics and Whittaker functions of the self-dual GL(3) phase")]
struct Cli {
    /// Emit one JSON object per report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Serialize)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    y1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y2: Option<f64>,
    /// Take the point from exact rational squares `--y1sq`, `--y2sq`.
    #[arg(long)]
    exact: bool,
    #[arg(long, requires = "exact")]
    y1sq: Option<String>,
    #[arg(long, requires = "exact")]
    y2sq: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a chamber point.
    Zone {
        #[command(flatten)]
        point: PointArgs,
        /// Curve membership tolerance for float points.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// List the critical fiber over a chamber point.
    Fiber {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Evaluate the Jacquet-Whittaker function.
    Whittaker {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Spectral scale: t on the self-dual ray for n = 3, τ for n = 2.
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        point: PointArgs,
        /// Relative tolerance of the evaluation.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Predict::None)]
        predict: Predict,
        /// Cusp window constant for the Pearcey prediction.
        #[arg(long, default_value_t = 1.0)]
        window: f64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Larger samples, and the GL(3) growth checks under `all`.
        #[arg(long)]
        slow: bool,
    },
    /// Sweep a grid and write CSV.
    Scan {
        #[arg(long, value_enum)]
        mode: ScanMode,
        /// `start:stop:step` for both axes of the zones scan.
        #[arg(long, default_value = "0:1.2:0.005")]
        grid: String,
        /// Comma separated spectral scales for the supnorm mode.
        #[arg(long, default_value = "10,20,40,80")]
        t_list: String,
        /// Rank for the supnorm mode.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        /// Cusp window constant for the GL(3) supnorm mode.
        #[arg(long, default_value_t = 1.0)]
        window: f64,
        /// Samples per spectral scale (GL(2)) or per window axis (GL(3)).
        #[arg(long)]
        per_axis: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Predict {
    Morse,
    Pearcey,
    None,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Caustics,
    Hessian,
    Stade,
    Gl2,
    Gl3,
    All,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum ScanMode {
    Zones,
    Supnorm,
}

/// Bad command-line input, reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

impl PointArgs {
    fn point(&self) -> anyhow::Result<ChamberPoint> {
        if self.exact {
            let (Some(a), Some(b)) = (&self.y1sq, &self.y2sq) else {
                return usage("--exact needs --y1sq and --y2sq");
            };
            let a = parse_rat(a).map_err(|e| Usage(e.to_string()))?;
            let b = parse_rat(b).map_err(|e| Usage(e.to_string()))?;
            return ChamberPoint::from_squares(a, b).map_err(|e| Usage(e.to_string()).into());
        }
        match (self.y1, self.y2) {
            (Some(a), Some(b)) => ChamberPoint::new(a, b).map_err(|e| Usage(e.to_string()).into()),
            _ => usage("--y1 and --y2 are required (or --exact with --y1sq, --y2sq)"),
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("WHITCAUS_THREADS") {
        let n: usize = v.parse().map_err(|_| Usage(format!("WHITCAUS_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return usage("WHITCAUS_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(reports) => {
            // CSV on stdout pushes the report to stderr
            let csv_on_stdout = matches!(cli.cmd, Cmd::Scan { out: None, .. });
            let mut sink: Box<dyn Write> = if csv_on_stdout { Box::new(std::io::stderr()) } else { Box::new(std::io::stdout()) };
            for r in &reports {
                if let Err(e) = r.write(cli.json, &mut sink) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if reports.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Vec<Report>> {
    let start = Instant::now();
    let secs = || start.elapsed().as_secs_f64();
    Ok(match &cli.cmd {
        Cmd::Zone { point, tol } => {
            let p = point.point()?;
            let z = zone(&p, *tol);
            let (d1, d2) = defects(&p);
            let outputs = json!({ "zone": z, "defect1": d1, "defect2": d2, "fiber_size": z.fiber_size() });
            vec![Report::new("zone", json!({ "point": point, "tol": tol }), outputs, vec![], secs())]
        }
        Cmd::Fiber { point, tol } => {
            let p = point.point()?;
            let f = fiber_with_tol(&p, *tol);
            let points: Vec<_> = f
                .points
                .iter()
                .map(|q| {
                    let s = q.sym();
                    json!({
                        "diag": [s.s11, s.s22, s.s33],
                        "offdiag": [s.s12, s.s23],
                        "multiplicity": q.multiplicity,
                        "degeneracy": q.degeneracy,
                        "t_param": q.t_param,
                    })
                })
                .collect();
            let outputs = json!({
                "zone": f.zone,
                "count": f.points.len(),
                "base": [f.base.y1(), f.base.y2()],
                "points": points,
            });
            let checks = vec![CheckLine::eq("fiber size matches zone", f.points.len(), f.zone.fiber_size())];
            vec![Report::new("fiber", json!({ "point": point, "tol": tol }), outputs, checks, secs())]
        }
        Cmd::Whittaker { n, t, point, tol, predict, window } => {
            vec![whittaker(*n, *t, point, *tol, *predict, *window, secs)?]
        }
        Cmd::Verify { suite, slow } => {
            let picked: Vec<Suite> = match suite {
                Suite::All if *slow => vec![Suite::Caustics, Suite::Hessian, Suite::Stade, Suite::Gl2, Suite::Gl3],
                Suite::All => vec![Suite::Caustics, Suite::Hessian, Suite::Stade, Suite::Gl2],
                s => vec![*s],
            };
            picked
                .into_iter()
                .map(|s| {
                    let t0 = Instant::now();
                    let (name, checks) = match s {
                        Suite::Caustics => ("caustics", suites::caustics(*slow)),
                        Suite::Hessian => ("hessian", suites::hessian()),
                        Suite::Stade => ("stade", suites::stade()),
                        Suite::Gl2 => ("gl2", suites::gl2()),
                        Suite::Gl3 => ("gl3", suites::gl3()),
                        Suite::All => unreachable!("expanded above"),
                    };
                    Report::new(&format!("verify {name}"), json!({ "suite": name, "slow": slow }), json!({}), checks, t0.elapsed().as_secs_f64())
                })
                .collect()
        }
        Cmd::Scan { mode, grid, t_list, n, tol, window, per_axis, out } => {
            let inputs = json!({ "mode": mode, "grid": grid, "t_list": t_list, "n": n, "tol": tol, "window": window, "per_axis": per_axis });
            let (outputs, checks) = match mode {
                ScanMode::Zones => scan_zones(&parse_grid(grid)?, *tol, out.as_deref())?,
                ScanMode::Supnorm => scan_supnorm(&parse_list(t_list)?, *n, *per_axis, *window, out.as_deref())?,
            };
            vec![Report::new("scan", inputs, outputs, checks, secs())]
        }
    })
}

fn whittaker(n: usize, t: f64, point: &PointArgs, tol: f64, predict: Predict, window: f64, secs: impl Fn() -> f64) -> anyhow::Result<Report> {
    if !(tol > 0.0) {
        return usage("--tol must be positive");
    }
    let inputs = json!({ "n": n, "t": t, "point": point, "tol": tol, "predict": predict, "window": window });
    let cfg = QuadConfig::one_d().with_rel_tol(tol);
    match n {
        2 => {
            let y = point.y1.ok_or_else(|| Usage("--y1 is required for n = 2".into()))?;
            if !(y > 0.0) {
                return usage("--y1 must be positive");
            }
            if predict != Predict::None {
                return usage("predictions are available for n = 3 only");
            }
            let nu = SpectralParam::gl2(t).map_err(|e| Usage(e.to_string()))?;
            let w = gl2_whittaker(y, t, &cfg)?;
            let outputs = json!({
                "re": w.value.re, "im": w.value.im, "abs": w.value.norm(), "err": w.err_estimate,
                "laplace_eigenvalue": nu.laplace_eigenvalue(),
            });
            Ok(Report::new("whittaker", inputs, outputs, vec![], secs()))
        }
        3 => {
            let p = point.point()?;
            let nu = SpectralParam::self_dual(t).map_err(|e| Usage(e.to_string()))?;
            let w = jacquet_whittaker(&p, &nu, &cfg)?;
            let z = zone(&p, 0.0);
            let mut outputs = json!({
                "re": w.value.re, "im": w.value.im, "abs": w.value.norm(), "err": w.err_estimate,
                "abs_over_t34": w.value.norm() / t.powf(0.75),
                "zone": z,
                "rapid_decay_expected": z == Zone::Shadow,
                "in_cusp_window": in_cusp_window(&p, t, window),
            });
            match predict {
                Predict::None => {}
                Predict::Morse => {
                    let m = predict_morse(&p, &nu)?;
                    outputs["prediction"] = json!({ "re": m.re, "im": m.im, "abs": m.norm() });
                    outputs["rel_diff"] = json!((m - w.value).norm() / w.value.norm());
                }
                Predict::Pearcey => {
                    let pr = predict_pearcey(&p, &nu, window, &cfg)?;
                    outputs["prediction"] = json!({
                        "re": pr.total.re, "im": pr.total.im, "abs": pr.total.norm(),
                        "args_plus": pr.args_plus, "args_minus": pr.args_minus,
                        "abs_plus": pr.plus.norm(), "abs_minus": pr.minus.norm(),
                    });
                    outputs["rel_diff"] = json!((pr.total - w.value).norm() / w.value.norm());
                }
            }
            Ok(Report::new("whittaker", inputs, outputs, vec![], secs()))
        }
        _ => usage("--n must be 2 or 3"),
    }
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Usage(format!("grid must be start:stop:step, got {s:?}")))?;
    let [a, b, h] = parts[..] else { return usage(format!("grid must be start:stop:step, got {s:?}")) };
    if !(h > 0.0 && b >= a) {
        return usage("grid needs step > 0 and stop >= start");
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + h * i as f64).collect())
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Usage(format!("expected comma separated numbers, got {s:?}")))?;
    if v.len() < 2 || v.iter().any(|x| !(*x > 0.0)) {
        return usage("need at least two positive scales");
    }
    Ok(v)
}

fn writer(out: Option<&std::path::Path>) -> anyhow::Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

#[derive(Serialize)]
struct ZoneRow {
    y1: f64,
    y2: f64,
    zone: Zone,
    defect1: f64,
    defect2: f64,
    fiber_count: usize,
}

fn scan_zones(axis: &[f64], tol: f64, out: Option<&std::path::Path>) -> anyhow::Result<(serde_json::Value, Vec<CheckLine>)> {
    let axis: Vec<f64> = axis.iter().copied().filter(|y| *y > 0.0).collect();
    if axis.is_empty() {
        return usage("grid has no positive coordinates");
    }
    let pairs: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    let rows: Vec<ZoneRow> = pairs
        .par_iter()
        .map(|&(y1, y2)| {
            let p = ChamberPoint::new(y1, y2).expect("positive grid");
            let (defect1, defect2) = defects(&p);
            let f = fiber_with_tol(&p, tol);
            ZoneRow { y1, y2, zone: zone(&p, tol), defect1, defect2, fiber_count: f.points.len() }
        })
        .collect();
    let mismatched = rows.iter().filter(|r| r.fiber_count != r.zone.fiber_size()).count();
    let mut w = writer(out)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut counts = std::collections::BTreeMap::new();
    for r in &rows {
        *counts.entry(r.zone.to_string()).or_insert(0usize) += 1;
    }
    let outputs = json!({ "rows": rows.len(), "zones": counts, "out": out });
    Ok((outputs, vec![CheckLine::eq("fiber counts match zones", mismatched, 0)]))
}

#[derive(Serialize)]
struct SupnormCsvRow {
    t: f64,
    y1: f64,
    y2: Option<f64>,
    #[serde(rename = "absW")]
    abs_w: f64,
    err: f64,
}

fn scan_supnorm(ts: &[f64], n: usize, per_axis: Option<usize>, window: f64, out: Option<&std::path::Path>) -> anyhow::Result<(serde_json::Value, Vec<CheckLine>)> {
    if per_axis.is_some_and(|k| k < 2) {
        return usage("--per-axis must be at least 2");
    }
    let (report, tol) = match n {
        2 => (supnorm_scan_gl2(ts, per_axis.unwrap_or(17), &QuadConfig::one_d().with_rel_tol(1e-6))?, 0.05),
        3 => (supnorm_scan_gl3(ts, window, per_axis.unwrap_or(17), 1e-6)?, 0.1),
        _ => return usage("--n must be 2 or 3"),
    };
    let mut w = writer(out)?;
    for r in &report.rows {
        let y2 = (n == 3).then_some(r.y2);
        w.serialize(SupnormCsvRow { t: r.t, y1: r.y1, y2, abs_w: r.abs_w, err: r.err })?;
    }
    w.flush()?;
    let outputs = json!({ "rows": report.rows.len(), "maxima": report.maxima, "slope": report.slope, "out": out });
    Ok((outputs, vec![CheckLine::abs("supnorm log-log slope", report.slope, report.expected, tol)]))
}
