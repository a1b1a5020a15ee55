//! Command-line surface: census / lacunas / monodromy / volume / plot with
//! reproducible CSV, JSON and SVG artifacts.
//!
//! Exit codes: 0 success, 2 usage, 3 degenerate input or numeric failure,
//! 4 computed counts disagreeing with the expected table.

use crate::algebra::{parse_rat, Rat};
use crate::atlas::{self, AtlasError};
use crate::families::Class;
use crate::monodromy;
use crate::volume::{self, VolumeError};
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;

const SCHEMA_VERSION: u32 = 1;

fn build_id() -> String {
    format!("{}-{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(name = "lacuna", version, about = "Census, monodromy and volume probes for the plane boundary singularities B_k, C_k, F_4")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate discriminant-complement components and lacunas for one class
    Census(CensusArgs),
    /// Stabilized (n = 2 + r + s) lacuna counts from the census witnesses
    Lacunas(LacunasArgs),
    /// Integer intersection model, generators and obstruction reports
    Monodromy(MonodromyArgs),
    /// Volume function V(c), its derivative, and the ramification probe
    Volume(VolumeArgs),
    /// SVG rendering of level curves and the boundary line S
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
struct ClassArgs {
    /// Family: B, C or F4
    #[arg(long)]
    family: String,
    /// Index k (required for B and C, ignored for F4)
    #[arg(long)]
    k: Option<usize>,
    /// Sign of the normal form: + or -
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
}

impl ClassArgs {
    fn class(&self) -> Result<Class, String> {
        let sign = match self.sign.as_str() {
            "+" | "plus" => "+",
            "-" | "minus" => "-",
            other => return Err(format!("bad sign {other:?}: expected + or -")),
        };
        let label = match self.family.as_str() {
            "B" | "C" => {
                let k = self
                    .k
                    .ok_or_else(|| format!("family {} requires --k", self.family))?;
                format!("{}{}{}", self.family, k, sign)
            }
            "F4" => format!("F4{sign}"),
            other => return Err(format!("unknown family {other:?}: expected B, C or F4")),
        };
        label.parse::<Class>().map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// RNG seed (sampling is deterministic given the seed)
    #[arg(long)]
    seed: u64,
    /// Number of random deformations to draw
    #[arg(long, default_value_t = 400)]
    budget: usize,
    /// Write the per-component CSV here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON summary here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
    /// Reuse cached census results from this directory
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LacunasArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Extra positive squares in the stabilization
    #[arg(long, default_value_t = 0)]
    r: usize,
    /// Extra negative squares in the stabilization
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MonodromyArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Maximum word length in the obstruction search
    #[arg(long, default_value_t = monodromy::DEFAULT_WORD_LEN)]
    word_len: usize,
    /// Write a DOT rendering of the coupling graph here
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VolumeArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Deformation parameters, comma-separated rationals or decimals
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Level range lo:hi
    #[arg(long, allow_hyphen_values = true)]
    c_range: String,
    /// Number of levels in the range
    #[arg(long, default_value_t = 17)]
    points: usize,
    /// Quadrature tolerance
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Render the region and level curves to this SVG file
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Levels to draw, comma-separated (default: the zero level)
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    levels: String,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let res = match cli.cmd {
        Cmd::Census(a) => run_census(a),
        Cmd::Lacunas(a) => run_lacunas(a),
        Cmd::Monodromy(a) => run_monodromy(a),
        Cmd::Volume(a) => run_volume(a),
        Cmd::Plot(a) => run_plot(a),
    };
    match res {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            3
        }
        Err(CliError::Mismatch(msg)) => {
            eprintln!("error: {msg}");
            4
        }
    }
}

enum CliError {
    Usage(String),
    Degenerate(String),
    Mismatch(String),
}

impl From<AtlasError> for CliError {
    fn from(e: AtlasError) -> Self {
        match &e {
            AtlasError::CountMismatch { .. } => CliError::Mismatch(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<VolumeError> for CliError {
    fn from(e: VolumeError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Degenerate(format!("io: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Degenerate(format!("csv: {e}"))
    }
}

fn emit_json<T: Serialize>(
    config: serde_json::Value,
    body: &T,
    path: &Option<PathBuf>,
) -> Result<(), CliError> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "build": build_id(),
        "config": config,
        "report": body,
    });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Degenerate(format!("json: {e}")))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        // ignore broken pipes from downstream consumers
        None => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    Ok(())
}

fn rat_list(v: &[Rat]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

fn class_csv_fields(class: Class) -> (String, String, String) {
    let (fam, k) = match class {
        Class::B { k, .. } => ("B".to_string(), k.to_string()),
        Class::C { k, .. } => ("C".to_string(), k.to_string()),
        Class::F4 { .. } => ("F4".to_string(), String::new()),
    };
    (fam, k, class.sign().symbol().to_string())
}

fn write_census_csv(
    path: &PathBuf,
    report: &atlas::CensusReport,
    r: usize,
    s: usize,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["family", "k", "sign", "r", "s", "signature", "is_lacuna", "witness"])
        .map_err(csv_err)?;
    let (fam, k, sign) = class_csv_fields(report.class);
    for rec in &report.records {
        w.write_record([
            fam.as_str(),
            k.as_str(),
            sign.as_str(),
            &r.to_string(),
            &s.to_string(),
            &rec.signature_label,
            &rec.is_lacuna.to_string(),
            &rat_list(&rec.witness),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Degenerate(format!("csv: {e}"))
}

fn run_census(a: CensusArgs) -> Result<(), CliError> {
    let class = a.class.class().map_err(CliError::Usage)?;
    let report = match &a.cache_dir {
        Some(dir) => atlas::census_cached(class, a.budget, a.seed, dir)?,
        None => atlas::census(class, a.budget, a.seed)?,
    };
    if let Some(p) = &a.csv {
        write_census_csv(p, &report, 0, 0)?;
    }
    let config = json!({
        "subcommand": "census",
        "class": report.class_label,
        "seed": a.seed,
        "budget": a.budget,
    });
    let body = json!({
        "components": report.component_count,
        "expected_components": report.expected_components,
        "lacunas": report.lacuna_count,
        "expected_lacunas": report.expected_lacunas,
        "complete": report.complete,
        "records": report.records,
    });
    emit_json(config, &body, &a.json)
}

fn run_lacunas(a: LacunasArgs) -> Result<(), CliError> {
    let class = a.class.class().map_err(CliError::Usage)?;
    let report = atlas::stabilized_census(class, a.r, a.s)?;
    if let Some(p) = &a.csv {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["family", "k", "sign", "r", "s", "signature", "is_lacuna", "witness"])
            .map_err(csv_err)?;
        let base = atlas::census(class, 0, 0)?;
        let (fam, k, sign) = class_csv_fields(class);
        for (rec, brec) in report.records.iter().zip(&base.records) {
            w.write_record([
                fam.as_str(),
                k.as_str(),
                sign.as_str(),
                &a.r.to_string(),
                &a.s.to_string(),
                &rec.signature_label,
                &rec.is_lacuna.to_string(),
                &rat_list(&brec.witness),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    let config = json!({
        "subcommand": "lacunas",
        "class": report.class_label,
        "r": a.r,
        "s": a.s,
    });
    emit_json(config, &report, &a.json)
}

fn run_monodromy(a: MonodromyArgs) -> Result<(), CliError> {
    let class = a.class.class().map_err(CliError::Usage)?;
    let model = monodromy::eta_matrix(class);
    let decomp = monodromy::decomposition(&model.eta);
    let ranks = monodromy::rank_report(class);
    let generators: Vec<_> = (1..=model.dim)
        .map(|i| monodromy::generator(&model, i))
        .collect();
    let obstructions: Vec<_> = (0..model.dim)
        .map(|i| {
            let mut pi = vec![0i64; model.dim];
            pi[i] = 1;
            monodromy::obstruction(&model, &pi, a.word_len)
        })
        .collect();
    if let Some(p) = &a.dot {
        let mut out = String::from("graph coupling {\n");
        for i in 0..model.dim {
            out.push_str(&format!("  b{};\n", i + 1));
        }
        for i in 0..model.dim {
            for j in i + 1..model.dim {
                if model.eta[i][j] != 0 || model.eta[j][i] != 0 {
                    out.push_str(&format!(
                        "  b{} -- b{} [label=\"{}/{}\"];\n",
                        i + 1,
                        j + 1,
                        model.eta[i][j],
                        model.eta[j][i]
                    ));
                }
            }
        }
        out.push_str("}\n");
        std::fs::write(p, out)?;
    }
    let config = json!({
        "subcommand": "monodromy",
        "class": class.to_string(),
        "word_len": a.word_len,
    });
    let body = json!({
        "model": model,
        "generators": generators,
        "indecomposable": decomp.indecomposable,
        "blocks": decomp.blocks,
        "ranks": ranks,
        "obstructions": obstructions,
    });
    emit_json(config, &body, &a.json)
}

fn parse_lambda(class: Class, text: &str) -> Result<Vec<Rat>, CliError> {
    let parts: Result<Vec<Rat>, String> = text
        .split(',')
        .map(|t| parse_rat(t.trim()))
        .collect();
    let lambda = parts.map_err(CliError::Usage)?;
    if lambda.len() != class.dim() {
        return Err(CliError::Usage(format!(
            "{} needs {} deformation parameters, got {}",
            class,
            class.dim(),
            lambda.len()
        )));
    }
    Ok(lambda)
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("bad --c-range {text:?}: expected lo:hi")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("bad range endpoint: {e}")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("bad range endpoint: {e}")))?;
    if !(hi > lo) {
        return Err(CliError::Usage("empty --c-range".into()));
    }
    Ok((lo, hi))
}

fn run_volume(a: VolumeArgs) -> Result<(), CliError> {
    let class = a.class.class().map_err(CliError::Usage)?;
    let lambda = parse_lambda(class, &a.lambda)?;
    let (lo, hi) = parse_range(&a.c_range)?;
    let series = volume::volume_series(class, &lambda, lo, hi, a.points.max(2), a.tol)?;
    let probe = volume::ramification_probe(class, &lambda, None)?;
    if let Some(p) = &a.csv {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["c", "V", "dV_dc"]).map_err(csv_err)?;
        for i in 0..series.c.len() {
            w.write_record([
                format!("{:.12e}", series.c[i]),
                format!("{:.12e}", series.v[i]),
                format!("{:.12e}", series.dv_dc[i]),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    if let Some(p) = &a.svg {
        let mut levels: Vec<f64> = series.critical_values.clone();
        levels.push(lo);
        levels.push(hi);
        render_svg(class, &lambda, &levels, p)?;
    }
    let config = json!({
        "subcommand": "volume",
        "class": class.to_string(),
        "lambda": lambda.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "c_range": [lo, hi],
        "points": a.points.max(2),
        "tol": a.tol,
    });
    let body = json!({
        "series": series,
        "ramification": probe,
    });
    emit_json(config, &body, &a.json)
}

/// Marching-squares polyline extraction of the level set f = c on an n x n
/// grid over [x0, x1] x [y0, y1].
fn marching_segments(
    class: Class,
    lambda: &[Rat],
    c: f64,
    frame: [f64; 4],
    n: usize,
) -> Vec<[f64; 4]> {
    let [x0, x1, y0, y1] = frame;
    let hx = (x1 - x0) / n as f64;
    let hy = (y1 - y0) / n as f64;
    let val = |i: usize, j: usize| -> f64 {
        crate::families::eval_f(class, lambda, x0 + i as f64 * hx, y0 + j as f64 * hy) - c
    };
    let mut cache = vec![f64::NAN; (n + 1) * (n + 1)];
    let at = |i: usize, j: usize, cache: &mut Vec<f64>| -> f64 {
        let idx = i * (n + 1) + j;
        if cache[idx].is_nan() {
            cache[idx] = val(i, j);
        }
        cache[idx]
    };
    let mut segs = vec![];
    for i in 0..n {
        for j in 0..n {
            let v = [
                at(i, j, &mut cache),
                at(i + 1, j, &mut cache),
                at(i + 1, j + 1, &mut cache),
                at(i, j + 1, &mut cache),
            ];
            // corner coordinates, counter-clockwise
            let px = [
                x0 + i as f64 * hx,
                x0 + (i + 1) as f64 * hx,
                x0 + (i + 1) as f64 * hx,
                x0 + i as f64 * hx,
            ];
            let py = [
                y0 + j as f64 * hy,
                y0 + j as f64 * hy,
                y0 + (j + 1) as f64 * hy,
                y0 + (j + 1) as f64 * hy,
            ];
            let mut pts = vec![];
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (v[a] < 0.0) != (v[b] < 0.0) {
                    let t = v[a] / (v[a] - v[b]);
                    pts.push((px[a] + t * (px[b] - px[a]), py[a] + t * (py[b] - py[a])));
                }
            }
            if pts.len() >= 2 {
                for pair in pts.chunks(2) {
                    if pair.len() == 2 {
                        segs.push([pair[0].0, pair[0].1, pair[1].0, pair[1].1]);
                    }
                }
            }
        }
    }
    segs
}

fn render_svg(
    class: Class,
    lambda: &[Rat],
    levels: &[f64],
    path: &PathBuf,
) -> Result<(), CliError> {
    // frame: large enough for the interesting features of every level
    let prof = crate::families::profile_poly(class, lambda)
        .map_err(|e| CliError::Degenerate(e.to_string()))?;
    let mut extent = prof.cauchy_bound().to_f64().unwrap_or(2.0);
    for c in levels {
        extent = extent.max(c.abs().sqrt() + 1.0);
    }
    let extent = (extent + 1.0).min(16.0);
    let frame = [-extent, extent, -extent, extent];
    let w = 640.0f64;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            (x - frame[0]) / (frame[1] - frame[0]) * w,
            (frame[3] - y) / (frame[3] - frame[2]) * w,
        )
    };
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n"
    ));
    out.push_str(&format!(
        "<!-- build {} class {} lambda {} -->\n",
        build_id(),
        class,
        rat_list(lambda)
    ));
    out.push_str(&format!(
        "<rect width=\"{w}\" height=\"{w}\" fill=\"white\"/>\n"
    ));
    // the boundary line S = {x = 0}
    let (sx, _) = to_px(0.0, 0.0);
    out.push_str(&format!(
        "<line x1=\"{sx:.2}\" y1=\"0\" x2=\"{sx:.2}\" y2=\"{w}\" stroke=\"#888\" stroke-dasharray=\"6 3\"/>\n"
    ));
    let palette = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (li, c) in levels.iter().enumerate() {
        let color = palette[li % palette.len()];
        out.push_str(&format!("<g stroke=\"{color}\" stroke-width=\"1.2\" fill=\"none\">\n"));
        for s in marching_segments(class, lambda, *c, frame, 384) {
            let (x1, y1) = to_px(s[0], s[1]);
            let (x2, y2) = to_px(s[2], s[3]);
            out.push_str(&format!(
                "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>\n"
            ));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

fn run_plot(a: PlotArgs) -> Result<(), CliError> {
    let class = a.class.class().map_err(CliError::Usage)?;
    let lambda = parse_lambda(class, &a.lambda)?;
    let levels: Result<Vec<f64>, _> = a
        .levels
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect();
    let levels = levels.map_err(|e| CliError::Usage(format!("bad --levels: {e}")))?;
    crate::families::require_off_wall(class, &lambda)
        .map_err(|e| CliError::Degenerate(e.to_string()))?;
    render_svg(class, &lambda, &levels, &a.out)?;
    Ok(())
}
