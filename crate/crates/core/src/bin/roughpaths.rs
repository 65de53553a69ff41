use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use roughpaths::error::{Error, Result};
use roughpaths::gaussian::{mesh_covariance_modulus, sample_paths, uniform_partition, CovarianceModel};
use roughpaths::harness::config::{parse_band, parse_config, parse_usize_list};
use roughpaths::harness::{
    checks, run_level_l2_rate, run_rate, ErrorMetric, ExperimentSpec, LevelRateSpec, RateReport, Statistic,
};
use roughpaths::parallel::default_workers;
use roughpaths::path::SampledPath;
use roughpaths::rde::SchemeKind;
use roughpaths::signature::path_signature;
use roughpaths::words::{
    generating_set, is_lyndon, lyndon_factorization, lyndon_shuffle_expansion, lyndon_words_for_multiset,
    parse_multiset, shuffle, Word,
};

#[derive(Parser)]
#[command(name = "roughpaths", version, about = "Rough-path numerics: signatures, shuffles, Gaussian drivers and convergence-rate experiments")]
struct Cli {
    /// Flat key=value file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for Monte-Carlo loops (defaults to the number of CPUs).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// bm or fbm.
    #[arg(long)]
    model: Option<String>,
    /// Hurst parameter for fbm, in (0.25, 0.5].
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct RateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated meshes, e.g. 8,16,32.
    #[arg(long)]
    meshes: Option<String>,
    #[arg(long = "ref-mesh")]
    ref_mesh: Option<usize>,
    /// Monte-Carlo trajectories.
    #[arg(long)]
    mc: Option<usize>,
    /// linear, nonlinear or zero.
    #[arg(long)]
    preset: Option<String>,
    /// median, mean or l2.
    #[arg(long)]
    stat: Option<String>,
    /// sup or qvar:<q>.
    #[arg(long)]
    metric: Option<String>,
    /// Acceptance band for the slope as lo,hi.
    #[arg(long)]
    band: Option<String>,
    /// Runge-Kutta steps per reference segment.
    #[arg(long)]
    substeps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Gaussian trajectories on a uniform grid.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        mesh: Option<usize>,
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        /// Write one CSV per trajectory into the --out directory.
        #[arg(long)]
        per_file: bool,
    },
    /// Signature of a path stored as CSV (time,comp_1,…).
    Signature {
        input: PathBuf,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        end: Option<f64>,
        /// Trajectory to use when the file has a trajectory column.
        #[arg(long, default_value_t = 0)]
        trajectory: usize,
    },
    /// Shuffle algebra and Lyndon words.
    Shuffle {
        #[command(subcommand)]
        op: ShuffleOp,
    },
    /// Grid ρ-variation of a model covariance.
    Var2d {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        mesh: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        /// Rectangle s,t,u,v on the grid.
        #[arg(long)]
        rect: Option<String>,
        /// Also print |D_k| for the uniform partition with this many cells.
        #[arg(long)]
        modulus: Option<usize>,
    },
    /// Wong-Zakai convergence rate.
    WzRate(RateArgs),
    /// Simplified step-N Euler convergence rate.
    EulerRate {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long = "scheme-n")]
        scheme_n: Option<usize>,
        /// Use the full step-N Euler scheme with driver signatures.
        #[arg(long)]
        full: bool,
    },
    /// L² rates of signature levels under piecewise-linear approximation.
    LevelRate {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Fubini, covariance, Chen, shuffle and generating-set checks.
    IdentityChecks {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ShuffleOp {
    Product { u: String, v: String },
    IsLyndon { w: String },
    Factor { w: String },
    /// Lyndon words with a letter multiset written as a word, e.g. aabc.
    LyndonWords { multiset: String },
    Expand { w: String },
    GeneratingSet { multiset: String },
}

/// Flag values with a config-file fallback.
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| Error::Parse(format!("config key {key}: {e}"))),
            None => Ok(None),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }
}

fn model_from(s: &Settings, a: &ModelArgs, dim: usize) -> Result<CovarianceModel> {
    let name: String = s.or(a.model.clone(), "model", "bm".into())?;
    match name.as_str() {
        "bm" => CovarianceModel::bm(dim),
        "fbm" => {
            let h = s
                .get(a.hurst, "hurst")?
                .ok_or_else(|| Error::Parse("--model fbm needs --hurst".into()))?;
            CovarianceModel::fbm(h, dim)
        }
        other => Err(Error::Parse(format!("unknown model {other:?}; expected bm or fbm"))),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_path(file: &Path, trajectory: usize) -> Result<SampledPath> {
    let text = fs::read_to_string(file)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty path file".into()))?;
    let long = header.split(',').next().map(str::trim) == Some("trajectory");
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("data line {}: {e}", n + 1)))?;
        let row = if long {
            if fields[0] as usize != trajectory {
                continue;
            }
            &fields[1..]
        } else {
            &fields[..]
        };
        if row.len() < 2 {
            return Err(Error::Parse(format!("data line {} has no components", n + 1)));
        }
        times.push(row[0]);
        points.push(row[1..].to_vec());
    }
    SampledPath::from_points(times, &points)
}

fn path_csv(header_prefix: &str, x: &SampledPath, label: Option<usize>) -> String {
    let mut s = String::new();
    if !header_prefix.is_empty() {
        s.push_str(header_prefix);
    }
    for i in 0..x.len() {
        if let Some(t) = label {
            s.push_str(&format!("{t},"));
        }
        s.push_str(&format!("{}", x.times()[i]));
        for v in x.point(i) {
            s.push_str(&format!(",{v:e}"));
        }
        s.push('\n');
    }
    s
}

fn rate_spec(s: &Settings, a: &RateArgs, workers: usize) -> Result<ExperimentSpec> {
    let model = model_from(s, &a.model, 2)?;
    let mut spec = ExperimentSpec::new(model);
    if let Some(m) = s.get(a.meshes.clone(), "meshes")? {
        spec.meshes = parse_usize_list(&m)?;
    }
    spec.ref_mesh = s.or(a.ref_mesh, "ref-mesh", spec.ref_mesh)?;
    spec.mc = s.or(a.mc, "mc", spec.mc)?;
    spec.seed = s.or(a.model.seed, "seed", spec.seed)?;
    spec.preset = s.or(a.preset.clone(), "preset", spec.preset.clone())?;
    spec.statistic = s.or(a.stat.clone(), "stat", "median".to_string())?.parse()?;
    spec.metric = s.or(a.metric.clone(), "metric", "sup".to_string())?.parse::<ErrorMetric>()?;
    spec.substeps = s.or(a.substeps, "substeps", spec.substeps)?;
    spec.band = s.get(a.band.clone(), "band")?.map(|b| parse_band(&b)).transpose()?;
    spec.workers = workers;
    Ok(spec)
}

fn report(out: &Option<PathBuf>, reports: &[RateReport]) -> Result<bool> {
    let mut text = String::new();
    for (i, r) in reports.iter().enumerate() {
        if reports.len() > 1 {
            text.push_str(&format!("# {}\n", r.label));
        }
        text.push_str(&r.to_csv());
        if i + 1 < reports.len() {
            text.push('\n');
        }
        eprintln!("{}", r.summary());
    }
    emit(out, &text)?;
    Ok(reports.iter().all(RateReport::passes))
}

fn run(cli: Cli) -> Result<bool> {
    let settings = Settings(match &cli.config {
        Some(p) => parse_config(&fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    });
    let s = &settings;
    let workers = s.or(cli.workers, "workers", default_workers())?.max(1);
    match &cli.command {
        Command::Sample {
            model,
            mesh,
            mc,
            dim,
            per_file,
        } => {
            let dim = s.or(*dim, "dim", 2)?;
            let m = model_from(s, model, dim)?;
            let k = s.or(*mesh, "mesh", 256)?;
            let count = s.or(*mc, "mc", 1)?;
            let seed = s.or(model.seed, "seed", 1)?;
            let paths = sample_paths(&m, k, count, seed, workers)?;
            let cols: String = (1..=dim).map(|c| format!(",comp_{c}")).collect();
            if *per_file {
                let dir = cli
                    .out
                    .as_ref()
                    .ok_or_else(|| Error::Parse("--per-file needs --out DIR".into()))?;
                fs::create_dir_all(dir)?;
                for (i, x) in paths.iter().enumerate() {
                    let text = path_csv(&format!("time{cols}\n"), x, None);
                    fs::write(dir.join(format!("traj_{i:05}.csv")), text)?;
                }
            } else {
                let mut text = format!("trajectory,time{cols}\n");
                for (i, x) in paths.iter().enumerate() {
                    text.push_str(&path_csv("", x, Some(i)));
                }
                emit(&cli.out, &text)?;
            }
            Ok(true)
        }
        Command::Signature {
            input,
            level,
            start,
            end,
            trajectory,
        } => {
            let x = read_path(input, *trajectory)?;
            let n = s.or(*level, "level", 2)?;
            let sig = path_signature(&x, n, start.unwrap_or(x.start()), end.unwrap_or(x.end()))?;
            let row: Vec<String> = sig.csv_row().iter().map(|v| format!("{v:e}")).collect();
            emit(&cli.out, &format!("{}\n{}\n", sig.csv_header().join(","), row.join(",")))?;
            Ok(true)
        }
        Command::Shuffle { op } => {
            let text = match op {
                ShuffleOp::Product { u, v } => shuffle(&u.parse()?, &v.parse()?).to_string(),
                ShuffleOp::IsLyndon { w } => is_lyndon(&w.parse()?)?.to_string(),
                ShuffleOp::Factor { w } => lyndon_factorization(&w.parse::<Word>()?)?
                    .iter()
                    .map(|(l, i)| if *i == 1 { l.to_string() } else { format!("({l})^{i}") })
                    .collect::<Vec<_>>()
                    .join(" "),
                ShuffleOp::LyndonWords { multiset } => join_words(&lyndon_words_for_multiset(&parse_multiset(multiset)?)?),
                ShuffleOp::Expand { w } => {
                    let e = lyndon_shuffle_expansion(&w.parse()?)?;
                    let factors: Vec<String> = e
                        .factors
                        .iter()
                        .map(|(l, i)| if *i == 1 { l.to_string() } else { format!("{l}^{i}") })
                        .collect();
                    format!("normalized shuffle of [{}] = {} + ({})", factors.join(", "), e.word, e.correction)
                }
                ShuffleOp::GeneratingSet { multiset } => join_words(&generating_set(&parse_multiset(multiset)?)?),
            };
            emit(&cli.out, &format!("{text}\n"))?;
            Ok(true)
        }
        Command::Var2d {
            model,
            mesh,
            rho,
            rect,
            modulus,
        } => {
            let m = model_from(s, model, 1)?;
            let k = s.or(*mesh, "mesh", 8)?;
            let rho = s.or(*rho, "rho", m.rho())?;
            let cov = m.grid_covariance(&uniform_partition(k))?;
            let r = match s.get(rect.clone(), "rect")? {
                Some(text) => {
                    let v: Vec<f64> = text
                        .split(',')
                        .map(|p| p.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse(format!("--rect: {e}")))?;
                    if v.len() != 4 {
                        return Err(Error::Parse("--rect needs s,t,u,v".into()));
                    }
                    cov.grid().rect_by_times(v[0], v[1], v[2], v[3])?
                }
                None => cov.grid().full_rect(),
            };
            let v = cov.rho_variation(&r, rho)?;
            let mut text = format!(
                "rho,value,exact,increment\n{rho},{:e},{},{:e}\n",
                v.value,
                v.exact,
                cov.rect_increment(&r)?
            );
            if let Some(kd) = modulus {
                let md = mesh_covariance_modulus(&m, &uniform_partition(*kd), rho, 8)?;
                text.push_str(&format!("# modulus_k={kd},value={md:e}\n"));
            }
            emit(&cli.out, &text)?;
            Ok(true)
        }
        Command::WzRate(a) => {
            let spec = rate_spec(s, a, workers)?;
            report(&cli.out, &[run_rate(&spec)?])
        }
        Command::EulerRate { rate, scheme_n, full } => {
            let mut spec = rate_spec(s, rate, workers)?;
            spec.scheme = if *full { SchemeKind::EulerN } else { SchemeKind::SimplifiedEulerN };
            spec.level = s.or(*scheme_n, "scheme-n", 2)?;
            report(&cli.out, &[run_rate(&spec)?])
        }
        Command::LevelRate { rate, level } => {
            let base = rate_spec(s, rate, workers)?;
            let mut spec = LevelRateSpec::new(base.model, s.or(*level, "level", 2)?);
            spec.meshes = base.meshes;
            spec.ref_mesh = base.ref_mesh;
            spec.mc = base.mc;
            spec.seed = base.seed;
            spec.statistic = s.or(rate.stat.clone(), "stat", "l2".to_string())?.parse::<Statistic>()?;
            spec.band = base.band;
            spec.workers = workers;
            let reports = run_level_l2_rate(&spec)?;
            report(&cli.out, &reports)
        }
        Command::IdentityChecks { seed } => {
            let seed = s.or(*seed, "seed", 1)?;
            let results = checks::run_all(seed, workers)?;
            let mut text = String::from("check,passed,detail\n");
            for r in &results {
                text.push_str(&format!("{},{},\"{}\"\n", r.name, r.passed, r.detail));
            }
            emit(&cli.out, &text)?;
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn join_words(ws: &[Word]) -> String {
    ws.iter().map(Word::to_string).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
