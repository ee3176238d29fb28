#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use univpi::complex::build;
use univpi::critical::{critical_faces, sign_split, write_curve_csv, CriticalFaceReport};
use univpi::harness::{
    convergence_study, framework_condition_probe, run_universality, write_json, write_universality, ExperimentConfig,
};
use univpi::knn::{build_knn, cone_cover, degree_distribution};
use univpi::persistence::{pi_measure, reduce_with, Algorithm};
use univpi::theory::{limit_constants, EstimateOptions};

use config::*;

#[derive(Parser)]
#[command(name = "univpi", version, about = "Universality of persistence-diagram π-values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a point cloud.
    Sample(Common),
    /// Build a Čech or Rips filtration.
    Complex(Common),
    /// Persistence diagrams.
    Pdgm(Common),
    /// π = death/birth of degree-k pairs.
    Pivalues(Common),
    /// Critical faces and the counting curve F_k(λ).
    Critical(Common),
    /// Limiting constants F_k^* and the limit curve.
    Constants(Common),
    /// Universality experiment across densities.
    Universality(Common),
    /// k-NN degree distribution.
    Knn(Common),
    /// Translation, scale and additivity probes.
    Probe(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config, or a manifest from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Caps the worker count.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(c) => execute("sample", c, run_sample),
        Command::Complex(c) => execute("complex", c, run_complex),
        Command::Pdgm(c) => execute("pdgm", c, run_pdgm),
        Command::Pivalues(c) => execute("pivalues", c, run_pivalues),
        Command::Critical(c) => execute("critical", c, run_critical),
        Command::Constants(c) => execute("constants", c, run_constants),
        Command::Universality(c) => execute("universality", c, run_universality_cmd),
        Command::Knn(c) => execute("knn", c, run_knn),
        Command::Probe(c) => execute("probe", c, run_probe),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute<T>(command: &str, args: &Common, run: fn(&T, &Path) -> Result<Vec<String>>) -> Result<(), Failure>
where
    T: Validate + Serialize + DeserializeOwned,
{
    let load = || -> Result<T> {
        let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
        let mut cfg: T = parse(command, &text)?;
        if let Some(seed) = args.seed {
            cfg.reseed(seed);
        }
        cfg.validate()?;
        if args.threads == Some(0) {
            anyhow::bail!("--threads must be positive");
        }
        Ok(cfg)
    };
    let cfg = load().map_err(Failure::Validation)?;
    let go = || -> Result<()> {
        if let Some(n) = args.threads {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
        let outputs = run(&cfg, &args.out)?;
        let manifest = Manifest { command, version: env!("CARGO_PKG_VERSION"), config: &cfg, outputs };
        write_json(&manifest, &args.out.join("manifest.json"))?;
        Ok(())
    };
    go().map_err(Failure::Runtime)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn run_sample(cfg: &SampleConfig, out: &Path) -> Result<Vec<String>> {
    let cloud = cfg.source.cloud(cfg.seed)?;
    let mut w = create(out, "points.csv")?;
    let header: Vec<String> = (0..cloud.d).map(|a| format!("x{a}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(vec!["points.csv".into()])
}

fn filtration(cfg: &FiltrationConfig) -> Result<univpi::complex::FilteredComplex> {
    let cloud = cfg.source.cloud(cfg.seed)?;
    Ok(build(&cloud, cfg.flavor, cfg.r_max.unwrap_or(f64::INFINITY), cfg.max_dim)?)
}

fn run_complex(cfg: &FiltrationConfig, out: &Path) -> Result<Vec<String>> {
    let fc = filtration(cfg)?;
    let mut w = create(out, "complex.txt")?;
    fc.dump(&mut w)?;
    w.flush()?;
    Ok(vec!["complex.txt".into()])
}

fn run_pdgm(cfg: &FiltrationConfig, out: &Path) -> Result<Vec<String>> {
    let fc = filtration(cfg)?;
    let red = reduce_with(&fc, Algorithm::Cohomology);
    let mut w = create(out, "diagrams.csv")?;
    red.diagrams.write_csv(&mut w)?;
    w.flush()?;
    Ok(vec!["diagrams.csv".into()])
}

fn run_pivalues(cfg: &PiConfig, out: &Path) -> Result<Vec<String>> {
    let cloud = cfg.source.cloud(cfg.seed)?;
    let r_max = cfg.r_max.unwrap_or(f64::INFINITY);
    let fc = build(&cloud, cfg.flavor, r_max, cfg.k + 1)?;
    let red = reduce_with(&fc, Algorithm::Cohomology);
    let m = pi_measure(&red.diagrams, cfg.k, r_max);
    let mut w = create(out, "pi_values.csv")?;
    m.write_csv(&mut w, true)?;
    w.flush()?;
    Ok(vec!["pi_values.csv".into()])
}

fn write_faces(report: &CriticalFaceReport, out: &Path) -> Result<()> {
    let mut w = create(out, "critical_faces.csv")?;
    writeln!(w, "radius,multiplicity,plus,minus,vertices")?;
    for f in &report.faces {
        let (p, m) = f.split.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        let verts: Vec<String> = f.simplex.vertices().iter().map(u32::to_string).collect();
        writeln!(w, "{},{},{},{},{}", f.radius, f.multiplicity, p, m, verts.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

fn run_critical(cfg: &CriticalConfig, out: &Path) -> Result<Vec<String>> {
    let cloud = cfg.source.cloud(cfg.seed)?;
    let mut outputs = vec!["critical_faces.csv".to_string(), "critical.json".to_string()];
    let nu = cfg.nu.unwrap_or_else(|| cfg.source.intensity(&cloud));
    let r_max = match cfg.lambdas.last() {
        Some(&top) => (top / nu).powf(1.0 / cloud.d as f64),
        None => cfg.r_max.unwrap_or(f64::INFINITY),
    };
    let mut report = critical_faces(&cloud, cfg.flavor, cfg.k, r_max)?;
    if cfg.sign_split {
        sign_split(&cloud, &mut report)?;
    }
    let curve = (!cfg.lambdas.is_empty()).then(|| report.curve(&cfg.lambdas, nu));
    write_faces(&report, out)?;
    if let Some(curve) = curve {
        let mut w = create(out, "fk_curve.csv")?;
        write_curve_csv(&curve, &mut w)?;
        w.flush()?;
        outputs.push("fk_curve.csv".into());
    }
    let summary = json!({
        "flavor": report.flavor,
        "k": report.k,
        "r_max": report.r_max,
        "faces": report.faces.len(),
        "total": report.total(),
        "degenerate": report.degenerate,
    });
    write_json(&summary, &out.join("critical.json"))?;
    Ok(outputs)
}

fn run_constants(cfg: &ConstantsConfig, out: &Path) -> Result<Vec<String>> {
    let opts = EstimateOptions { samples: cfg.samples, seed: cfg.seed, m_max: cfg.m_max };
    let lc = limit_constants(cfg.d, cfg.k, cfg.flavor, opts)?;
    if lc.truncation_warning {
        eprintln!("warning: series tail exceeds the warning fraction; raise m_max");
    }
    write_json(&lc, &out.join("constants.json"))?;
    let mut outputs = vec!["constants.json".to_string()];
    if let Some(c) = &cfg.curve {
        let mut w = create(out, "theory_curve.csv")?;
        writeln!(w, "lambda,F_k")?;
        for &l in &c.lambdas {
            writeln!(w, "{},{}", l, lc.curve(l, &c.density)?)?;
        }
        w.flush()?;
        outputs.push("theory_curve.csv".into());
    }
    Ok(outputs)
}

fn run_universality_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<String>> {
    let report = run_universality(cfg)?;
    write_universality(&report, out)?;
    println!("pass: {} (partial: {})", report.pass, report.partial);
    for e in &report.pairwise {
        println!("{} vs {}: D = {} (crit {})", e.a, e.b, e.statistic, e.critical);
    }
    let mut outputs: Vec<String> = report.densities.iter().map(|d| format!("pi_values_{}.csv", d.label)).collect();
    outputs.extend(["report.json".into(), "figure1.svg".into()]);
    Ok(outputs)
}

fn run_knn(cfg: &KnnConfig, out: &Path) -> Result<Vec<String>> {
    let cloud = cfg.source.cloud(cfg.seed)?;
    let g = build_knn(&cloud, cfg.k_param)?;
    let bound = cone_cover(cloud.d)?.degree_bound(cfg.k_param);
    let dist = degree_distribution(&g, bound)?;
    let mut w = create(out, "degrees.csv")?;
    dist.write_csv(&mut w)?;
    w.flush()?;
    let summary = json!({
        "n": g.len(),
        "k_param": cfg.k_param,
        "degree_bound": bound,
        "edges": g.edges().len(),
        "max_degree": (0..g.len()).map(|i| g.degree(i)).max().unwrap_or(0),
    });
    write_json(&summary, &out.join("knn.json"))?;
    Ok(vec!["degrees.csv".into(), "knn.json".into()])
}

fn run_probe(cfg: &ProbeConfig, out: &Path) -> Result<Vec<String>> {
    let report = framework_condition_probe(&cfg.experiment, cfg.split_m, &cfg.sizes)?;
    write_json(&report, &out.join("framework.json"))?;
    let mut outputs = vec!["framework.json".to_string()];
    if !cfg.convergence_sizes.is_empty() {
        let rows = convergence_study(&cfg.experiment, &cfg.convergence_sizes)?;
        let mut w = create(out, "convergence.csv")?;
        writeln!(w, "size,mean,sd,seeds")?;
        for r in &rows {
            writeln!(w, "{},{},{},{}", r.size, r.mean, r.sd, r.seeds)?;
        }
        w.flush()?;
        outputs.push("convergence.csv".into());
    }
    Ok(outputs)
}
