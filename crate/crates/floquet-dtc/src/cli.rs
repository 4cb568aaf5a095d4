//! Command-line front end. Every subcommand writes its results under the
//! output directory and prints the list of written files as JSON; failures
//! print `{"error": kind, "message": text}` to stderr and exit nonzero.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{native_gate_count, Cycle};
use crate::config::{load_config, ObservableSpec, RunConfig, MANIFEST_KEY};
use crate::ensemble::run_ensemble;
use crate::error::{Error, Result};
use crate::fitting::{fit_double_exp, fit_single_exp, DecaySeries};
use crate::lattice::{LatticeDocument, Preset};
use crate::mitigation::mitigate;
use crate::output::{sig17, write_json, write_text};
use crate::theory::run_suite;

#[derive(Debug, Parser)]
#[command(
    name = "floquet-dtc",
    version,
    about = "Kicked Ising and kicked CZ Floquet circuits on small lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration or manifest (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the configuration's `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides the configuration's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the configured ensemble and write magnetization series.
    Simulate,
    /// Evolve the configured ensemble and write only its OTOC series.
    Otoc,
    /// Verify the exact operator identities on the built-in clusters.
    TheoryCheck,
    /// Fit an exponential decay to one series of a series CSV.
    Fit(FitArgs),
    /// Divide a raw series by the magnitude of a reference series.
    Mitigate(MitigateArgs),
    /// Write the gate list of one Floquet step.
    EmitCircuit,
    /// List the built-in lattices.
    Presets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Single,
    Double,
    Both,
}

#[derive(Debug, clap::Args)]
pub struct SeriesSelector {
    /// Observable column value to select (default: the only one, or `z_avg`).
    #[arg(long)]
    pub observable: Option<String>,
    /// Region column value to select (default: the only one, or `all`).
    #[arg(long)]
    pub region: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct FitArgs {
    /// Series CSV (`step,observable,region,mean,stderr`).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub select: SeriesSelector,
    #[arg(long, value_enum, default_value = "single")]
    pub model: FitModel,
    /// Fit `|mean|`, as needed for period-doubled signals.
    #[arg(long)]
    pub magnitude: bool,
}

#[derive(Debug, clap::Args)]
pub struct MitigateArgs {
    /// Raw series CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Reference series CSV with the same steps.
    #[arg(long)]
    pub reference: PathBuf,
    #[command(flatten)]
    pub select: SeriesSelector,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub outputs: Vec<PathBuf>,
}

fn config_of(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::config("--config", "this subcommand needs a configuration file"))?;
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn plain_out(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn manifest(command: &str, cfg: &RunConfig, outputs: &[PathBuf]) -> Value {
    let names: Vec<String> = outputs
        .iter()
        .map(|p| {
            p.file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
        })
        .collect();
    json!({
        MANIFEST_KEY: 1,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": cfg.seed,
        "config": cfg.to_document(),
        "outputs": names,
    })
}

fn write_csv_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    write_text(path, std::str::from_utf8(&buf).expect("csv output is utf-8"))
}

fn simulate(cfg: &RunConfig, otoc_only: bool) -> Result<Vec<PathBuf>> {
    let lattice = cfg.build_lattice()?;
    let mut cfg = cfg.clone();
    let command = if otoc_only {
        cfg.observables
            .retain(|o| matches!(o, ObservableSpec::Otoc { .. }));
        if cfg.observables.is_empty() {
            return Err(Error::config(
                "observables",
                "the otoc subcommand needs an {\"otoc\": {\"j\", \"k\"}} entry",
            ));
        }
        "otoc"
    } else {
        "simulate"
    };
    let series = run_ensemble(&cfg.ensemble_spec(&lattice)?)?;
    let dir = &cfg.output_dir;
    let mut outputs = Vec::new();
    let main = dir.join(if otoc_only { "otoc.csv" } else { "series.csv" });
    write_csv_file(&main, |b| series.write_series_csv(b))?;
    outputs.push(main);
    if !series.snapshots.is_empty() {
        let path = dir.join("snapshots.csv");
        write_csv_file(&path, |b| series.write_snapshot_csv(b))?;
        outputs.push(path);
    }
    let lat = dir.join("lattice.json");
    write_json(&lat, &LatticeDocument::from_lattice(&lattice))?;
    outputs.push(lat);
    let man = dir.join("manifest.json");
    outputs.push(man.clone());
    write_json(&man, &manifest(command, &cfg, &outputs))?;
    Ok(outputs)
}

fn emit_circuit(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let lattice = cfg.build_lattice()?;
    let cycle = Cycle::build(&lattice, cfg.params());
    let text = cycle.to_text();
    let (head, body) = text.split_once('\n').unwrap_or((&text, ""));
    let count = native_gate_count(&lattice, cfg.m_cnot)?;
    let out = format!("{head}\n# native_gates={count} m_cnot={}\n{body}", cfg.m_cnot);
    let path = cfg.output_dir.join("circuit.txt");
    write_text(&path, &out)?;
    let lat = cfg.output_dir.join("lattice.json");
    write_json(&lat, &LatticeDocument::from_lattice(&lattice))?;
    Ok(vec![path, lat])
}

#[derive(Serialize)]
struct PresetRow {
    name: &'static str,
    n_sites: usize,
    n_edges: usize,
    n_pumped: usize,
    n_layers: usize,
    n_ancillas: usize,
}

fn presets(out: Option<&Path>) -> Result<(String, Vec<PathBuf>)> {
    let rows = Preset::ALL
        .iter()
        .map(|p| {
            let l = p.build()?;
            Ok(PresetRow {
                name: p.name(),
                n_sites: l.n_sites(),
                n_edges: l.n_edges(),
                n_pumped: l.charge_pump_set().len(),
                n_layers: l.n_layers(),
                n_ancillas: l.n_ancillas(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = format!("{:<12} {:>3} {:>5} {:>6}\n", "name", "L", "edges", "pumped");
    for r in &rows {
        table.push_str(&format!(
            "{:<12} {:>3} {:>5} {:>6}\n",
            r.name, r.n_sites, r.n_edges, r.n_pumped
        ));
    }
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        let path = dir.join("presets.json");
        write_json(&path, &rows)?;
        outputs.push(path);
    }
    Ok((table, outputs))
}

fn theory_check(dir: &Path) -> Result<Vec<PathBuf>> {
    let records = run_suite();
    let path = dir.join("theory_check.json");
    write_json(&path, &records)?;
    let failed: Vec<String> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} on {} at eps={}", r.check, r.lattice, r.epsilon))
        .collect();
    if !failed.is_empty() {
        return Err(Error::CheckFailed(format!(
            "{} of {} checks failed: {}",
            failed.len(),
            records.len(),
            failed.join("; ")
        )));
    }
    Ok(vec![path])
}

/// One `(observable, region)` series read back from a series CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesColumn {
    pub observable: String,
    pub region: String,
    pub steps: Vec<usize>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Read the series selected by `select` from a series CSV.
pub fn read_series(path: &Path, select: &SeriesSelector) -> Result<SeriesColumn> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::config(path.display().to_string(), format!("missing column `{name}`")))
    };
    let (cs, co, cr, cm, ce) = (
        col("step")?,
        col("observable")?,
        col("region")?,
        col("mean")?,
        col("stderr")?,
    );
    let mut groups: BTreeMap<(String, String), SeriesColumn> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::config(path.display().to_string(), format!("bad number `{}`", &rec[i])))
        };
        let key = (rec[co].to_string(), rec[cr].to_string());
        let entry = groups.entry(key.clone()).or_insert_with(|| SeriesColumn {
            observable: key.0,
            region: key.1,
            steps: Vec::new(),
            mean: Vec::new(),
            stderr: Vec::new(),
        });
        entry.steps.push(num(cs)? as usize);
        entry.mean.push(num(cm)?);
        entry.stderr.push(num(ce)?);
    }
    let wanted = |s: &SeriesColumn| {
        select.observable.as_ref().is_none_or(|o| *o == s.observable)
            && select.region.as_ref().is_none_or(|r| *r == s.region)
    };
    let mut matches: Vec<SeriesColumn> = groups.into_values().filter(wanted).collect();
    match matches.len() {
        0 => Err(Error::config(
            path.display().to_string(),
            "no series matches the selection",
        )),
        1 => Ok(matches.remove(0)),
        _ => matches
            .into_iter()
            .find(|s| s.observable == "z_avg" && s.region == "all")
            .ok_or_else(|| {
                Error::config(
                    path.display().to_string(),
                    "several series match; pass --observable and --region",
                )
            }),
    }
}

fn fit(args: &FitArgs, dir: &Path) -> Result<Vec<PathBuf>> {
    let col = read_series(&args.input, &args.select)?;
    let values: Vec<f64> = if args.magnitude {
        col.mean.iter().map(|v| v.abs()).collect()
    } else {
        col.mean.clone()
    };
    let steps = col.steps.iter().map(|&s| s as f64).collect();
    let mut series = DecaySeries::with_steps(steps, values)?;
    if col.stderr.iter().all(|&e| e > 0.0) {
        series = series.with_stderr(col.stderr.clone())?;
    }
    let mut fits = Vec::new();
    if matches!(args.model, FitModel::Single | FitModel::Both) {
        let f = fit_single_exp(&series)?;
        fits.push(json!({"model": "single", "params": {"eta": f.eta}, "residual": f.residual}));
    }
    if matches!(args.model, FitModel::Double | FitModel::Both) {
        let f = fit_double_exp(&series)?;
        fits.push(json!({
            "model": "double",
            "params": {"alpha1": f.alpha1, "eta1": f.eta1, "alpha2": f.alpha2, "eta2": f.eta2},
            "residual": f.residual,
        }));
    }
    for f in &mut fits {
        f["observable"] = json!(col.observable);
        f["region"] = json!(col.region);
    }
    let doc = if fits.len() == 1 {
        fits.remove(0)
    } else {
        Value::Array(fits)
    };
    let path = dir.join("fit.json");
    write_json(&path, &doc)?;
    Ok(vec![path])
}

fn mitigate_cmd(args: &MitigateArgs, dir: &Path) -> Result<Vec<PathBuf>> {
    let raw = read_series(&args.input, &args.select)?;
    let reference = read_series(&args.reference, &args.select)?;
    if raw.steps != reference.steps {
        return Err(Error::config("--reference", "steps differ from the raw series"));
    }
    let values = mitigate(&raw.mean, &reference.mean)?;
    let path = dir.join("mitigated.csv");
    write_csv_file(&path, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["step", "observable", "region", "mean", "stderr", "valid"])?;
        for (i, v) in values.iter().enumerate() {
            let (mean, err) = match v {
                Some(m) => (sig17(*m), sig17(raw.stderr[i] / reference.mean[i].abs())),
                None => (String::new(), String::new()),
            };
            w.write_record([
                raw.steps[i].to_string(),
                raw.observable.clone(),
                raw.region.clone(),
                mean,
                err,
                v.is_some().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("mitigated csv", e))
    })?;
    Ok(vec![path])
}

/// Execute one parsed command line. Returns what to print on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let work = || -> Result<String> {
        let (name, outputs, extra) = match &cli.command {
            Command::Simulate => ("simulate", simulate(&config_of(cli)?, false)?, None),
            Command::Otoc => ("otoc", simulate(&config_of(cli)?, true)?, None),
            Command::TheoryCheck => ("theory-check", theory_check(&plain_out(cli))?, None),
            Command::Fit(a) => ("fit", fit(a, &plain_out(cli))?, None),
            Command::Mitigate(a) => ("mitigate", mitigate_cmd(a, &plain_out(cli))?, None),
            Command::EmitCircuit => ("emit-circuit", emit_circuit(&config_of(cli)?)?, None),
            Command::Presets => {
                let (table, outputs) = presets(cli.out.as_deref())?;
                ("presets", outputs, Some(table))
            }
        };
        let report = serde_json::to_string(&Report {
            command: name,
            outputs,
        })?;
        Ok(match extra {
            Some(t) => format!("{t}{report}"),
            None => report,
        })
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config("--threads", e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Parse `args`, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": "usage", "message": e.to_string().trim_end()})
            );
            return 2;
        }
    };
    match run(&cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            1
        }
    }
}
