//! Run configuration documents.
//!
//! A document is a JSON object with the keys below; unknown keys are
//! rejected and every error names the offending key.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `lattice` | preset name, builder expression or inline lattice object | required |
//! | `model` | `"Ising"` or `"CZ"` | `"Ising"` |
//! | `theta_x`, `theta_J` | radians, or strings such as `"0.95pi"` | `theta_J = -pi/2` |
//! | `p` | sign-flip probability per gate | `0` |
//! | `n_steps` | number of Floquet steps | required |
//! | `n_traj` | trajectories | `200` |
//! | `seed` | master seed | `0` |
//! | `observables` | `"z_avg"`, `{"snapshot": [steps]}`, `{"otoc": {"j": 3, "k": 16}}` | `["z_avg"]` |
//! | `regions` | `"all"`, `"boundary"`, `"bulk"`, `"pumped"`, `"unpumped"` or `{"name", "sites"}` | `["all"]` |
//! | `output_dir` | where outputs go | `"."` |
//! | `n_shots` | emulate this many measurement shots per step | off |
//! | `m_cnot` | entangling gates per bond for gate counts | `3` |
//! | `ancilla` | `per_edge`, `kagome_triangles` or `lieb_midpoints` | the preset's own |
//!
//! A run manifest is also accepted: its `config` member is used.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::circuit::{FloquetParams, Model};
use crate::ensemble::{EnsembleSpec, Observable};
use crate::error::{Error, Result};
use crate::lattice::{build_preset, AncillaStrategy, Lattice, LatticeDocument, Region};

/// Key that marks a document as a run manifest.
pub const MANIFEST_KEY: &str = "manifest_version";

#[derive(Clone, Debug, PartialEq)]
pub enum LatticeSpec {
    Named(String),
    Inline(LatticeDocument),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec {
    ZAverage,
    Snapshot(Vec<usize>),
    Otoc { j: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    Named(String),
    Sites { name: String, sites: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    pub model: Model,
    pub theta_x: f64,
    pub theta_j: f64,
    pub p: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
    pub observables: Vec<ObservableSpec>,
    pub regions: Vec<RegionSpec>,
    pub output_dir: PathBuf,
    pub n_shots: Option<usize>,
    pub m_cnot: u32,
    pub ancilla: Option<AncillaStrategy>,
}

/// Parse an angle: a JSON number in radians, or a string holding radians,
/// `"<x>pi"`, `"pi"`, `"-pi/2"` or `"<x>pi/<d>"`.
pub fn parse_angle(field: &str, value: &Value) -> Result<f64> {
    let bad = |why: &str| Error::config(field, why.to_string());
    let angle = match value {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad("not a finite number"))?,
        Value::String(s) => {
            let t = s.trim().replace('π', "pi");
            match t.split_once("pi") {
                None => t
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("`{s}` is not an angle")))?,
                Some((coef, rest)) => {
                    let coef = match coef.trim().trim_end_matches('*') {
                        "" | "+" => 1.0,
                        "-" => -1.0,
                        c => c
                            .parse::<f64>()
                            .map_err(|_| bad(&format!("`{s}` is not an angle")))?,
                    };
                    let div = match rest.trim() {
                        "" => 1.0,
                        r => r
                            .strip_prefix('/')
                            .and_then(|d| d.trim().parse::<f64>().ok())
                            .filter(|d| *d != 0.0)
                            .ok_or_else(|| bad(&format!("`{s}` is not an angle")))?,
                    };
                    coef * PI / div
                }
            }
        }
        _ => return Err(bad("expected a number or a string such as \"0.9pi\"")),
    };
    if !angle.is_finite() {
        return Err(bad("angle must be finite"));
    }
    Ok(angle)
}

fn as_count(field: &str, v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::config(field, "expected a non-negative integer"))
}

fn as_str<'a>(field: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::config(field, "expected a string"))
}

fn parse_observable(v: &Value) -> Result<ObservableSpec> {
    const FIELD: &str = "observables";
    match v {
        Value::String(s) if s == "z_avg" => Ok(ObservableSpec::ZAverage),
        Value::Object(m) if m.len() == 1 => {
            let (key, body) = m.iter().next().expect("one entry");
            match key.as_str() {
                "snapshot" => {
                    let steps = body
                        .as_array()
                        .ok_or_else(|| Error::config(FIELD, "snapshot expects a list of steps"))?
                        .iter()
                        .map(|s| as_count(FIELD, s))
                        .collect::<Result<_>>()?;
                    Ok(ObservableSpec::Snapshot(steps))
                }
                "otoc" => {
                    let obj = body
                        .as_object()
                        .filter(|o| o.len() == 2)
                        .ok_or_else(|| Error::config(FIELD, "otoc expects {\"j\": site, \"k\": site}"))?;
                    let site = |name: &str| {
                        obj.get(name)
                            .ok_or_else(|| Error::config(FIELD, format!("otoc is missing `{name}`")))
                            .and_then(|x| as_count(FIELD, x))
                    };
                    Ok(ObservableSpec::Otoc {
                        j: site("j")?,
                        k: site("k")?,
                    })
                }
                other => Err(Error::config(FIELD, format!("unknown observable `{other}`"))),
            }
        }
        other => Err(Error::config(FIELD, format!("unknown observable {other}"))),
    }
}

fn parse_region(v: &Value) -> Result<RegionSpec> {
    const FIELD: &str = "regions";
    match v {
        Value::String(s) => Ok(RegionSpec::Named(s.clone())),
        Value::Object(m) => {
            if let Some(k) = m.keys().find(|k| *k != "name" && *k != "sites") {
                return Err(Error::config(FIELD, format!("unknown region key `{k}`")));
            }
            let name = m
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::config(FIELD, "custom region needs a `name`"))?;
            let sites = m
                .get("sites")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::config(FIELD, "custom region needs a `sites` list"))?
                .iter()
                .map(|s| as_count(FIELD, s))
                .collect::<Result<_>>()?;
            Ok(RegionSpec::Sites {
                name: name.to_string(),
                sites,
            })
        }
        other => Err(Error::config(FIELD, format!("unknown region {other}"))),
    }
}

fn list<T>(field: &str, v: &Value, item: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| Error::config(field, "expected a list"))?
        .iter()
        .map(item)
        .collect()
}

/// Parse and validate a configuration (or manifest) document.
pub fn parse_config(document: &Value) -> Result<RunConfig> {
    let obj = document
        .as_object()
        .ok_or_else(|| Error::config("<document>", "expected a JSON object"))?;
    if obj.contains_key(MANIFEST_KEY) {
        let inner = obj
            .get("config")
            .ok_or_else(|| Error::config("config", "manifest has no `config` member"))?;
        return parse_config(inner);
    }
    let mut lattice = None;
    let mut cfg = RunConfig {
        lattice: LatticeSpec::Named(String::new()),
        model: Model::Ising,
        theta_x: f64::NAN,
        theta_j: FloquetParams::DEFAULT_THETA_J,
        p: 0.0,
        n_steps: 0,
        n_traj: 200,
        seed: 0,
        observables: vec![ObservableSpec::ZAverage],
        regions: vec![RegionSpec::Named("all".into())],
        output_dir: PathBuf::from("."),
        n_shots: None,
        m_cnot: 3,
        ancilla: None,
    };
    let (mut has_theta_x, mut has_steps) = (false, false);
    for (key, v) in obj {
        match key.as_str() {
            "lattice" => {
                lattice = Some(match v {
                    Value::String(s) => LatticeSpec::Named(s.clone()),
                    Value::Object(_) => LatticeSpec::Inline(
                        serde_json::from_value(v.clone()).map_err(|e| Error::config(key, e.to_string()))?,
                    ),
                    _ => return Err(Error::config(key, "expected a preset name or a lattice object")),
                })
            }
            "model" => cfg.model = as_str(key, v)?.parse()?,
            "theta_x" => {
                cfg.theta_x = parse_angle(key, v)?;
                has_theta_x = true;
            }
            "theta_J" => cfg.theta_j = parse_angle(key, v)?,
            "p" => {
                cfg.p = v
                    .as_f64()
                    .filter(|p| (0.0..=1.0).contains(p))
                    .ok_or_else(|| Error::config(key, "expected a probability in [0, 1]"))?
            }
            "n_steps" => {
                cfg.n_steps = as_count(key, v)?;
                if cfg.n_steps == 0 {
                    return Err(Error::config(key, "must be at least 1"));
                }
                has_steps = true;
            }
            "n_traj" => {
                cfg.n_traj = as_count(key, v)?;
                if cfg.n_traj == 0 {
                    return Err(Error::config(key, "must be at least 1"));
                }
            }
            "seed" => cfg.seed = v.as_u64().ok_or_else(|| Error::config(key, "expected a u64"))?,
            "observables" => cfg.observables = list(key, v, parse_observable)?,
            "regions" => cfg.regions = list(key, v, parse_region)?,
            "output_dir" => cfg.output_dir = PathBuf::from(as_str(key, v)?),
            "n_shots" => {
                cfg.n_shots = match v {
                    Value::Null => None,
                    _ => match as_count(key, v)? {
                        0 => return Err(Error::config(key, "must be positive")),
                        n => Some(n),
                    },
                }
            }
            "m_cnot" => {
                cfg.m_cnot = v
                    .as_u64()
                    .filter(|&m| m == 3 || m == 4)
                    .ok_or_else(|| Error::config(key, "expected 3 or 4"))? as u32
            }
            "ancilla" => cfg.ancilla = Some(as_str(key, v)?.parse()?),
            other => return Err(Error::config(other, "unknown key")),
        }
    }
    cfg.lattice = lattice.ok_or_else(|| Error::config("lattice", "missing"))?;
    if !has_theta_x {
        return Err(Error::config("theta_x", "missing"));
    }
    if !has_steps {
        return Err(Error::config("n_steps", "missing"));
    }
    if cfg.observables.is_empty() {
        return Err(Error::config("observables", "list is empty"));
    }
    if cfg.regions.is_empty() {
        return Err(Error::config("regions", "list is empty"));
    }
    Ok(cfg)
}

/// Read a configuration or manifest file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&serde_json::from_str(&text)?)
}

impl RunConfig {
    pub fn params(&self) -> FloquetParams {
        FloquetParams {
            model: self.model,
            theta_x: self.theta_x,
            theta_j: self.theta_j,
        }
    }

    pub fn build_lattice(&self) -> Result<Lattice> {
        let lattice = match &self.lattice {
            LatticeSpec::Named(name) => build_preset(name)?,
            LatticeSpec::Inline(doc) => doc.clone().into_lattice()?,
        };
        match self.ancilla {
            Some(s) => lattice.with_ancillas(s),
            None => Ok(lattice),
        }
    }

    pub fn resolve_regions(&self, lattice: &Lattice) -> Result<Vec<Region>> {
        self.regions
            .iter()
            .map(|r| {
                let region = match r {
                    RegionSpec::Named(n) => lattice.region(n)?,
                    RegionSpec::Sites { name, sites } => Region::new(name.clone(), sites.clone()),
                };
                lattice.check_region(&region)?;
                Ok(region)
            })
            .collect()
    }

    /// Observables for the ensemble runner; `z_avg` expands over every region.
    pub fn resolve_observables(&self, lattice: &Lattice) -> Result<Vec<Observable>> {
        let regions = self.resolve_regions(lattice)?;
        let mut out = Vec::new();
        for o in &self.observables {
            match o {
                ObservableSpec::ZAverage => out.extend(regions.iter().cloned().map(Observable::ZAverage)),
                ObservableSpec::Snapshot(steps) => out.push(Observable::Snapshot(steps.clone())),
                ObservableSpec::Otoc { j, k } => out.push(Observable::Otoc { j: *j, k: *k }),
            }
        }
        Ok(out)
    }

    pub fn ensemble_spec<'a>(&self, lattice: &'a Lattice) -> Result<EnsembleSpec<'a>> {
        Ok(EnsembleSpec {
            lattice,
            params: self.params(),
            p: self.p,
            n_steps: self.n_steps,
            n_traj: self.n_traj,
            observables: self.resolve_observables(lattice)?,
            seed: self.seed,
            n_shots: self.n_shots,
        })
    }

    /// Canonical document: angles in radians, every default spelled out.
    /// Parsing it yields the same configuration.
    pub fn to_document(&self) -> Value {
        let lattice = match &self.lattice {
            LatticeSpec::Named(n) => json!(n),
            LatticeSpec::Inline(doc) => serde_json::to_value(doc).expect("lattice documents serialise"),
        };
        let observables: Vec<Value> = self
            .observables
            .iter()
            .map(|o| match o {
                ObservableSpec::ZAverage => json!("z_avg"),
                ObservableSpec::Snapshot(s) => json!({ "snapshot": s }),
                ObservableSpec::Otoc { j, k } => json!({ "otoc": { "j": j, "k": k } }),
            })
            .collect();
        let regions: Vec<Value> = self
            .regions
            .iter()
            .map(|r| match r {
                RegionSpec::Named(n) => json!(n),
                RegionSpec::Sites { name, sites } => json!({ "name": name, "sites": sites }),
            })
            .collect();
        let mut m = Map::new();
        m.insert("lattice".into(), lattice);
        m.insert("model".into(), json!(self.model.name()));
        m.insert("theta_x".into(), json!(self.theta_x));
        m.insert("theta_J".into(), json!(self.theta_j));
        m.insert("p".into(), json!(self.p));
        m.insert("n_steps".into(), json!(self.n_steps));
        m.insert("n_traj".into(), json!(self.n_traj));
        m.insert("seed".into(), json!(self.seed));
        m.insert("observables".into(), Value::Array(observables));
        m.insert("regions".into(), Value::Array(regions));
        m.insert("output_dir".into(), json!(self.output_dir.to_string_lossy()));
        if let Some(n) = self.n_shots {
            m.insert("n_shots".into(), json!(n));
        }
        m.insert("m_cnot".into(), json!(self.m_cnot));
        if let Some(a) = self.ancilla {
            m.insert("ancilla".into(), json!(a.name()));
        }
        Value::Object(m)
    }
}
