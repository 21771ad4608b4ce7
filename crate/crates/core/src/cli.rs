//! The `fkr` command-line driver.
//!
//! Every command reads a JSON config (unknown keys rejected), writes its
//! outputs into `--out`, and stamps each file with the same provenance: the
//! SHA-256 of the canonicalised config, the seed and the crate version.
//! Exit codes: 0 success, 2 configuration error, 3 resource cap, 4 violated
//! invariant, 1 anything else.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::bounds::{self, PolymerInputs};
use crate::error::{Error, Result};
use crate::interface::{
    degeneracy_bounds_check, enumerate_tilings, random_tiling, PlaneVertex, RConfiguration, Region, Tiling,
};
use crate::lattice::{BoundaryCondition, Site, SpinConfiguration, Volume};
use crate::model::{excess_energy, extract_contours, Connectivity, Hamiltonian, ModelCoefficients};
use crate::quantum::{extract_couplings, verify_decay, CouplingTable, FkParameters};
use crate::rcontour::{decompose, dobrushin_remove, report};
use crate::sampler::{self, RunSpec};
use crate::svg;

#[derive(Parser, Debug)]
#[command(name = "fkr", version, about = "Interface rigidity toolkit for the strong-coupling Falicov-Kimball model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed; overrides any seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact effective Hamiltonian and its multi-site couplings.
    Heff(Common),
    /// Enumerate the rhombus tilings of a region.
    Tilings(Common),
    /// Metropolis runs of the classical model.
    Mc(Common),
    /// Constant chains of the convergence bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Render a rhombus configuration with its contours.
    Render(Common),
    /// Energies and contours of a spin configuration given by flipped sites.
    Energy(Common),
}

#[derive(Subcommand, Debug)]
pub enum BoundsCommand {
    Polymer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
    },
    Cj {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long = "U")]
        u: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
    B0 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    Audit(Common),
}

/// Provenance stamped on every output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &str, config: &Value, seed: u64) -> Self {
        // serde_json maps are ordered, so this serialisation is canonical.
        let bytes = serde_json::to_vec(config).expect("value serialises");
        let hash = Sha256::digest(&bytes);
        Provenance {
            tool: "fkr".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: format!("{hash:x}"),
            seed,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} command={} config_hash={} seed={}",
            self.tool, self.version, self.command, self.config_hash, self.seed
        )
    }
}

struct Out {
    dir: PathBuf,
    prov: Provenance,
    written: Vec<String>,
}

impl Out {
    fn new(dir: &Path, prov: Provenance) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Out { dir: dir.to_path_buf(), prov, written: vec![] })
    }

    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            provenance: &'a Provenance,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut s = serde_json::to_string_pretty(&Doc { provenance: &self.prov, body })?;
        s.push('\n');
        self.write(name, &s)
    }

    fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(vec![]);
        w.write_record(header).map_err(|e| Error::Invalid(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?)
            .expect("csv is utf-8");
        self.write(name, &format!("# {}\n{body}", self.prov.line()))
    }

    fn svg(&mut self, name: &str, f: impl FnOnce(&str) -> String) -> Result<()> {
        let s = f(&self.prov.line());
        self.write(name, &s)
    }

    fn write(&mut self, name: &str, s: &str) -> Result<()> {
        fs::write(self.dir.join(name), s)?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn read_config(path: &Option<PathBuf>) -> Result<Value> {
    let p = path.as_ref().ok_or_else(|| Error::Invalid("--config is required".into()))?;
    let text = fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("config: {e}")))
}

fn f(x: f64) -> String {
    format!("{x:.12e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

// ---------------------------------------------------------------- heff

fn default_t() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeffConfig {
    #[serde(rename = "U")]
    pub u: f64,
    /// Defaults to `10 U`.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_t")]
    pub t: f64,
    /// Smallest site and box dimensions.
    pub lo: [i64; 3],
    pub dims: [usize; 3],
    /// Sites whose spins vary; defaults to the whole box.
    #[serde(default)]
    pub window: Option<Vec<[i64; 3]>>,
    #[serde(default = "default_max_g")]
    pub max_g: u32,
    /// Decay template `c̃2 (c1/U)^g` for the audit.
    #[serde(default = "default_c2t")]
    pub c2_tilde: f64,
    #[serde(default = "default_c1u")]
    pub c1_over_u: Option<f64>,
}

fn default_max_g() -> u32 {
    4
}
fn default_c2t() -> f64 {
    1.0
}
fn default_c1u() -> Option<f64> {
    None
}

fn cmd_heff(c: &Common) -> Result<Vec<String>> {
    let v = read_config(&c.config)?;
    let cfg: HeffConfig = parse(&v)?;
    if !(cfg.u > 0.0) {
        return Err(Error::Invalid("U must be positive".into()));
    }
    let beta = cfg.beta.unwrap_or(10.0 * cfg.u);
    let params = FkParameters { u: cfg.u, t: cfg.t, mu_e: cfg.u, mu_i: cfg.u, beta };
    let vol = Volume::with_lo(cfg.lo, cfg.dims, 0);
    let window: Option<Vec<Site>> = cfg.window.as_ref().map(|w| w.iter().map(|k| Site { k: *k }).collect());
    let table = extract_couplings(&vol, window.as_deref(), &params, cfg.max_g)?;
    let decay = verify_decay(&table);
    // Default template: the fitted ratio, floored at 1/U.
    let c1u = cfg.c1_over_u.unwrap_or_else(|| (decay.fitted_c / cfg.u).max(1.0 / cfg.u).min(0.999));
    let audit = bounds::decay_audit(&table, cfg.c2_tilde, c1u);
    let mut out = Out::new(&c.out, Provenance::new("heff", &v, c.seed.unwrap_or(0)))?;
    out.json("couplings.json", &table)?;
    #[derive(Serialize)]
    struct Audit<'a> {
        decay: &'a crate::quantum::DecayReport,
        audit: &'a bounds::DecayAudit,
        passed: bool,
    }
    out.json("decay_audit.json", &Audit { decay: &decay, audit: &audit, passed: audit.passed() })?;
    Ok(out.written)
}

// ------------------------------------------------------------- tilings

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Hexagon(u32),
    Type0Patch(u32),
}

impl RegionSpec {
    pub fn build(&self) -> Region {
        match self {
            RegionSpec::Hexagon(s) => Region::hexagon(*s),
            RegionSpec::Type0Patch(r) => Region::type0_patch(*r),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilingsConfig {
    pub region: RegionSpec,
    #[serde(default)]
    pub render: bool,
    /// Also rank the tilings by fourth-order energy at this `U`.
    #[serde(default, rename = "U")]
    pub u: Option<f64>,
}

fn cmd_tilings(c: &Common) -> Result<Vec<String>> {
    let v = read_config(&c.config)?;
    let cfg: TilingsConfig = parse(&v)?;
    let region = cfg.region.build();
    let tilings = enumerate_tilings(&region)?;
    let bounds = degeneracy_bounds_check(&region)?;
    let mut out = Out::new(&c.out, Provenance::new("tilings", &v, c.seed.unwrap_or(0)))?;
    let energies: Option<Vec<f64>> = match cfg.u {
        Some(u) => {
            let k = ModelCoefficients::new(u);
            Some(tilings.iter().map(|t| tiling_h4_energy(t, &k)).collect::<Result<Vec<_>>>()?)
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        triangles: usize,
        count: usize,
        bounds: &'a crate::interface::DegeneracyReport,
        energies: &'a Option<Vec<f64>>,
        tilings: Vec<Vec<[i64; 3]>>,
    }
    let list = tilings
        .iter()
        .map(|t| t.rhombi.iter().map(|r| [r.base.a, r.base.b, r.orient as i64]).collect())
        .collect();
    out.json(
        "tilings.json",
        &Summary { triangles: region.len(), count: tilings.len(), bounds: &bounds, energies: &energies, tilings: list },
    )?;
    if cfg.render {
        for (i, t) in tilings.iter().enumerate() {
            out.svg(&format!("tiling_{i:04}.svg"), |h| svg::tiling_svg(&t.rhombi, h))?;
        }
    }
    Ok(out.written)
}

/// Excess fourth-order energy of a tiling, evaluated on its lift: the spins
/// of a box around the lifted interface, sites above it `+`.
pub fn tiling_h4_energy(t: &Tiling, k: &ModelCoefficients) -> Result<f64> {
    let cfg = lift_to_spins(t)?;
    Ok(excess_energy(&cfg, Hamiltonian::H4, k))
}

/// Spin configuration under 111 conditions whose pinned interface is the
/// lift of `t`, with the staircase outside the region. Site `k` is minus
/// exactly when the top corner of its cube lies on or below the surface.
pub fn lift_to_spins(t: &Tiling) -> Result<SpinConfiguration> {
    let region = t.region();
    let mut h = crate::interface::height_function(t, None)?;
    let boundary: BTreeSet<PlaneVertex> = region
        .triangles
        .iter()
        .flat_map(|x| x.neighbours().into_iter().filter(|n| !region.contains(n)).flat_map(move |n| {
            let shared = x.shared_edge(&n).expect("neighbours share an edge");
            [shared.from, shared.to]
        }))
        .collect();
    let offsets: BTreeSet<i64> = boundary.iter().map(|v| v.staircase_height() - h[v]).collect();
    if offsets.len() != 1 {
        return Err(Error::Invalid("region boundary does not match the staircase".into()));
    }
    let off = *offsets.iter().next().unwrap();
    for x in h.values_mut() {
        *x += off;
    }
    let reach = h.iter().map(|(v, x)| v.a.abs().max(v.b.abs()).max(x.abs())).max().unwrap_or(0) as usize + 3;
    let n = 2 * reach + 1;
    let vol = Volume::centered([n, n, n], 2);
    let cfg = SpinConfiguration::from_fn(vol, BoundaryCondition::Bc111, |s| {
        let v = crate::interface::project_point(s.k);
        let top = h.get(&v).copied().unwrap_or_else(|| v.staircase_height());
        if s.ksum() + 3 <= top {
            -1
        } else {
            1
        }
    });
    let faces = sampler::pinned_interface(&cfg);
    let rc = RConfiguration::new(faces, vec![])?;
    let want: BTreeSet<_> = t.rhombi.iter().copied().collect();
    let got: BTreeSet<_> =
        rc.rhombi.iter().copied().filter(|r| r.triangles().iter().all(|x| region.contains(x))).collect();
    if got != want {
        return Err(Error::Invariant("lifted spins do not reproduce the tiling".into()));
    }
    Ok(cfg)
}

// ------------------------------------------------------------------ mc

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub run: RunSpec,
    #[serde(default)]
    pub snapshot: bool,
}

fn cmd_mc(c: &Common) -> Result<Vec<String>> {
    let v = read_config(&c.config)?;
    let mut cfg: McConfig = parse(&v)?;
    if let Some(s) = c.seed {
        cfg.run.seed = s;
    }
    cfg.run.validate()?;
    let series = sampler::mc_run(&cfg.run)?;
    let summary = sampler::summarize(&series);
    let mut out = Out::new(&c.out, Provenance::new("mc", &v, cfg.run.seed))?;
    let header: Vec<String> =
        ["sweep", "energy", "width", "good_pair_fraction", "overlapping", "magnetization"].map(String::from).to_vec();
    for s in &series {
        let rows: Vec<Vec<String>> = s
            .records
            .iter()
            .map(|r| {
                vec![
                    r.sweep.to_string(),
                    f(r.energy),
                    opt(r.width),
                    opt(r.good_pair_fraction),
                    r.overlapping.to_string(),
                    f(r.magnetization),
                ]
            })
            .collect();
        out.csv(&format!("series_r{:02}.csv", s.replica), &header, &rows)?;
    }
    let mut ph = vec!["layer".to_string(), "mean".to_string()];
    ph.extend(series.iter().map(|s| format!("r{:02}", s.replica)));
    let per_replica: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            let n = s.records.len().max(1) as f64;
            (0..s.layers.len()).map(|l| s.records.iter().map(|r| r.profile[l]).sum::<f64>() / n).collect()
        })
        .collect();
    let rows: Vec<Vec<String>> = summary
        .layers
        .iter()
        .enumerate()
        .map(|(l, layer)| {
            let mut row = vec![layer.to_string(), f(summary.profile[l])];
            row.extend(per_replica.iter().map(|p| f(p[l])));
            row
        })
        .collect();
    out.csv("profile.csv", &ph, &rows)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        spec: &'a RunSpec,
        summary: &'a sampler::Summary,
    }
    out.json("summary.json", &Doc { spec: &cfg.run, summary: &summary })?;
    if cfg.snapshot {
        for s in &series {
            let Some(fc) = &s.final_config else { continue };
            let name = format!("snapshot_r{:02}.svg", s.replica);
            if fc.bc == BoundaryCondition::Bc111 {
                let rc = RConfiguration::new(sampler::pinned_interface(fc), vec![])?;
                out.svg(&name, |h| svg::rconfig_svg(&rc, None, h))?;
            } else {
                out.svg(&name, |h| svg::slice_svg(fc, 1, 0, h))?;
            }
        }
    }
    Ok(out.written)
}

// -------------------------------------------------------------- bounds

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CjInputs {
    #[serde(default = "three")]
    pub d: u32,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub beta: f64,
    #[serde(default = "half")]
    pub c: f64,
}

fn three() -> u32 {
    3
}
fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct B0Inputs {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditInputs {
    /// Path to a `couplings.json` written by `heff`.
    pub couplings: PathBuf,
    pub c2_tilde: f64,
    pub c1_over_u: f64,
}

/// Merges command-line overrides into a (possibly absent) config object.
fn merged(config: &Option<PathBuf>, overrides: &[(&str, Option<Value>)]) -> Result<Value> {
    let mut v = match config {
        Some(_) => read_config(config)?,
        None => Value::Object(Default::default()),
    };
    let obj = v.as_object_mut().ok_or_else(|| Error::Invalid("config must be a JSON object".into()))?;
    for (k, x) in overrides {
        if let Some(x) = x {
            obj.insert(k.to_string(), x.clone());
        }
    }
    Ok(v)
}

fn num(x: Option<f64>) -> Option<Value> {
    x.map(|x| serde_json::json!(x))
}

fn cmd_bounds(b: &BoundsCommand) -> Result<Vec<String>> {
    match b {
        BoundsCommand::Polymer { common, c1, c2, lambda, b, a } => {
            let v = merged(&common.config, &[("C1", num(*c1)), ("C2", num(*c2)), ("lambda", num(*lambda)), ("b", num(*b)), ("a", num(*a))])?;
            let p: PolymerInputs = parse(&v)?;
            let r = bounds::polymer_report(&p)?;
            let mut out = Out::new(&common.out, Provenance::new("bounds polymer", &v, common.seed.unwrap_or(0)))?;
            out.json("polymer.json", &r)?;
            Ok(out.written)
        }
        BoundsCommand::Cj { common, d, t, u, beta, c } => {
            let v = merged(
                &common.config,
                &[("d", d.map(|d| serde_json::json!(d))), ("t", num(*t)), ("U", num(*u)), ("beta", num(*beta)), ("c", num(*c))],
            )?;
            let p: CjInputs = parse(&v)?;
            let r = bounds::cj_sequence(p.d, p.t, p.u, p.beta, p.c)?;
            let mut out = Out::new(&common.out, Provenance::new("bounds cj", &v, common.seed.unwrap_or(0)))?;
            out.json("cj.json", &r)?;
            Ok(out.written)
        }
        BoundsCommand::B0 { common, c1, c2, lambda } => {
            let v = merged(&common.config, &[("C1", num(*c1)), ("C2", num(*c2)), ("lambda", num(*lambda))])?;
            let p: B0Inputs = parse(&v)?;
            let r = bounds::find_b0(p.c1, p.c2, p.lambda)?;
            let mut out = Out::new(&common.out, Provenance::new("bounds b0", &v, common.seed.unwrap_or(0)))?;
            out.json("b0.json", &r)?;
            Ok(out.written)
        }
        BoundsCommand::Audit(common) => {
            let v = read_config(&common.config)?;
            let p: AuditInputs = parse(&v)?;
            let text = fs::read_to_string(&p.couplings)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.couplings.display())))?;
            let table: CouplingTable = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("couplings: {e}")))?;
            let r = bounds::decay_audit(&table, p.c2_tilde, p.c1_over_u);
            let mut out = Out::new(&common.out, Provenance::new("bounds audit", &v, common.seed.unwrap_or(0)))?;
            out.json("audit.json", &r)?;
            Ok(out.written)
        }
    }
}

// -------------------------------------------------------------- render

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TilingSource {
    Uniform(u8),
    /// Position in the enumeration order.
    Index(usize),
    /// Random height flips from the staircase.
    Random { steps: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    pub region: RegionSpec,
    pub tiling: TilingSource,
    #[serde(default = "yes")]
    pub decompose: bool,
    /// Also render the configuration with this contour removed.
    #[serde(default)]
    pub remove: Option<usize>,
    #[serde(default = "eight", rename = "U")]
    pub u: f64,
}

fn yes() -> bool {
    true
}
fn eight() -> f64 {
    8.0
}

pub fn build_tiling(region: &Region, src: &TilingSource, seed: u64) -> Result<Tiling> {
    use rand::SeedableRng;
    match src {
        TilingSource::Uniform(tau) => Tiling::uniform(region, *tau),
        TilingSource::Index(i) => enumerate_tilings(region)?
            .into_iter()
            .nth(*i)
            .ok_or_else(|| Error::Invalid(format!("tiling index {i} out of range"))),
        TilingSource::Random { steps } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            random_tiling(region, *steps, &mut rng)
        }
    }
}

fn cmd_render(c: &Common) -> Result<Vec<String>> {
    let v = read_config(&c.config)?;
    let cfg: RenderConfig = parse(&v)?;
    let seed = c.seed.unwrap_or(0);
    let region = cfg.region.build();
    let tiling = build_tiling(&region, &cfg.tiling, seed)?;
    let rc = RConfiguration::from_tiling(&tiling)?;
    let dec = decompose(&rc);
    let k = ModelCoefficients::new(cfg.u);
    let mut out = Out::new(&c.out, Provenance::new("render", &v, seed))?;
    out.svg("render.svg", |h| svg::rconfig_svg(&rc, cfg.decompose.then_some(&dec), h))?;
    if cfg.decompose {
        out.json("decomposition.json", &report(&dec, &k))?;
    }
    if let Some(i) = cfg.remove {
        let r = dobrushin_remove(&rc, &dec, i)?;
        let d2 = decompose(&r.config);
        out.svg("removed.svg", |h| svg::rconfig_svg(&r.config, Some(&d2), h))?;
        out.json("removed.json", &report(&d2, &k))?;
    }
    Ok(out.written)
}

// -------------------------------------------------------------- energy

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    #[serde(rename = "U")]
    pub u: f64,
    pub dims: [usize; 3],
    pub bc: BoundaryCondition,
    /// Sites flipped away from the ground state.
    #[serde(default)]
    pub flips: Vec<[i64; 3]>,
}

fn cmd_energy(c: &Common) -> Result<Vec<String>> {
    let v = read_config(&c.config)?;
    let cfg: EnergyConfig = parse(&v)?;
    if !(cfg.u > 0.0) {
        return Err(Error::Invalid("U must be positive".into()));
    }
    let vol = Volume::centered(cfg.dims, 2);
    let mut spins = SpinConfiguration::ground_state(vol, cfg.bc);
    for k in &cfg.flips {
        if !spins.flip(Site { k: *k }) {
            return Err(Error::Invalid(format!("site {k:?} is outside the volume")));
        }
    }
    let k = ModelCoefficients::new(cfg.u);
    let contours = extract_contours(&spins, Connectivity::Edge);
    #[derive(Serialize)]
    struct Doc {
        h2_excess: f64,
        h4_excess: f64,
        contour_areas: Vec<usize>,
        pinned: Vec<bool>,
    }
    let doc = Doc {
        h2_excess: excess_energy(&spins, Hamiltonian::H2, &k),
        h4_excess: excess_energy(&spins, Hamiltonian::H4, &k),
        contour_areas: contours.iter().map(|c| c.area()).collect(),
        pinned: contours.iter().map(|c| c.pinned).collect(),
    };
    let mut out = Out::new(&c.out, Provenance::new("energy", &v, c.seed.unwrap_or(0)))?;
    out.json("energy.json", &doc)?;
    Ok(out.written)
}

// ---------------------------------------------------------------- main

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) | Error::Json(_) => 2,
        Error::Cap(_) => 3,
        Error::Invariant(_) | Error::Overlap(_) => 4,
        Error::Numeric(_) | Error::Io(_) => 1,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Invalid(_) | Error::Json(_) => "config",
        Error::Cap(_) => "cap",
        Error::Invariant(_) | Error::Overlap(_) => "invariant",
        Error::Numeric(_) => "numeric",
        Error::Io(_) => "io",
    }
}

pub fn run(cli: &Cli) -> Result<Vec<String>> {
    if let Ok(n) = std::env::var("FKR_THREADS") {
        let n: usize = n.parse().map_err(|_| Error::Invalid(format!("FKR_THREADS={n} is not a count")))?;
        // A second initialisation in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Heff(c) => cmd_heff(c),
        Command::Tilings(c) => cmd_tilings(c),
        Command::Mc(c) => cmd_mc(c),
        Command::Bounds { which } => cmd_bounds(which),
        Command::Render(c) => cmd_render(c),
        Command::Energy(c) => cmd_energy(c),
    }
}

/// Parses arguments, runs, reports; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            let doc = serde_json::json!({ "error": kind(&e), "message": e.to_string() });
            eprintln!("{doc}");
            exit_code(&e)
        }
    }
}
