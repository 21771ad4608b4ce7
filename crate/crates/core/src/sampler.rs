//! Metropolis sampling of the classical models and interface observables.
//!
//! A chain is single-threaded and seeded from `(seed, replica)`, so results
//! do not depend on how replicas are scheduled. Energy changes are computed
//! from precomputed stencils and audited against a full re-evaluation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::{interface_heights, PlaneVertex, RConfiguration};
use crate::lattice::{BoundaryCondition, Site, SpinConfiguration, Volume};
use crate::model::{
    extract_contours, relative_energy, Connectivity, Face, Hamiltonian, ModelCoefficients,
};

/// Proposal mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSet {
    /// Uniform single-site flips.
    SingleFlip,
    /// Half of the proposals draw the site from a fixed slab around the
    /// reference interface. A hexagon flip of the projected interface is a
    /// single cube toggle, so these are the hexagon flips when the drawn
    /// site sits on a flippable vertex.
    SingleFlipHexagon,
}

/// Initial interior state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// The boundary prescription continued inward.
    #[default]
    Ground,
    Plus,
    Minus,
}

fn one() -> usize {
    1
}
fn default_check() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub dims: [usize; 3],
    pub bc: BoundaryCondition,
    pub hamiltonian: Hamiltonian,
    #[serde(rename = "U")]
    pub u: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub thermalization: usize,
    #[serde(default)]
    pub seed: u64,
    pub moves: MoveSet,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default = "one")]
    pub replicas: usize,
    /// Sweeps between full energy re-evaluations.
    #[serde(default = "default_check")]
    pub check_every: usize,
    /// Half-width of the slab used by hexagon proposals.
    #[serde(default = "one")]
    pub slab: usize,
    #[serde(default)]
    pub start: Start,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.u > 0.0) || !self.u.is_finite() {
            return Err(Error::Invalid(format!("U must be positive, got {}", self.u)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.sweeps <= self.thermalization {
            return Err(Error::Invalid("sweeps must exceed thermalization".into()));
        }
        if self.dims.contains(&0) {
            return Err(Error::Invalid("empty volume".into()));
        }
        if self.stride == 0 || self.replicas == 0 || self.check_every == 0 {
            return Err(Error::Invalid("stride, replicas and check_every must be positive".into()));
        }
        Ok(())
    }

    pub fn volume(&self) -> Volume {
        Volume::centered(self.dims, 2)
    }
}

/// `min(1, e^{-βΔE})`.
pub fn acceptance_probability(de: f64, beta: f64) -> f64 {
    if de <= 0.0 || beta == 0.0 {
        1.0
    } else {
        (-beta * de).exp()
    }
}

/// Probability that one proposal moves `from` to `from` with `site` flipped,
/// under uniform site selection.
pub fn transition_probability(from: &SpinConfiguration, site: Site, h: Hamiltonian, k: &ModelCoefficients, beta: f64) -> f64 {
    let mut to = from.clone();
    to.flip(site);
    let de = relative_energy(&to, h, k) - relative_energy(from, h, k);
    acceptance_probability(de, beta) / from.volume.len() as f64
}

/// Extended-box indices of every term touching each interior site.
struct Stencil {
    sites: Vec<usize>,
    nn: Vec<[usize; 6]>,
    nnn: Vec<[usize; 12]>,
    d2: Vec<[usize; 6]>,
    plq: Vec<[[usize; 3]; 12]>,
}

impl Stencil {
    fn new(v: &Volume) -> Self {
        assert!(v.shell >= 2, "stencils reach distance 2");
        let idx = |s: Site| v.ext_index(s).expect("within shell");
        let unit = |a: usize, m: i64| {
            let mut d = [0i64; 3];
            d[a] = m;
            d
        };
        let mut st = Stencil { sites: vec![], nn: vec![], nnn: vec![], d2: vec![], plq: vec![] };
        for s in v.sites() {
            st.sites.push(idx(s));
            let mut nn = [0; 6];
            let mut d2 = [0; 6];
            for a in 0..3 {
                for (j, m) in [1i64, -1].into_iter().enumerate() {
                    nn[2 * a + j] = idx(s.offset(unit(a, m)));
                    d2[2 * a + j] = idx(s.offset(unit(a, 2 * m)));
                }
            }
            let mut nnn = [0; 12];
            let mut plq = [[0; 3]; 12];
            let mut n = 0;
            for a in 0..3 {
                for b in a + 1..3 {
                    for ma in [1i64, -1] {
                        for mb in [1i64, -1] {
                            let ea = unit(a, ma);
                            let eb = unit(b, mb);
                            let diag = s.offset(ea).offset(eb);
                            nnn[n] = idx(diag);
                            plq[n] = [idx(s.offset(ea)), idx(diag), idx(s.offset(eb))];
                            n += 1;
                        }
                    }
                }
            }
            st.nn.push(nn);
            st.d2.push(d2);
            st.nnn.push(nnn);
            st.plq.push(plq);
        }
        st
    }

    /// Energy change of flipping interior site `i`.
    fn delta(&self, spins: &[i8], i: usize, h: Hamiltonian, k: &ModelCoefficients) -> f64 {
        let s = i32::from(spins[self.sites[i]]);
        let sum = |ix: &[usize]| ix.iter().map(|&j| i32::from(spins[j])).sum::<i32>() * s;
        let nn = sum(&self.nn[i]) as f64;
        match h {
            Hamiltonian::H2 => 2.0 * k.j * nn,
            Hamiltonian::H4 => {
                let nnn = sum(&self.nnn[i]) as f64;
                let d2 = sum(&self.d2[i]) as f64;
                let plq: i32 = self.plq[i]
                    .iter()
                    .map(|p| s * p.iter().map(|&j| i32::from(spins[j])).product::<i32>())
                    .sum();
                2.0 * (k.c_nn * nn - k.c_nnn * nnn - k.c_2 * d2 - k.c_plq * plq as f64)
            }
        }
    }
}

/// Which family of lattice planes indexes the magnetization profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normal {
    /// Layers of constant `x3`.
    E3,
    /// Layers of constant `x1 + x2 + x3`.
    D111,
}

impl Normal {
    pub fn for_bc(bc: BoundaryCondition) -> Self {
        if bc == BoundaryCondition::Bc111 {
            Normal::D111
        } else {
            Normal::E3
        }
    }

    fn layer(self, s: Site) -> i64 {
        match self {
            Normal::E3 => s.k[2],
            Normal::D111 => s.ksum(),
        }
    }
}

/// Mean interior spin per layer, keyed by `k3` or `k1+k2+k3`.
pub fn layer_magnetization(config: &SpinConfiguration, normal: Normal) -> BTreeMap<i64, f64> {
    let mut acc: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
    for s in config.volume.sites() {
        let e = acc.entry(normal.layer(s)).or_default();
        e.0 += i64::from(config.get(s));
        e.1 += 1;
    }
    acc.into_iter().map(|(l, (m, n))| (l, m as f64 / n as f64)).collect()
}

/// Pinned interface faces with at least one site in the volume.
pub fn pinned_interface(config: &SpinConfiguration) -> Vec<Face> {
    extract_contours(config, Connectivity::Edge)
        .into_iter()
        .find(|c| c.pinned)
        .map(|c| c.faces)
        .unwrap_or_default()
}

fn shell_faces(config: &SpinConfiguration) -> Vec<Face> {
    let v = &config.volume;
    let mut out = Vec::new();
    for s in v.ext_sites() {
        for a in 0..3u8 {
            let f = Face::new(s, a);
            let (x, y) = f.sites();
            if !v.contains(x) && !v.contains(y) && v.contains_ext(y) && config.get(x) != config.get(y) {
                out.push(f);
            }
        }
    }
    out
}

/// Good-pair fraction of the pinned 111 interface, over edges shared by two
/// non-overlapping faces; `overlapping` flags a non-minimal interface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodPairs {
    pub fraction: f64,
    pub overlapping: bool,
}

pub fn good_pair_fraction(config: &SpinConfiguration) -> Result<Option<GoodPairs>> {
    if config.bc != BoundaryCondition::Bc111 {
        return Err(Error::Invalid("good-pair fraction needs the 111 boundary condition".into()));
    }
    let rc = RConfiguration::new(pinned_interface(config), shell_faces(config))?;
    Ok(rc
        .good_pair_fraction()
        .map(|fraction| GoodPairs { fraction, overlapping: !rc.is_minimal() }))
}

/// Excess roughness of the pinned interface: the standard deviation of the
/// height displacement from the ground state. Under 111 conditions heights
/// live on projected vertices; under 100 conditions on `(k1, k2)` columns.
pub fn interface_width(config: &SpinConfiguration) -> Option<f64> {
    let disp: Vec<f64> = match config.bc {
        BoundaryCondition::Bc111 => {
            let faces = pinned_interface(config);
            if faces.is_empty() {
                return None;
            }
            interface_heights(&faces)
                .into_iter()
                .map(|(v, h): (PlaneVertex, f64)| h - v.staircase_height() as f64)
                .collect()
        }
        BoundaryCondition::Bc100 => {
            let mut cols: BTreeMap<(i64, i64), f64> = BTreeMap::new();
            for s in config.volume.sites() {
                let s0 = if s.k[2] >= 0 { 1 } else { -1 };
                *cols.entry((s.k[0], s.k[1])).or_default() += f64::from(s0 - config.get(s)) / 2.0;
            }
            cols.into_values().collect()
        }
        _ => return None,
    };
    Some(std_dev(&disp))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn std_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

fn std_err(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / ((x.len() - 1) * x.len()) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub sweep: usize,
    /// Energy above the boundary-condition ground state.
    pub energy: f64,
    pub width: Option<f64>,
    pub good_pair_fraction: Option<f64>,
    pub overlapping: bool,
    pub magnetization: f64,
    pub profile: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub replica: usize,
    pub layers: Vec<i64>,
    pub records: Vec<Record>,
    pub proposed: u64,
    pub accepted: u64,
    /// Largest |accumulated - recomputed| energy seen at the checks.
    pub max_drift: f64,
    #[serde(skip)]
    pub final_config: Option<SpinConfiguration>,
}

impl ObservableSeries {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

fn slab_sites(v: &Volume, bc: BoundaryCondition, w: usize) -> Vec<usize> {
    let w = w as i64;
    v.sites()
        .enumerate()
        .filter(|(_, s)| match bc {
            // Reference planes sit between k·n = -1 and -2 (111) or k3 = 0 and -1 (100).
            BoundaryCondition::Bc111 => s.ksum() >= -2 - w && s.ksum() < w,
            BoundaryCondition::Bc100 => s.k[2] >= -1 - w && s.k[2] <= w,
            _ => true,
        })
        .map(|(i, _)| i)
        .collect()
}

fn observe(cfg: &SpinConfiguration, sweep: usize, energy: f64, normal: Normal) -> Result<Record> {
    let prof = layer_magnetization(cfg, normal);
    let gp = if cfg.bc == BoundaryCondition::Bc111 { good_pair_fraction(cfg)? } else { None };
    let total: f64 = cfg.volume.sites().map(|s| f64::from(cfg.get(s))).sum();
    Ok(Record {
        sweep,
        energy,
        width: interface_width(cfg),
        good_pair_fraction: gp.map(|g| g.fraction),
        overlapping: gp.is_some_and(|g| g.overlapping),
        magnetization: total / cfg.volume.len() as f64,
        profile: prof.into_values().collect(),
    })
}

/// One chain.
pub fn run_chain(spec: &RunSpec, replica: usize) -> Result<ObservableSeries> {
    spec.validate()?;
    let v = spec.volume();
    let k = ModelCoefficients::new(spec.u);
    let h = spec.hamiltonian;
    let mut cfg = match spec.start {
        Start::Ground => SpinConfiguration::ground_state(v.clone(), spec.bc),
        Start::Plus => SpinConfiguration::uniform(v.clone(), spec.bc, 1),
        Start::Minus => SpinConfiguration::uniform(v.clone(), spec.bc, -1),
    };
    let st = Stencil::new(&v);
    let slab = slab_sites(&v, spec.bc, spec.slab);
    let e0 = relative_energy(&SpinConfiguration::ground_state(v.clone(), spec.bc), h, &k);
    let mut energy = relative_energy(&cfg, h, &k);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replica as u64);
    let normal = Normal::for_bc(spec.bc);
    let layers: Vec<i64> = layer_magnetization(&cfg, normal).into_keys().collect();
    let n = v.len();
    let mut out = ObservableSeries {
        replica,
        layers,
        records: vec![],
        proposed: 0,
        accepted: 0,
        max_drift: 0.0,
        final_config: None,
    };
    for sweep in 1..=spec.sweeps {
        for _ in 0..n {
            let i = if spec.moves == MoveSet::SingleFlipHexagon && !slab.is_empty() && rng.gen_bool(0.5) {
                slab[rng.gen_range(0..slab.len())]
            } else {
                rng.gen_range(0..n)
            };
            let de = st.delta(cfg.raw(), i, h, &k);
            out.proposed += 1;
            let p = acceptance_probability(de, spec.beta);
            if p >= 1.0 || rng.gen::<f64>() < p {
                cfg.flip_index(st.sites[i]);
                energy += de;
                out.accepted += 1;
            }
        }
        if sweep % spec.check_every == 0 || sweep == spec.sweeps {
            let full = relative_energy(&cfg, h, &k);
            let drift = (full - energy).abs();
            out.max_drift = out.max_drift.max(drift);
            if drift > 1e-9 * (1.0 + full.abs()) {
                return Err(Error::Invariant(format!(
                    "energy bookkeeping drifted by {drift:e} at sweep {sweep}"
                )));
            }
            energy = full;
        }
        if sweep > spec.thermalization && (sweep - spec.thermalization).is_multiple_of(spec.stride) {
            out.records.push(observe(&cfg, sweep, energy - e0, normal)?);
        }
    }
    out.final_config = Some(cfg);
    Ok(out)
}

/// Runs all replicas of a spec in parallel; results are ordered by replica.
pub fn mc_run(spec: &RunSpec) -> Result<Vec<ObservableSeries>> {
    spec.validate()?;
    (0..spec.replicas).into_par_iter().map(|r| run_chain(spec, r)).collect()
}

/// Energy-trace stationarity: the means of the two halves of the series
/// agree within three combined standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stationarity {
    pub first: f64,
    pub second: f64,
    pub z: f64,
    pub stationary: bool,
}

pub fn stationarity(series: &[f64]) -> Option<Stationarity> {
    if series.len() < 4 {
        return None;
    }
    let (a, b) = series.split_at(series.len() / 2);
    let (ma, mb) = (mean(a), mean(b));
    let se = (std_err(a).powi(2) + std_err(b).powi(2)).sqrt();
    let z = if se > 0.0 { (ma - mb).abs() / se } else if ma == mb { 0.0 } else { f64::INFINITY };
    Some(Stationarity { first: ma, second: mb, z, stationary: z <= 3.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

fn estimate(x: &[f64]) -> Option<Estimate> {
    (!x.is_empty()).then(|| Estimate { mean: mean(x), stderr: std_err(x) })
}

/// Means over replicas of per-replica averages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub replicas: usize,
    pub records_per_replica: usize,
    pub energy: Option<Estimate>,
    pub width: Option<Estimate>,
    pub good_pair_fraction: Option<Estimate>,
    pub magnetization: Option<Estimate>,
    pub acceptance_rate: f64,
    pub layers: Vec<i64>,
    /// Per-layer mean magnetization averaged over replicas.
    pub profile: Vec<f64>,
    pub stationarity: Vec<Option<Stationarity>>,
    pub max_drift: f64,
}

pub fn summarize(series: &[ObservableSeries]) -> Summary {
    let per = |f: &dyn Fn(&Record) -> Option<f64>| -> Option<Estimate> {
        let means: Vec<f64> = series
            .iter()
            .filter_map(|s| {
                let v: Vec<f64> = s.records.iter().filter_map(f).collect();
                (!v.is_empty()).then(|| mean(&v))
            })
            .collect();
        estimate(&means)
    };
    let layers = series.first().map(|s| s.layers.clone()).unwrap_or_default();
    let mut profile = vec![0.0; layers.len()];
    let mut count = 0usize;
    for s in series {
        for r in &s.records {
            for (p, m) in profile.iter_mut().zip(&r.profile) {
                *p += m;
            }
            count += 1;
        }
    }
    if count > 0 {
        profile.iter_mut().for_each(|p| *p /= count as f64);
    }
    let proposed: u64 = series.iter().map(|s| s.proposed).sum();
    let accepted: u64 = series.iter().map(|s| s.accepted).sum();
    Summary {
        replicas: series.len(),
        records_per_replica: series.first().map_or(0, |s| s.records.len()),
        energy: per(&|r| Some(r.energy)),
        width: per(&|r| r.width),
        good_pair_fraction: per(&|r| r.good_pair_fraction),
        magnetization: per(&|r| Some(r.magnetization)),
        acceptance_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        layers,
        profile,
        stationarity: series
            .iter()
            .map(|s| stationarity(&s.records.iter().map(|r| r.energy).collect::<Vec<_>>()))
            .collect(),
        max_drift: series.iter().map(|s| s.max_drift).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::excess_energy;

    #[test]
    fn test_stencil_matches_full_energy() {
        let v = Volume::centered([4, 4, 4], 2);
        let k = ModelCoefficients::new(6.0);
        let st = Stencil::new(&v);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = SpinConfiguration::from_fn(v.clone(), BoundaryCondition::Bc111, |_| if rng.gen_bool(0.5) { 1 } else { -1 });
        for h in [Hamiltonian::H2, Hamiltonian::H4] {
            for (i, s) in v.sites().enumerate().step_by(5) {
                let mut c2 = cfg.clone();
                c2.flip(s);
                let full = excess_energy(&c2, h, &k) - excess_energy(&cfg, h, &k);
                assert!((st.delta(cfg.raw(), i, h, &k) - full).abs() < 1e-12);
            }
        }
    }
}
