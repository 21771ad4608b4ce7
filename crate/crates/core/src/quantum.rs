//! Exact Falicov-Kimball traces on small lattices.
//!
//! For a fixed ion configuration `W` the electronic Hamiltonian
//! `H = 2U Σ W n - μe Σ n - μi Σ W - t Σ (c†c + h.c.)` conserves the electron
//! number, so the Fock space splits into blocks that are diagonalized densely.
//! The effective ionic energy is `-(1/β) log Tr e^{-βH}`; multi-site couplings
//! are the coefficients of `Π s'_x` (with `s' = 2W - 1`) obtained by a Walsh
//! transform over all ion configurations of a window.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{walk_measure, is_connected, Site, Volume};

/// Largest number of sites whose Fock space is built.
pub const MAX_FOCK_SITES: usize = 14;
/// Largest number of ion configurations in a coupling extraction.
pub const MAX_WINDOW_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkParameters {
    #[serde(rename = "U")]
    pub u: f64,
    pub t: f64,
    pub mu_e: f64,
    pub mu_i: f64,
    pub beta: f64,
}

impl FkParameters {
    /// Neutral half-filled model, `μe = μi = U`, `t = 1`.
    pub fn half_filled(u: f64, beta: f64) -> Self {
        FkParameters { u, t: 1.0, mu_e: u, mu_i: u, beta }
    }
}

/// Occupation-bitstring basis of the electron Fock space; bit `i` refers to
/// the `i`-th site in `sites`, which fixes the fermion sign convention.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub sites: Vec<Site>,
    bonds: Vec<(usize, usize)>,
}

impl FockBasis {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.len() > MAX_FOCK_SITES {
            return Err(Error::Cap(format!(
                "Fock space limited to {MAX_FOCK_SITES} sites, got {}",
                sites.len()
            )));
        }
        let index: HashMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut bonds = Vec::new();
        for (i, s) in sites.iter().enumerate() {
            for n in s.neighbours() {
                if let Some(&j) = index.get(&n) {
                    if i < j {
                        bonds.push((i, j));
                    }
                }
            }
        }
        Ok(FockBasis { sites, bonds })
    }

    pub fn from_volume(volume: &Volume) -> Result<Self> {
        Self::new(volume.sites().collect())
    }

    pub fn len_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dimension(&self) -> usize {
        1 << self.sites.len()
    }

    /// Basis states with exactly `n` electrons, ascending.
    pub fn sector(&self, n: u32) -> Vec<u32> {
        (0..self.dimension() as u32).filter(|b| b.count_ones() == n).collect()
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }
}

/// `c†_i c_j |state>` as `(sign, new_state)`, or `None` if it vanishes.
pub fn hop(state: u32, i: usize, j: usize) -> Option<(f64, u32)> {
    if i == j {
        return if state & (1 << i) != 0 { Some((1.0, state)) } else { None };
    }
    if state & (1 << j) == 0 || state & (1 << i) != 0 {
        return None;
    }
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let between = (state >> (lo + 1)) & ((1u32 << (hi - lo - 1)) - 1);
    let sign = if between.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, (state & !(1 << j)) | (1 << i)))
}

/// Hamiltonian block with `n` electrons for ion occupations `w`.
pub fn hamiltonian_block(basis: &FockBasis, w: &[u8], params: &FkParameters, n: u32) -> DMatrix<f64> {
    let states = basis.sector(n);
    let pos: HashMap<u32, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let dim = states.len();
    let ion_term = -params.mu_i * w.iter().map(|&x| x as f64).sum::<f64>();
    let mut h = DMatrix::zeros(dim, dim);
    for (a, &st) in states.iter().enumerate() {
        let mut diag = ion_term;
        for (x, &wx) in w.iter().enumerate() {
            if st & (1 << x) != 0 {
                diag += 2.0 * params.u * wx as f64 - params.mu_e;
            }
        }
        h[(a, a)] = diag;
        if params.t != 0.0 {
            for &(x, y) in basis.bonds() {
                for (p, q) in [(x, y), (y, x)] {
                    if let Some((sgn, st2)) = hop(st, p, q) {
                        let b = pos[&st2];
                        h[(b, a)] += -params.t * sgn;
                    }
                }
            }
        }
    }
    h
}

/// Full Hamiltonian on the whole Fock space (occupation order), for checks.
pub fn build_hamiltonian(basis: &FockBasis, w: &[u8], params: &FkParameters) -> Result<DMatrix<f64>> {
    check_ions(basis, w)?;
    let dim = basis.dimension();
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=basis.len_sites() as u32 {
        let states = basis.sector(n);
        let block = hamiltonian_block(basis, w, params, n);
        for (a, &sa) in states.iter().enumerate() {
            for (b, &sb) in states.iter().enumerate() {
                h[(sa as usize, sb as usize)] = block[(a, b)];
            }
        }
    }
    Ok(h)
}

fn check_ions(basis: &FockBasis, w: &[u8]) -> Result<()> {
    if w.len() != basis.len_sites() {
        return Err(Error::Invalid(format!(
            "ion configuration has {} entries for {} sites",
            w.len(),
            basis.len_sites()
        )));
    }
    if w.iter().any(|&x| x > 1) {
        return Err(Error::Invalid("ion occupations must be 0 or 1".into()));
    }
    Ok(())
}

/// All eigenvalues, block by block.
pub fn spectrum(basis: &FockBasis, w: &[u8], params: &FkParameters) -> Result<Vec<f64>> {
    check_ions(basis, w)?;
    let mut out = Vec::with_capacity(basis.dimension());
    for n in 0..=basis.len_sites() as u32 {
        let h = hamiltonian_block(basis, w, params, n);
        if h.nrows() == 1 {
            out.push(h[(0, 0)]);
        } else {
            out.extend(SymmetricEigen::new(h).eigenvalues.iter().copied());
        }
    }
    Ok(out)
}

/// `-(1/β) log Σ e^{-βE}` with the minimum factored out.
pub fn free_energy(levels: &[f64], beta: f64) -> Result<f64> {
    if levels.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numeric("non-finite spectrum".into()));
    }
    let emin = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let z: f64 = levels.iter().map(|e| (-beta * (e - emin)).exp()).sum();
    Ok(emin - z.ln() / beta)
}

/// Effective ionic energy `H_eff(β, W)`.
pub fn effective_energy(basis: &FockBasis, w: &[u8], params: &FkParameters) -> Result<f64> {
    free_energy(&spectrum(basis, w, params)?, params.beta)
}

/// One extracted coefficient: value of the monomial `Π_{x∈sites} s'_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub cluster: Vec<[i64; 3]>,
    pub g: u32,
    pub connected: bool,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMeta {
    pub beta: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub t: f64,
    pub volume: Vec<[i64; 3]>,
    pub window: Vec<[i64; 3]>,
    pub max_g: u32,
}

/// Couplings of every monomial over the window sites. Entries with
/// `g <= meta.max_g` and `connected` are the clusters proper; the remaining
/// monomials are kept so the expansion reproduces `H_eff` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub meta: CouplingMeta,
    pub couplings: Vec<CouplingEntry>,
}

impl CouplingTable {
    pub fn get(&self, sites: &[Site]) -> Option<f64> {
        let mut key: Vec<[i64; 3]> = sites.iter().map(|s| s.k).collect();
        key.sort();
        self.couplings.iter().find(|e| e.cluster == key).map(|e| e.value)
    }

    /// Connected clusters within the requested cutoff.
    pub fn clusters(&self) -> impl Iterator<Item = &CouplingEntry> {
        let max_g = self.meta.max_g;
        self.couplings
            .iter()
            .filter(move |e| e.connected && e.g <= max_g)
    }

    /// `Σ_A Φ_A Π_{x∈A} s'_x` for window spins `s` (same order as `meta.window`).
    pub fn synthesize(&self, s: &[i8]) -> f64 {
        let idx: HashMap<[i64; 3], usize> =
            self.meta.window.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        self.couplings
            .iter()
            .map(|e| {
                let sign: i8 = e.cluster.iter().map(|k| s[idx[k]]).product();
                e.value * sign as f64
            })
            .sum()
    }
}

/// In-place Walsh-Hadamard transform (unnormalized).
pub fn walsh_hadamard(data: &mut [f64]) {
    let n = data.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Effective energies of every ion configuration of `window` (bit `i` of the
/// index is `W` at `window[i]`); sites of `volume` outside the window keep
/// the Néel ions `W = (1 + (-1)^(k1+k2+k3))/2`.
pub fn heff_table(volume: &Volume, window: &[Site], params: &FkParameters) -> Result<Vec<f64>> {
    if window.len() > MAX_WINDOW_SITES {
        return Err(Error::Cap(format!(
            "window limited to {MAX_WINDOW_SITES} sites (2^{MAX_WINDOW_SITES} ion configurations)"
        )));
    }
    let basis = FockBasis::from_volume(volume)?;
    let pos: HashMap<Site, usize> = basis.sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut widx = Vec::with_capacity(window.len());
    for s in window {
        widx.push(*pos.get(s).ok_or_else(|| Error::Invalid(format!("window site {:?} outside volume", s.k)))?);
    }
    let frozen: Vec<u8> = basis.sites.iter().map(|s| u8::from(s.parity() == 1)).collect();
    (0..1usize << window.len())
        .into_par_iter()
        .map(|cfg| {
            let mut w = frozen.clone();
            for (b, &i) in widx.iter().enumerate() {
                w[i] = ((cfg >> b) & 1) as u8;
            }
            effective_energy(&basis, &w, params)
        })
        .collect()
}

/// Möbius inversion of `S ↦ H_eff(β, S)` in the `±1` monomial basis.
pub fn extract_couplings(
    volume: &Volume,
    window: Option<&[Site]>,
    params: &FkParameters,
    max_g: u32,
) -> Result<CouplingTable> {
    let all: Vec<Site> = volume.sites().collect();
    let window: Vec<Site> = window.map(|w| w.to_vec()).unwrap_or_else(|| all.clone());
    let energies = heff_table(volume, &window, params)?;
    let n = window.len();
    // s'_x = 2W - 1, so bit 1 means s' = +1. Coefficient of Π_{x∈A} s'_x is
    // 2^-n Σ_S H(S) Π_{x∈A} s'_x; the Walsh kernel uses (-1)^{popcount(A & cfg)},
    // which equals Π s' with s' = -1 on set bits, hence the sign fix below.
    let mut data = energies.clone();
    walsh_hadamard(&mut data);
    let norm = 1.0 / (1usize << n) as f64;
    let mut couplings = Vec::with_capacity(data.len());
    for (mask, v) in data.iter().enumerate() {
        let sites: Vec<Site> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| window[b]).collect();
        let sign = if sites.len().is_multiple_of(2) { 1.0 } else { -1.0 };
        let (g, connected) = if sites.is_empty() {
            (0, true)
        } else {
            (walk_measure(&sites)?, is_connected(&sites))
        };
        let mut cluster: Vec<[i64; 3]> = sites.iter().map(|s| s.k).collect();
        cluster.sort();
        couplings.push(CouplingEntry { cluster, g, connected, value: sign * v * norm });
    }
    couplings.sort_by(|a, b| (a.cluster.len(), &a.cluster).cmp(&(b.cluster.len(), &b.cluster)));
    Ok(CouplingTable {
        meta: CouplingMeta {
            beta: params.beta,
            u: params.u,
            t: params.t,
            volume: all.iter().map(|s| s.k).collect(),
            window: window.iter().map(|s| s.k).collect(),
            max_g,
        },
        couplings,
    })
}

/// Per-level maxima of `|Φ_A|` over monomials with `|A| >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `(g, max |Φ_A|)` sorted by `g`.
    pub levels: Vec<(u32, f64)>,
    pub trivial: bool,
    /// Level maxima strictly decrease with `g` among nonzero levels.
    pub decreasing: bool,
    /// Least-squares fit `log max|Φ| ≈ log C1 + g log(c/U)`.
    pub fitted_c1: f64,
    pub fitted_c: f64,
}

pub fn verify_decay(table: &CouplingTable) -> DecayReport {
    const ZERO: f64 = 1e-12;
    let mut levels: std::collections::BTreeMap<u32, f64> = Default::default();
    for e in &table.couplings {
        if e.cluster.len() >= 2 && e.g <= table.meta.max_g {
            let m = levels.entry(e.g).or_insert(0.0);
            *m = m.max(e.value.abs());
        }
    }
    let levels: Vec<(u32, f64)> = levels.into_iter().collect();
    let nonzero: Vec<(f64, f64)> = levels
        .iter()
        .filter(|(_, v)| *v > ZERO)
        .map(|(g, v)| (*g as f64, v.ln()))
        .collect();
    let trivial = nonzero.is_empty();
    let decreasing = nonzero.windows(2).all(|w| w[1].1 < w[0].1);
    let (c1, c) = if nonzero.len() >= 2 {
        let n = nonzero.len() as f64;
        let mx = nonzero.iter().map(|p| p.0).sum::<f64>() / n;
        let my = nonzero.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = nonzero.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = nonzero.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        ((my - slope * mx).exp(), table.meta.u * slope.exp())
    } else {
        (0.0, 0.0)
    };
    DecayReport { levels, trivial, decreasing, fitted_c1: c1, fitted_c: c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_single_site_spectrum() {
        let basis = FockBasis::new(vec![Site::new(0, 0, 0)]).unwrap();
        let p = FkParameters::half_filled(5.0, 2.0);
        let mut e = spectrum(&basis, &[1], &p).unwrap();
        e.sort_by(f64::total_cmp);
        assert_eq!(e, vec![-5.0, 0.0]);
        let h = effective_energy(&basis, &[1], &p).unwrap();
        assert!((h - (-5.0 - (1.0 + (-10f64).exp()).ln() / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn test_hop_sign() {
        // c†_2 c_0 on |0,1,2 occupied = 0b011> passes over site 1.
        assert_eq!(hop(0b011, 2, 0), Some((-1.0, 0b110)));
        assert_eq!(hop(0b001, 1, 0), Some((1.0, 0b010)));
        assert_eq!(hop(0b010, 1, 0), None);
    }

    #[test]
    fn test_walsh_round_trip() {
        let mut v = vec![1.0, -2.0, 0.5, 3.0];
        let orig = v.clone();
        walsh_hadamard(&mut v);
        walsh_hadamard(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a / 4.0 - b).abs() < 1e-15);
        }
    }
}
