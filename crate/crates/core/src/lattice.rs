//! Cubic lattice geometry: sites, boxes with a frozen shell, boundary
//! conditions, spin configurations and connected bond clusters.
//!
//! Sites are integer triples `k`; the physical position is `x = k + 1/2`, so
//! every coordinate sum `x1+x2+x3 = k1+k2+k3 + 3/2` is a half-odd integer.
//! All predicates are evaluated on the integer triple.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six nearest-neighbour displacements.
pub const NN: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// Lattice site with physical coordinate `k + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Site {
    pub k: [i64; 3],
}

impl Site {
    pub const fn new(k1: i64, k2: i64, k3: i64) -> Self {
        Site { k: [k1, k2, k3] }
    }

    /// `k1 + k2 + k3`; the physical coordinate sum is this plus 3/2.
    pub fn ksum(&self) -> i64 {
        self.k[0] + self.k[1] + self.k[2]
    }

    /// Twice the physical coordinate sum, always odd.
    pub fn twice_coord_sum(&self) -> i64 {
        2 * self.ksum() + 3
    }

    /// Sublattice sign `(-1)^(k1+k2+k3)`.
    pub fn parity(&self) -> i8 {
        if self.ksum().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn offset(&self, d: [i64; 3]) -> Site {
        Site::new(self.k[0] + d[0], self.k[1] + d[1], self.k[2] + d[2])
    }

    pub fn l1(&self, other: &Site) -> i64 {
        (0..3).map(|i| (self.k[i] - other.k[i]).abs()).sum()
    }

    pub fn neighbours(&self) -> impl Iterator<Item = Site> + '_ {
        NN.iter().map(move |d| self.offset(*d))
    }
}

/// Boundary condition applied to the shell around a volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    HomPlus,
    HomMinus,
    Bc100,
    Bc111,
}

impl BoundaryCondition {
    /// Whether the condition forces an interface through the volume.
    pub fn is_mixed(self) -> bool {
        matches!(self, BoundaryCondition::Bc100 | BoundaryCondition::Bc111)
    }
}

/// Spin prescribed by `bc` at `site`.
///
/// `Bc100` is `+1` iff `x3 >= 1/2`, i.e. `k3 >= 0`; `Bc111` is `+1` iff
/// `x1+x2+x3 >= 1/2`, i.e. `k1+k2+k3 >= -1`.
pub fn boundary_spin(bc: BoundaryCondition, site: Site) -> i8 {
    match bc {
        BoundaryCondition::HomPlus => 1,
        BoundaryCondition::HomMinus => -1,
        BoundaryCondition::Bc100 => {
            if site.k[2] >= 0 {
                1
            } else {
                -1
            }
        }
        BoundaryCondition::Bc111 => {
            if site.ksum() >= -1 {
                1
            } else {
                -1
            }
        }
    }
}

/// Axis-aligned box of sites plus a frozen shell of depth `shell`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Volume {
    /// Smallest site of the box.
    pub lo: [i64; 3],
    pub dims: [usize; 3],
    pub shell: usize,
}

impl Volume {
    /// Box of the given dimensions placed so the origin sits at its centre
    /// (rounded down for odd sizes).
    pub fn centered(dims: [usize; 3], shell: usize) -> Self {
        let lo = [
            -((dims[0] / 2) as i64),
            -((dims[1] / 2) as i64),
            -((dims[2] / 2) as i64),
        ];
        Volume { lo, dims, shell }
    }

    pub fn with_lo(lo: [i64; 3], dims: [usize; 3], shell: usize) -> Self {
        Volume { lo, dims, shell }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, s: Site) -> bool {
        (0..3).all(|i| s.k[i] >= self.lo[i] && s.k[i] < self.lo[i] + self.dims[i] as i64)
    }

    /// Dimensions of the box including the shell.
    pub fn ext_dims(&self) -> [usize; 3] {
        [
            self.dims[0] + 2 * self.shell,
            self.dims[1] + 2 * self.shell,
            self.dims[2] + 2 * self.shell,
        ]
    }

    pub fn ext_lo(&self) -> [i64; 3] {
        let d = self.shell as i64;
        [self.lo[0] - d, self.lo[1] - d, self.lo[2] - d]
    }

    pub fn ext_len(&self) -> usize {
        self.ext_dims().iter().product()
    }

    pub fn contains_ext(&self, s: Site) -> bool {
        let lo = self.ext_lo();
        let d = self.ext_dims();
        (0..3).all(|i| s.k[i] >= lo[i] && s.k[i] < lo[i] + d[i] as i64)
    }

    /// Linear index into the extended (volume + shell) box.
    pub fn ext_index(&self, s: Site) -> Option<usize> {
        if !self.contains_ext(s) {
            return None;
        }
        let lo = self.ext_lo();
        let d = self.ext_dims();
        let i = (s.k[0] - lo[0]) as usize;
        let j = (s.k[1] - lo[1]) as usize;
        let l = (s.k[2] - lo[2]) as usize;
        Some((l * d[1] + j) * d[0] + i)
    }

    pub fn ext_site(&self, idx: usize) -> Site {
        let lo = self.ext_lo();
        let d = self.ext_dims();
        let i = idx % d[0];
        let j = (idx / d[0]) % d[1];
        let l = idx / (d[0] * d[1]);
        Site::new(lo[0] + i as i64, lo[1] + j as i64, lo[2] + l as i64)
    }

    /// Interior sites in raster order (first coordinate fastest).
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let [nx, ny, nz] = self.dims;
        let lo = self.lo;
        (0..nz).flat_map(move |l| {
            (0..ny).flat_map(move |j| {
                (0..nx).map(move |i| Site::new(lo[0] + i as i64, lo[1] + j as i64, lo[2] + l as i64))
            })
        })
    }

    pub fn ext_sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.ext_len()).map(move |i| self.ext_site(i))
    }
}

/// Spins on a volume plus its shell. Shell spins are fixed by the boundary
/// condition and never touched by `set`/`flip`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfiguration {
    pub volume: Volume,
    pub bc: BoundaryCondition,
    spins: Vec<i8>,
}

impl SpinConfiguration {
    /// Interior spins all equal to `s`, shell from `bc`.
    pub fn uniform(volume: Volume, bc: BoundaryCondition, s: i8) -> Self {
        let spins = volume
            .ext_sites()
            .map(|site| if volume.contains(site) { s } else { boundary_spin(bc, site) })
            .collect();
        SpinConfiguration { volume, bc, spins }
    }

    /// Interior filled with the boundary prescription itself: the flat 100
    /// interface or the 111 staircase for mixed conditions.
    pub fn ground_state(volume: Volume, bc: BoundaryCondition) -> Self {
        let spins = volume.ext_sites().map(|site| boundary_spin(bc, site)).collect();
        SpinConfiguration { volume, bc, spins }
    }

    /// Interior spins taken from `f`, shell from `bc`.
    pub fn from_fn(volume: Volume, bc: BoundaryCondition, mut f: impl FnMut(Site) -> i8) -> Self {
        let spins = volume
            .ext_sites()
            .map(|site| if volume.contains(site) { f(site) } else { boundary_spin(bc, site) })
            .collect();
        SpinConfiguration { volume, bc, spins }
    }

    /// Builds from interior spins in `Volume::sites` order.
    pub fn from_interior(volume: Volume, bc: BoundaryCondition, interior: &[i8]) -> Result<Self> {
        if interior.len() != volume.len() {
            return Err(Error::Invalid(format!(
                "expected {} interior spins, got {}",
                volume.len(),
                interior.len()
            )));
        }
        if interior.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("spins must be +1 or -1".into()));
        }
        let map: std::collections::HashMap<Site, i8> =
            volume.sites().zip(interior.iter().copied()).collect();
        Ok(Self::from_fn(volume, bc, |s| map[&s]))
    }

    /// Spin at `site`; sites outside the extended box get the boundary value.
    #[inline]
    pub fn get(&self, site: Site) -> i8 {
        match self.volume.ext_index(site) {
            Some(i) => self.spins[i],
            None => boundary_spin(self.bc, site),
        }
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> i8 {
        self.spins[idx]
    }

    pub fn raw(&self) -> &[i8] {
        &self.spins
    }

    /// Sets an interior spin; returns false (and does nothing) for shell sites.
    pub fn set(&mut self, site: Site, s: i8) -> bool {
        if !self.volume.contains(site) {
            return false;
        }
        let i = self.volume.ext_index(site).expect("interior site indexed");
        self.spins[i] = s;
        true
    }

    pub fn flip(&mut self, site: Site) -> bool {
        let s = self.get(site);
        self.set(site, -s)
    }

    #[inline]
    pub(crate) fn flip_index(&mut self, idx: usize) {
        self.spins[idx] = -self.spins[idx];
    }

    /// Flips every stored spin, shell included. Homogeneous conditions swap
    /// sign; a mixed condition keeps its label, so the result no longer
    /// matches it (`shell_consistent` is false) though every energy term,
    /// which reaches at most two sites into the shell, sees the flipped spins.
    pub fn global_flip(&self) -> Self {
        let mut out = self.clone();
        for s in out.spins.iter_mut() {
            *s = -*s;
        }
        out.bc = match self.bc {
            BoundaryCondition::HomPlus => BoundaryCondition::HomMinus,
            BoundaryCondition::HomMinus => BoundaryCondition::HomPlus,
            bc => bc,
        };
        out
    }

    /// Interior spins in `Volume::sites` order.
    pub fn interior(&self) -> Vec<i8> {
        self.volume.sites().map(|s| self.get(s)).collect()
    }

    /// Whether every shell spin matches the boundary prescription.
    pub fn shell_consistent(&self) -> bool {
        self.volume
            .ext_sites()
            .filter(|s| !self.volume.contains(*s))
            .all(|s| self.get(s) == boundary_spin(self.bc, s))
    }
}

/// Sublattice staggering `s_x = (-1)^(k1+k2+k3) s'_x`, applied to every
/// stored spin including the shell. Involutive.
pub fn stagger(config: &SpinConfiguration) -> SpinConfiguration {
    let mut out = config.clone();
    for (i, s) in out.spins.iter_mut().enumerate() {
        *s *= config.volume.ext_site(i).parity();
    }
    out
}

/// Connected set of sites with its connectivity measure `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BondCluster {
    sites: Vec<Site>,
    g: u32,
}

/// Largest cluster handled by the exact closed-walk search.
pub const MAX_CLUSTER: usize = 10;

impl BondCluster {
    pub fn new(sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let set: BTreeSet<Site> = sites.into_iter().collect();
        let sites: Vec<Site> = set.into_iter().collect();
        if !is_connected(&sites) {
            return Err(Error::Invalid("cluster is empty or disconnected".into()));
        }
        let g = walk_g(&sites)?;
        Ok(BondCluster { sites, g })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Nearest-neighbour connectedness of a site set (false for the empty set).
pub fn is_connected(sites: &[Site]) -> bool {
    if sites.is_empty() {
        return false;
    }
    let set: HashSet<Site> = sites.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([sites[0]]);
    seen.insert(sites[0]);
    while let Some(s) = queue.pop_front() {
        for n in s.neighbours() {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// `g(B) = n(B) - 1` where `n(B)` is the shortest closed lattice walk through
/// every site of `B`; a singleton has `g = 0`.
pub fn connectivity_g(cluster: &BondCluster) -> u32 {
    cluster.g
}

/// Minimal closed-walk length through `sites`. Lattice paths between two
/// sites have length equal to their L1 distance, so this is an exact
/// travelling-salesman tour over L1 distances (Held-Karp).
pub fn min_closed_walk(sites: &[Site]) -> Result<u64> {
    let n = sites.len();
    if n == 0 {
        return Err(Error::Invalid("empty site set".into()));
    }
    if n > MAX_CLUSTER {
        return Err(Error::Cap(format!("closed-walk search limited to {MAX_CLUSTER} sites, got {n}")));
    }
    if n == 1 {
        return Ok(0);
    }
    let d = |i: usize, j: usize| sites[i].l1(&sites[j]) as u64;
    // dp[mask][j]: shortest path from site 0 through `mask` ending at j.
    let full = 1usize << n;
    let mut dp = vec![u64::MAX; full * n];
    dp[n] = 0; // mask 1, end 0
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        for j in 0..n {
            let cur = dp[mask * n + j];
            if cur == u64::MAX || mask & (1 << j) == 0 {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let m2 = mask | (1 << k);
                let v = cur + d(j, k);
                if v < dp[m2 * n + k] {
                    dp[m2 * n + k] = v;
                }
            }
        }
    }
    let last = full - 1;
    Ok((1..n).map(|j| dp[last * n + j] + d(j, 0)).min().unwrap_or(0))
}

fn walk_g(sites: &[Site]) -> Result<u32> {
    let n = min_closed_walk(sites)?;
    Ok(n.saturating_sub(1) as u32)
}

/// Connectivity measure of an arbitrary (possibly disconnected) site set,
/// used to grade monomials that are not clusters.
pub fn walk_measure(sites: &[Site]) -> Result<u32> {
    walk_g(sites)
}

/// All connected clusters inside `volume` that contain `anchor` and have
/// `g <= max_g`, each once, sorted.
pub fn enumerate_clusters(volume: &Volume, anchor: Site, max_g: u32) -> Result<Vec<BondCluster>> {
    if max_g > 8 {
        return Err(Error::Cap("enumerate_clusters supports max_g <= 8".into()));
    }
    if !volume.contains(anchor) {
        return Err(Error::Invalid("anchor outside volume".into()));
    }
    // g >= |B| - 1 bounds the cluster size.
    let max_size = max_g as usize + 1;
    let mut found: BTreeSet<Vec<Site>> = BTreeSet::new();
    let mut layer: BTreeSet<Vec<Site>> = BTreeSet::new();
    layer.insert(vec![anchor]);
    found.insert(vec![anchor]);
    for _ in 1..max_size {
        let mut next = BTreeSet::new();
        for set in &layer {
            for s in set {
                for n in s.neighbours() {
                    if !volume.contains(n) || set.contains(&n) {
                        continue;
                    }
                    let mut grown = set.clone();
                    grown.push(n);
                    grown.sort();
                    // Sets whose walk already exceeds max_g can still grow
                    // into valid ones only if g is not monotone; it is, since
                    // adding a site never shortens the tour.
                    if walk_g(&grown)? <= max_g && found.insert(grown.clone()) {
                        next.insert(grown);
                    }
                }
            }
        }
        layer = next;
    }
    found
        .into_iter()
        .filter(|s| walk_g(s).map(|g| g <= max_g).unwrap_or(false))
        .map(BondCluster::new)
        .collect()
}
