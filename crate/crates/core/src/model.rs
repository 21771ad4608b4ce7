//! Classical effective model: the second- and fourth-order spin Hamiltonians
//! in the ferromagnetic frame, their local potentials, Ising contours and the
//! Peierls check.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lattice::{BoundaryCondition, Site, SpinConfiguration, Volume};

/// Truncated effective couplings at a given `U` (hopping set to 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCoefficients {
    #[serde(rename = "U")]
    pub u: f64,
    pub j: f64,
    pub c_nn: f64,
    pub c_nnn: f64,
    pub c_2: f64,
    pub c_plq: f64,
    pub j1: f64,
    pub j2: f64,
    pub k2: f64,
}

impl ModelCoefficients {
    pub fn new(u: f64) -> Self {
        let u3 = u * u * u;
        ModelCoefficients {
            u,
            j: 1.0 / (4.0 * u),
            c_nn: 1.0 / (4.0 * u) - 11.0 / (16.0 * u3),
            c_nnn: 3.0 / (16.0 * u3),
            c_2: 1.0 / (8.0 * u3),
            c_plq: 5.0 / (16.0 * u3),
            j1: 1.0 / (2.0 * u),
            j2: 1.0 / (2.0 * u) - 11.0 / (8.0 * u3),
            k2: 1.0 / (4.0 * u3),
        }
    }
}

/// Which Hamiltonian a run or evaluation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hamiltonian {
    H2,
    H4,
}

/// `h_p = 5(sx sy sz st - 1) + 3(sx sz + sy st - 2)`, spins in cyclic order.
pub fn plaquette_potential(s: [i8; 4]) -> i32 {
    let [x, y, z, t] = s.map(i32::from);
    5 * (x * y * z * t - 1) + 3 * (x * z + y * t - 2)
}

/// `h_{x,z} = sx sz - 1` for a pair at distance 2.
pub fn nnn_potential(sx: i8, sz: i8) -> i32 {
    i32::from(sx) * i32::from(sz) - 1
}

/// Plaquette potential for hard-core bosons instead of fermions:
/// `1 - sx sy sz sw + 5(sx sz + sy sw - 2)`.
pub fn bosonic_plaquette_potential(s: [i8; 4]) -> i32 {
    let [x, y, z, w] = s.map(i32::from);
    1 - x * y * z * w + 5 * (x * z + y * w - 2)
}

const UNIT: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

fn add(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Sites whose terms are evaluated: the volume grown by `r`.
fn grown_sites(v: &Volume, r: i64) -> impl Iterator<Item = Site> + '_ {
    let lo = v.lo;
    let d = v.dims.map(|x| x as i64);
    (lo[2] - r..lo[2] + d[2] + r).flat_map(move |z| {
        (lo[1] - r..lo[1] + d[1] + r)
            .flat_map(move |y| (lo[0] - r..lo[0] + d[0] + r).map(move |x| Site::new(x, y, z)))
    })
}

/// Energy of `H2` relative to the uniform state:
/// `-J Σ (sx sy - 1)` over bonds with at least one end in the volume.
pub fn h2_relative_energy(config: &SpinConfiguration, coeffs: &ModelCoefficients) -> f64 {
    2.0 * coeffs.j * broken_bonds(config) as f64
}

/// Number of antiparallel bonds with at least one end in the volume.
pub fn broken_bonds(config: &SpinConfiguration) -> usize {
    let v = &config.volume;
    let mut n = 0;
    for s in grown_sites(v, 1) {
        for e in UNIT {
            let t = s.offset(e);
            if (v.contains(s) || v.contains(t)) && config.get(s) != config.get(t) {
                n += 1;
            }
        }
    }
    n
}

/// Term counts entering `H4`, each summed as `Σ (product - 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct H4Sums {
    pub nn: i64,
    pub nnn: i64,
    pub d2: i64,
    pub plq: i64,
}

/// Raw sums over every term with at least one site in the volume.
pub fn h4_sums(config: &SpinConfiguration) -> H4Sums {
    let v = &config.volume;
    let g = |s: Site| i64::from(config.get(s));
    let mut out = H4Sums::default();
    for s in grown_sites(v, 2) {
        let ins = v.contains(s);
        let ss = g(s);
        for a in 0..3 {
            let t = s.offset(UNIT[a]);
            if ins || v.contains(t) {
                out.nn += ss * g(t) - 1;
            }
            let t2 = s.offset(UNIT[a].map(|x| 2 * x));
            if ins || v.contains(t2) {
                out.d2 += ss * g(t2) - 1;
            }
            for b in a + 1..3 {
                let y = s.offset(UNIT[a]);
                let z = s.offset(add(UNIT[a], UNIT[b]));
                let t = s.offset(UNIT[b]);
                // (s, z) and (y, t) are the two diagonals of this plaquette.
                if ins || v.contains(z) {
                    out.nnn += ss * g(z) - 1;
                }
                if v.contains(y) || v.contains(t) {
                    out.nnn += g(y) * g(t) - 1;
                }
                if ins || v.contains(y) || v.contains(z) || v.contains(t) {
                    out.plq += ss * g(y) * g(z) * g(t) - 1;
                }
            }
        }
    }
    out
}

/// Energy of the truncated fourth-order Hamiltonian relative to the uniform state.
pub fn h4_relative_energy(config: &SpinConfiguration, coeffs: &ModelCoefficients) -> f64 {
    h4_from_sums(&h4_sums(config), coeffs)
}

pub fn h4_from_sums(s: &H4Sums, c: &ModelCoefficients) -> f64 {
    -c.c_nn * s.nn as f64 + c.c_nnn * s.nnn as f64 + c.c_2 * s.d2 as f64 + c.c_plq * s.plq as f64
}

pub fn relative_energy(config: &SpinConfiguration, h: Hamiltonian, coeffs: &ModelCoefficients) -> f64 {
    match h {
        Hamiltonian::H2 => h2_relative_energy(config, coeffs),
        Hamiltonian::H4 => h4_relative_energy(config, coeffs),
    }
}

/// Unit square bisecting the bond `site -> site + e_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub site: Site,
    pub axis: u8,
}

impl Face {
    pub fn new(site: Site, axis: u8) -> Self {
        assert!(axis < 3);
        Face { site, axis }
    }

    /// The ordered nearest-neighbour pair the face bisects.
    pub fn sites(&self) -> (Site, Site) {
        (self.site, self.site.offset(UNIT[self.axis as usize]))
    }

    /// Lowest corner of the face (integer point).
    pub fn corner(&self) -> [i64; 3] {
        add(self.site.k, UNIT[self.axis as usize])
    }

    /// The four corners, as integer points.
    pub fn vertices(&self) -> [[i64; 3]; 4] {
        let p = self.corner();
        let (b, c) = self.span();
        [p, add(p, UNIT[b]), add(add(p, UNIT[b]), UNIT[c]), add(p, UNIT[c])]
    }

    /// The two in-plane axes.
    pub fn span(&self) -> (usize, usize) {
        let a = self.axis as usize;
        ((a + 1) % 3, (a + 2) % 3)
    }

    /// The four edges as `(start point, direction)`.
    pub fn edges(&self) -> [([i64; 3], u8); 4] {
        let p = self.corner();
        let (b, c) = self.span();
        [
            (p, b as u8),
            (p, c as u8),
            (add(p, UNIT[b]), c as u8),
            (add(p, UNIT[c]), b as u8),
        ]
    }

    pub fn translate(&self, d: [i64; 3]) -> Face {
        Face { site: self.site.offset(d), axis: self.axis }
    }
}

/// Maximal connected set of broken-bond faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsingContour {
    pub faces: Vec<Face>,
    pub pinned: bool,
}

impl IsingContour {
    pub fn area(&self) -> usize {
        self.faces.len()
    }
}

/// How faces are glued into contours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Connectivity {
    #[default]
    Edge,
    Corner,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Broken faces with at least one site in the volume.
pub fn broken_faces(config: &SpinConfiguration) -> Vec<Face> {
    let v = &config.volume;
    let mut out = Vec::new();
    for s in grown_sites(v, 1) {
        for a in 0..3u8 {
            let f = Face::new(s, a);
            let (x, y) = f.sites();
            if (v.contains(x) || v.contains(y)) && config.get(x) != config.get(y) {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// Decomposes the broken faces into contours. Under mixed boundary
/// conditions the component glued to the broken faces of the shell is the
/// pinned interface.
pub fn extract_contours(config: &SpinConfiguration, conn: Connectivity) -> Vec<IsingContour> {
    let v = &config.volume;
    let inner = broken_faces(config);
    // Broken faces wholly inside the shell anchor the pinned component.
    let mut outer = Vec::new();
    if config.bc.is_mixed() {
        let r = v.shell as i64;
        for s in grown_sites(v, r) {
            for a in 0..3u8 {
                let f = Face::new(s, a);
                let (x, y) = f.sites();
                if !v.contains(x) && !v.contains(y) && v.contains_ext(x) && v.contains_ext(y) && config.get(x) != config.get(y) {
                    outer.push(f);
                }
            }
        }
    }
    let all: Vec<Face> = inner.iter().chain(outer.iter()).copied().collect();
    let mut dsu = Dsu::new(all.len());
    let mut glue: HashMap<([i64; 3], u8), usize> = HashMap::new();
    for (i, f) in all.iter().enumerate() {
        let keys: Vec<([i64; 3], u8)> = match conn {
            Connectivity::Edge => f.edges().to_vec(),
            Connectivity::Corner => f.vertices().iter().map(|p| (*p, 3)).collect(),
        };
        for k in keys {
            match glue.get(&k) {
                Some(&j) => dsu.union(i, j),
                None => {
                    glue.insert(k, i);
                }
            }
        }
    }
    let n_in = inner.len();
    let pinned_roots: std::collections::HashSet<usize> = (n_in..all.len()).map(|i| dsu.find(i)).collect();
    let mut groups: std::collections::BTreeMap<usize, Vec<Face>> = Default::default();
    let mut pinned_faces = Vec::new();
    for (i, f) in inner.iter().enumerate() {
        let r = dsu.find(i);
        if pinned_roots.contains(&r) {
            pinned_faces.push(*f);
        } else {
            groups.entry(r).or_default().push(*f);
        }
    }
    let mut out: Vec<IsingContour> = Vec::new();
    if !pinned_faces.is_empty() {
        out.push(IsingContour { faces: pinned_faces, pinned: true });
    }
    out.extend(groups.into_values().map(|faces| IsingContour { faces, pinned: false }));
    out
}

/// Outcome of the Peierls check `E(γ) = J1|γ| >= (c0/U)|γ|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeierlsReport {
    pub checked: usize,
    pub passed: bool,
    /// Largest `c0` for which the condition holds, `U J1`.
    pub max_c0: f64,
    pub min_area: Option<usize>,
}

pub fn peierls_check(contours: &[IsingContour], coeffs: &ModelCoefficients, c0: f64) -> PeierlsReport {
    let closed: Vec<&IsingContour> = contours.iter().filter(|c| !c.pinned).collect();
    let passed = closed.iter().all(|c| {
        let a = c.area() as f64;
        coeffs.j1 * a >= c0 / coeffs.u * a && c.area() >= 6
    });
    PeierlsReport {
        checked: closed.len(),
        passed,
        max_c0: coeffs.u * coeffs.j1,
        min_area: closed.iter().map(|c| c.area()).min(),
    }
}

/// Relative energy of `config` minus that of the ground state for its
/// boundary condition; the natural zero for interface energies.
pub fn excess_energy(config: &SpinConfiguration, h: Hamiltonian, coeffs: &ModelCoefficients) -> f64 {
    let gs = SpinConfiguration::ground_state(config.volume.clone(), config.bc);
    relative_energy(config, h, coeffs) - relative_energy(&gs, h, coeffs)
}

/// Ground state of a boundary condition, exposed for callers that only hold
/// a volume.
pub fn ground_state(volume: &Volume, bc: BoundaryCondition) -> SpinConfiguration {
    SpinConfiguration::ground_state(volume.clone(), bc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_potential_values() {
        assert_eq!(plaquette_potential([1, 1, -1, 1]), -16);
        assert_eq!(plaquette_potential([1, -1, -1, 1]), -12);
        assert_eq!(plaquette_potential([1, -1, 1, -1]), 0);
        assert_eq!(nnn_potential(1, -1), -2);
        assert_eq!(bosonic_plaquette_potential([1, 1, -1, 1]), -8);
        assert_eq!(bosonic_plaquette_potential([1, -1, -1, 1]), -20);
    }

    #[test]
    fn test_single_flip_h2() {
        let v = Volume::centered([3, 3, 3], 2);
        let c = ModelCoefficients::new(8.0);
        let mut cfg = SpinConfiguration::uniform(v, BoundaryCondition::HomPlus, 1);
        cfg.flip(Site::new(0, 0, 0));
        assert!((h2_relative_energy(&cfg, &c) - 12.0 * c.j).abs() < 1e-15);
        let cs = extract_contours(&cfg, Connectivity::Edge);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].area(), 6);
    }

    #[test]
    fn test_face_geometry() {
        let f = Face::new(Site::new(0, 0, 0), 0);
        assert_eq!(f.corner(), [1, 0, 0]);
        assert_eq!(f.vertices()[2], [1, 1, 1]);
    }
}
