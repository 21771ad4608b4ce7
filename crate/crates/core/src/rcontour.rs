//! Bases and R-contours of rhombus configurations, contour energies, minimal
//! rhombus covers of overlapping supports, and the removal transformation
//! that erases one contour by translating its interiors.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::{
    EdgeKind, PlaneEdge, PlaneVertex, RConfiguration, Rhombus, Tiling, Triangle,
};
use crate::model::ModelCoefficients;

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

/// Maximal set of faces linked by good pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Base {
    pub tau: u8,
    /// Interior faces (indices into `RConfiguration::faces`).
    pub faces: Vec<usize>,
    /// Whether the base continues into the exterior staircase.
    pub exterior: bool,
}

/// Connected overlapping part of a contour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapSub {
    pub faces: Vec<usize>,
    /// Triangles with positive overlap number.
    pub triangles: Vec<Triangle>,
    /// `Σ o(t)` over those triangles.
    pub overlap_sum: u32,
    pub delta: usize,
    pub omega: usize,
    pub lambda: usize,
}

impl OverlapSub {
    /// Extra faces over a minimal interface, `Σ o(t) / 2`.
    pub fn a_ov(&self) -> f64 {
        self.overlap_sum as f64 / 2.0
    }

    /// Triangles of all rhombi of the subcontour.
    pub fn support(&self, rc: &RConfiguration) -> BTreeSet<Triangle> {
        self.faces.iter().flat_map(|&i| rc.rhombi[i].triangles()).collect()
    }
}

/// Standard part of a contour: δ-lines between non-overlapping rhombi.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardSub {
    /// Indices into `RConfiguration::edges`.
    pub delta_edges: Vec<usize>,
    /// Non-overlapping rhombi outside every base.
    pub faces: Vec<usize>,
}

/// Connected component of the complement of the bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RContour {
    pub vertices: Vec<PlaneVertex>,
    /// Non-good edges (indices into `RConfiguration::edges`).
    pub edges: Vec<usize>,
    /// Interior faces outside every base.
    pub faces: Vec<usize>,
    pub overlapping: Vec<OverlapSub>,
    pub standard: Vec<StandardSub>,
}

impl RContour {
    pub fn sum_a(&self) -> f64 {
        self.overlapping.iter().map(|o| o.a_ov()).sum::<f64>() + 0.0
    }
    pub fn std_delta(&self) -> usize {
        self.standard.iter().map(|s| s.delta_edges.len()).sum()
    }
    pub fn ov_delta(&self) -> usize {
        self.overlapping.iter().map(|o| o.delta).sum()
    }
    pub fn omega(&self) -> usize {
        self.overlapping.iter().map(|o| o.omega).sum()
    }
    pub fn lambda(&self) -> usize {
        self.overlapping.iter().map(|o| o.lambda).sum()
    }

    /// Right-hand side of the site-count bound.
    pub fn site_bound(&self) -> f64 {
        let ov: f64 = self
            .overlapping
            .iter()
            .map(|o| 3.0 * o.a_ov() + (o.delta + 1) as f64 + (o.lambda + 1) as f64 + (o.omega + 1) as f64)
            .sum();
        let st: f64 = self.standard.iter().map(|s| (s.delta_edges.len() + 1) as f64).sum();
        ov + st
    }

    /// Plane edges of the contour.
    pub fn plane_edges(&self, rc: &RConfiguration) -> BTreeSet<PlaneEdge> {
        self.edges.iter().map(|&i| rc.edges[i].plane).collect()
    }

    /// Triangles of the rhombi outside every base.
    pub fn triangles(&self, rc: &RConfiguration) -> BTreeSet<Triangle> {
        self.faces.iter().flat_map(|&i| rc.rhombi[i].triangles()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub bases: Vec<Base>,
    pub contours: Vec<RContour>,
}

/// Splits a configuration into bases and R-contours.
pub fn decompose(rc: &RConfiguration) -> Decomposition {
    let nf = rc.faces.len();
    let ntot = nf + rc.ring.len();
    let mut dsu = Dsu::new(ntot);
    let mut in_base = vec![false; ntot];
    for e in &rc.edges {
        if e.kind == EdgeKind::Good {
            dsu.union(e.faces[0], e.faces[1]);
            in_base[e.faces[0]] = true;
            in_base[e.faces[1]] = true;
        }
    }
    for b in in_base.iter_mut().skip(nf) {
        *b = true;
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, bool)> = BTreeMap::new();
    for i in 0..ntot {
        if in_base[i] {
            let g = groups.entry(dsu.find(i)).or_default();
            if i < nf {
                g.0.push(i);
            } else {
                g.1 = true;
            }
        }
    }
    let mut bases: Vec<Base> = groups
        .into_values()
        .filter(|(f, _)| !f.is_empty())
        .map(|(faces, exterior)| Base { tau: rc.face_tau(faces[0]), faces, exterior })
        .collect();
    bases.sort_by_key(|b| (!b.exterior, b.faces[0]));

    // Complement: non-good edges and rhombi of faces outside every base,
    // glued through shared plane vertices.
    let bad_edges: Vec<usize> = (0..rc.edges.len()).filter(|&i| rc.edges[i].kind != EdgeKind::Good).collect();
    let loose: Vec<usize> = (0..nf).filter(|&i| !in_base[i]).collect();
    let mut vid: BTreeMap<PlaneVertex, usize> = BTreeMap::new();
    let id = |v: PlaneVertex, vid: &mut BTreeMap<PlaneVertex, usize>| {
        let n = vid.len();
        *vid.entry(v).or_insert(n)
    };
    let mut links: Vec<Vec<usize>> = Vec::new();
    for &i in &bad_edges {
        let p = rc.edges[i].plane;
        links.push(vec![id(p.from, &mut vid), id(p.to, &mut vid)]);
    }
    for &i in &loose {
        links.push(rc.rhombi[i].vertices().iter().map(|v| id(*v, &mut vid)).collect());
    }
    let mut vd = Dsu::new(vid.len());
    for l in &links {
        for w in l.windows(2) {
            vd.union(w[0], w[1]);
        }
    }
    let mut comp: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, &i) in bad_edges.iter().enumerate() {
        comp.entry(vd.find(links[k][0])).or_default().0.push(i);
    }
    for (k, &i) in loose.iter().enumerate() {
        comp.entry(vd.find(links[bad_edges.len() + k][0])).or_default().1.push(i);
    }
    let verts: Vec<PlaneVertex> = {
        let mut v = vec![PlaneVertex::new(0, 0); vid.len()];
        for (p, i) in &vid {
            v[*i] = *p;
        }
        v
    };
    let mut contours = Vec::new();
    for (root, (edges, faces)) in comp {
        let vertices: BTreeSet<PlaneVertex> =
            (0..verts.len()).filter(|&i| vd.find(i) == root).map(|i| verts[i]).collect();
        contours.push(split_contour(rc, vertices.into_iter().collect(), edges, faces));
    }
    Decomposition { bases, contours }
}

fn split_contour(rc: &RConfiguration, vertices: Vec<PlaneVertex>, edges: Vec<usize>, faces: Vec<usize>) -> RContour {
    let ov_faces: Vec<usize> = faces.iter().copied().filter(|&i| rc.overlapping[i]).collect();
    let mut d = Dsu::new(ov_faces.len());
    let mut at: HashMap<PlaneVertex, usize> = HashMap::new();
    for (k, &i) in ov_faces.iter().enumerate() {
        for v in rc.rhombi[i].vertices() {
            match at.get(&v) {
                Some(&j) => d.union(k, j),
                None => {
                    at.insert(v, k);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &i) in ov_faces.iter().enumerate() {
        groups.entry(d.find(k)).or_default().push(i);
    }
    let group_of: HashMap<usize, usize> = groups
        .values()
        .enumerate()
        .flat_map(|(g, fs)| fs.iter().map(move |&f| (f, g)))
        .collect();
    let mut overlapping: Vec<OverlapSub> = groups
        .values()
        .map(|fs| {
            let tris: BTreeSet<Triangle> = fs
                .iter()
                .flat_map(|&i| rc.rhombi[i].triangles())
                .filter(|t| rc.overlap.get(t).copied().unwrap_or(0) > 0)
                .collect();
            let overlap_sum = tris.iter().map(|t| rc.overlap[t]).sum();
            OverlapSub {
                faces: fs.clone(),
                triangles: tris.into_iter().collect(),
                overlap_sum,
                delta: 0,
                omega: 0,
                lambda: 0,
            }
        })
        .collect();
    let mut rest_edges = Vec::new();
    for &i in &edges {
        let e = &rc.edges[i];
        let g = e.faces.iter().find_map(|f| group_of.get(f).copied());
        match (g, e.kind) {
            (Some(g), EdgeKind::Delta) => overlapping[g].delta += 1,
            (Some(g), EdgeKind::Omega) => overlapping[g].omega += 1,
            (Some(_), _) => {}
            (None, EdgeKind::Delta) => rest_edges.push(i),
            (None, _) => {}
        }
    }
    for &(i, j) in &rc.lambda_links {
        if let Some(&g) = group_of.get(&i).or_else(|| group_of.get(&j)) {
            overlapping[g].lambda += 1;
        }
    }
    // Standard parts: remaining δ-edges and loose rhombi, glued through
    // vertices not on an overlapping support.
    let ov_vertices: HashSet<PlaneVertex> =
        ov_faces.iter().flat_map(|&i| rc.rhombi[i].vertices()).collect();
    let rest_faces: Vec<usize> = faces.iter().copied().filter(|&i| !rc.overlapping[i]).collect();
    let n = rest_edges.len() + rest_faces.len();
    let mut sd = Dsu::new(n);
    let mut at: HashMap<PlaneVertex, usize> = HashMap::new();
    let elem_vertices = |k: usize| -> Vec<PlaneVertex> {
        if k < rest_edges.len() {
            let p = rc.edges[rest_edges[k]].plane;
            vec![p.from, p.to]
        } else {
            rc.rhombi[rest_faces[k - rest_edges.len()]].vertices().to_vec()
        }
    };
    for k in 0..n {
        for v in elem_vertices(k) {
            if ov_vertices.contains(&v) {
                continue;
            }
            match at.get(&v) {
                Some(&j) => sd.union(k, j),
                None => {
                    at.insert(v, k);
                }
            }
        }
    }
    let mut sgroups: BTreeMap<usize, StandardSub> = BTreeMap::new();
    for k in 0..n {
        let g = sgroups
            .entry(sd.find(k))
            .or_insert_with(|| StandardSub { delta_edges: vec![], faces: vec![] });
        if k < rest_edges.len() {
            g.delta_edges.push(rest_edges[k]);
        } else {
            g.faces.push(rest_faces[k - rest_edges.len()]);
        }
    }
    RContour { vertices, edges, faces, overlapping, standard: sgroups.into_values().collect() }
}

/// Contour energy with the truncated coefficients:
/// `J2 Σa + K2 (Σ|Δst| + Σ|Δov|) + Σ|Ω|/U³ + Σ|Λ|/(4U³)`.
pub fn f_energy(c: &RContour, k: &ModelCoefficients) -> f64 {
    let u3 = k.u.powi(3);
    k.j2 * c.sum_a()
        + k.k2 * (c.std_delta() + c.ov_delta()) as f64
        + c.omega() as f64 / u3
        + c.lambda() as f64 / (4.0 * u3)
}

/// Excess fourth-order energy of a contour read off the same counts with the
/// weights that follow from summing the plaquette, distance-2 and
/// nearest-neighbour terms face by face.
pub fn h4_contour_energy(c: &RContour, k: &ModelCoefficients) -> f64 {
    let u3 = k.u.powi(3);
    (k.j2 - 2.5 / u3) * c.sum_a()
        + k.k2 * (c.std_delta() + c.ov_delta()) as f64
        + 2.0 * c.omega() as f64 / u3
        + c.lambda() as f64 / (2.0 * u3)
}

/// Equivalence class of a contour: standard parts verbatim, overlapping
/// parts by their support, with the minimal cover size of each support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricContour {
    pub standard: Vec<Vec<PlaneEdge>>,
    pub supports: Vec<Vec<Triangle>>,
    pub r_ov: Vec<usize>,
}

/// Largest support (in rhombi of the contour) handled by the cover search.
pub const MAX_COVER_RHOMBI: usize = 12;

pub fn geometric_class(c: &RContour, rc: &RConfiguration) -> Result<GeometricContour> {
    let mut standard: Vec<Vec<PlaneEdge>> = c
        .standard
        .iter()
        .map(|s| {
            let mut v: Vec<PlaneEdge> = s.delta_edges.iter().map(|&i| rc.edges[i].plane).collect();
            v.sort();
            v
        })
        .collect();
    standard.sort();
    let mut supports = Vec::new();
    let mut r_ov = Vec::new();
    for o in &c.overlapping {
        if o.faces.len() > MAX_COVER_RHOMBI {
            return Err(Error::Cap(format!(
                "overlapping support of {} rhombi exceeds {MAX_COVER_RHOMBI}",
                o.faces.len()
            )));
        }
        let s = o.support(rc);
        r_ov.push(min_rhombus_cover(&s)?);
        supports.push(s.into_iter().collect());
    }
    Ok(GeometricContour { standard, supports, r_ov })
}

/// Minimal number of whole rhombi inside `support` whose union is `support`.
pub fn min_rhombus_cover(support: &BTreeSet<Triangle>) -> Result<usize> {
    let tris: Vec<Triangle> = support.iter().copied().collect();
    let idx: HashMap<Triangle, usize> = tris.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut cands: Vec<(usize, usize)> = Vec::new();
    for (i, t) in tris.iter().enumerate() {
        for n in t.neighbours() {
            if let Some(&j) = idx.get(&n) {
                if i < j {
                    cands.push((i, j));
                }
            }
        }
    }
    if tris.iter().enumerate().any(|(i, _)| !cands.iter().any(|&(a, b)| a == i || b == i)) {
        return Err(Error::Invalid("support is not a union of rhombi".into()));
    }
    fn rec(covered: &mut [u32], cands: &[(usize, usize)], used: usize, best: &mut usize) {
        if used >= *best {
            return;
        }
        let Some(i) = covered.iter().position(|&c| c == 0) else {
            *best = used;
            return;
        };
        // Lower bound: each rhombus covers at most two new triangles.
        let left = covered.iter().filter(|&&c| c == 0).count();
        if used + left.div_ceil(2) >= *best {
            return;
        }
        for &(a, b) in cands.iter().filter(|&&(a, b)| a == i || b == i) {
            covered[a] += 1;
            covered[b] += 1;
            rec(covered, cands, used + 1, best);
            covered[a] -= 1;
            covered[b] -= 1;
        }
    }
    let mut best = tris.len();
    rec(&mut vec![0; tris.len()], &cands, 0, &mut best);
    Ok(best)
}

/// Result of erasing one contour.
#[derive(Clone, Debug)]
pub struct Removal {
    pub config: RConfiguration,
    pub tiling: Tiling,
    /// `(n_i, triangle count)` per interior, in discovery order.
    pub shifts: Vec<(i64, usize)>,
    /// Type of the base surrounding the removed contour.
    pub exterior_tau: u8,
}

/// Lifts contour `which` out of a minimal configuration: every interior is
/// translated by `n_i (1,1)` in the plane (one vertical lattice step per
/// unit of `n_i`) so its adjacent base takes the exterior type, the contour
/// is filled with the exterior base, and the translated interiors are
/// stamped on top. Intersecting stamps are reported as an invariant error.
pub fn dobrushin_remove(rc: &RConfiguration, dec: &Decomposition, which: usize) -> Result<Removal> {
    if !rc.is_minimal() {
        return Err(Error::Invalid("removal is implemented for minimal (tiling) configurations".into()));
    }
    let c = dec
        .contours
        .get(which)
        .ok_or_else(|| Error::Invalid(format!("no contour {which}")))?;
    let tiling = rc.tiling()?;
    let cover = tiling.cover()?;
    // Domain: region plus the exterior ring.
    let ring_rh: Vec<Rhombus> = rc.ring.iter().map(|f| crate::interface::project_face(f).0).collect();
    let mut owner: HashMap<Triangle, Rhombus> = HashMap::new();
    for (t, &i) in &cover {
        owner.insert(*t, tiling.rhombi[i]);
    }
    let ring_tris: HashSet<Triangle> = ring_rh.iter().flat_map(|r| r.triangles()).collect();
    for r in &ring_rh {
        for t in r.triangles() {
            owner.entry(t).or_insert(*r);
        }
    }
    let cut_edges = c.plane_edges(rc);
    let cut_tris = c.triangles(rc);
    let cut_vertices: HashSet<PlaneVertex> = c.vertices.iter().copied().collect();

    // Components of the domain minus the contour.
    let mut comp: HashMap<Triangle, usize> = HashMap::new();
    let mut comps: Vec<Vec<Triangle>> = Vec::new();
    let mut keys: Vec<Triangle> = owner.keys().copied().filter(|t| !cut_tris.contains(t)).collect();
    keys.sort();
    for &s in &keys {
        if comp.contains_key(&s) {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![s];
        comp.insert(s, id);
        let mut members = vec![];
        while let Some(t) = stack.pop() {
            members.push(t);
            for n in t.neighbours() {
                if !owner.contains_key(&n) || cut_tris.contains(&n) || comp.contains_key(&n) {
                    continue;
                }
                if cut_edges.contains(&t.shared_edge(&n).unwrap()) {
                    continue;
                }
                comp.insert(n, id);
                stack.push(n);
            }
        }
        comps.push(members);
    }
    let exterior: HashSet<usize> = ring_tris.iter().filter_map(|t| comp.get(t).copied()).collect();
    let adjacent_tau = |members: &[Triangle]| -> Result<Option<u8>> {
        let taus: BTreeSet<u8> = members
            .iter()
            .filter(|t| t.vertices().iter().any(|v| cut_vertices.contains(v)))
            .map(|t| owner[t].tau())
            .collect();
        match taus.len() {
            0 => Ok(None),
            1 => Ok(taus.into_iter().next()),
            _ => Err(Error::Invariant(format!("region next to the contour carries types {taus:?}"))),
        }
    };
    let mut ext_taus = BTreeSet::new();
    for &e in &exterior {
        if let Some(t) = adjacent_tau(&comps[e])? {
            ext_taus.insert(t);
        }
    }
    if ext_taus.len() != 1 {
        return Err(Error::Invariant(format!("exterior of the contour carries types {ext_taus:?}")));
    }
    let tau0 = *ext_taus.iter().next().unwrap();

    // Fill everything outside the exterior with the uniform tau0 tiling.
    let mut assign: HashMap<Triangle, Rhombus> = HashMap::new();
    let fill: BTreeSet<Triangle> = cover
        .keys()
        .copied()
        .filter(|t| comp.get(t).is_none_or(|c| !exterior.contains(c)))
        .collect();
    for t in cover.keys() {
        if !fill.contains(t) {
            assign.insert(*t, owner[t]);
        }
    }
    for t in &fill {
        let p = t.canonical_partner(tau0);
        if !fill.contains(&p) {
            return Err(Error::Invariant(format!("fill rhombus at {t:?} crosses into the exterior")));
        }
        assign.insert(*t, Rhombus::from_triangles(*t, p)?);
    }

    // Stamp translated interiors.
    let mut claimed: HashMap<Triangle, (usize, Rhombus)> = HashMap::new();
    let mut shifts = Vec::new();
    for (id, members) in comps.iter().enumerate() {
        if exterior.contains(&id) {
            continue;
        }
        let tau_i = adjacent_tau(members)?
            .ok_or_else(|| Error::Invariant("interior not adjacent to its contour".into()))?;
        let n = match (tau_i + 3 - tau0) % 3 {
            0 => 0i64,
            1 => 1,
            _ => -1,
        };
        shifts.push((n, members.len()));
        let rh: BTreeSet<Rhombus> = members.iter().map(|t| owner[t]).collect();
        for r in rh {
            let r2 = r.shift((n, n));
            // Translated base is exterior-type base; overlaps are harmless.
            if r2.tau() == tau0 {
                continue;
            }
            for t in r2.triangles() {
                if !fill.contains(&t) {
                    return Err(Error::Invariant(format!(
                        "translated contour rhombus {r2:?} leaves the filled area"
                    )));
                }
                if let Some((other, _)) = claimed.insert(t, (id, r2)) {
                    return Err(Error::Invariant(format!(
                        "translated interiors {other} and {id} intersect at {t:?}"
                    )));
                }
            }
        }
    }
    for (t, (_, r)) in &claimed {
        let old = assign[t];
        if old != *r {
            for u in old.triangles() {
                if !claimed.contains_key(&u) {
                    return Err(Error::Invariant(format!("stamp at {t:?} splits fill rhombus {old:?}")));
                }
            }
        }
    }
    for (t, (_, r)) in &claimed {
        assign.insert(*t, *r);
    }
    let rhombi: BTreeSet<Rhombus> = assign.values().copied().collect();
    let new_tiling = Tiling::new(rhombi.into_iter().collect())?;
    if new_tiling.region() != tiling.region() {
        return Err(Error::Invariant("removal changed the region".into()));
    }
    let config = RConfiguration::from_tiling(&new_tiling)?;
    Ok(Removal { config, tiling: new_tiling, shifts, exterior_tau: tau0 })
}

/// Machine-readable decomposition summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub bases: Vec<BaseReport>,
    pub contours: Vec<ContourReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseReport {
    #[serde(rename = "type")]
    pub tau: u8,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    pub std_delta: usize,
    pub a_ov: f64,
    pub omega: usize,
    pub lambda: usize,
    #[serde(rename = "F")]
    pub f: f64,
}

pub fn report(dec: &Decomposition, k: &ModelCoefficients) -> DecompositionReport {
    DecompositionReport {
        bases: dec.bases.iter().map(|b| BaseReport { tau: b.tau, size: b.faces.len() }).collect(),
        contours: dec
            .contours
            .iter()
            .map(|c| ContourReport {
                std_delta: c.std_delta(),
                a_ov: c.sum_a(),
                omega: c.omega(),
                lambda: c.lambda(),
                f: f_energy(c, k),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::Region;

    #[test]
    fn test_staircase_has_no_contours() {
        let t = Tiling::uniform(&Region::hexagon(2), 0).unwrap();
        let rc = RConfiguration::from_tiling(&t).unwrap();
        let d = decompose(&rc);
        assert_eq!(d.contours.len(), 0);
        assert_eq!(d.bases.len(), 1);
        assert_eq!(d.bases[0].tau, 0);
    }

    #[test]
    fn test_cover_of_two_overlapping() {
        let r = Rhombus::new(PlaneVertex::new(0, 0), 2);
        let s: BTreeSet<Triangle> = r.triangles().into_iter().collect();
        assert_eq!(min_rhombus_cover(&s).unwrap(), 1);
    }
}
