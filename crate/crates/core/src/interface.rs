//! Geometry of 111 interfaces.
//!
//! Integer points `p` of the dual lattice project onto the triangular lattice
//! through `P(p) = (p1 - p3, p2 - p3)`; the unit vectors `e1, e2, e3` land on
//! `(1,0), (0,1), (-1,-1)`, 120° apart. The class of a plane vertex is
//! `(p1 + p2 + p3) mod 3`, which equals `(a + b) mod 3`.
//!
//! A face dual to the bond `k -> k + e_a` has corners at coordinate sums
//! `n-1, n, n, n+1` with `n = k1+k2+k3+2`; it projects onto a rhombus spanned
//! by the two other unit vectors from its lowest corner, and its type is
//! `n mod 3`. `(rhombus, n)` determines the face.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::model::Face;

/// Vertex of the triangular lattice in axial coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaneVertex {
    pub a: i64,
    pub b: i64,
}

/// Projections of `e1, e2, e3`; stepping along one raises the height by 1.
pub const E: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, -1)];

impl PlaneVertex {
    pub const fn new(a: i64, b: i64) -> Self {
        PlaneVertex { a, b }
    }

    pub fn class(&self) -> u8 {
        (self.a + self.b).rem_euclid(3) as u8
    }

    pub fn shift(&self, d: (i64, i64)) -> Self {
        PlaneVertex::new(self.a + d.0, self.b + d.1)
    }

    pub fn step(&self, i: usize) -> Self {
        self.shift(E[i])
    }

    pub fn neighbours(&self) -> [PlaneVertex; 6] {
        [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)].map(|d| self.shift(d))
    }

    /// Graph distance on the triangular lattice.
    pub fn dist(&self, o: &PlaneVertex) -> i64 {
        let (x, y) = (self.a - o.a, self.b - o.b);
        if x.signum() * y.signum() >= 0 {
            x.abs().max(y.abs())
        } else {
            x.abs() + y.abs()
        }
    }

    /// Height of the all-type-0 staircase at this vertex, in `{-1, 0, 1}`.
    pub fn staircase_height(&self) -> i64 {
        match self.class() {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    /// Cartesian position (unit edge length) for rendering.
    pub fn xy(&self) -> (f64, f64) {
        (self.a as f64 - 0.5 * self.b as f64, self.b as f64 * 3f64.sqrt() / 2.0)
    }
}

/// Projection of an integer point.
pub fn project_point(p: [i64; 3]) -> PlaneVertex {
    PlaneVertex::new(p[0] - p[2], p[1] - p[2])
}

/// The integer point above `v` with coordinate sum `h`.
pub fn lift_point(v: PlaneVertex, h: i64) -> Result<[i64; 3]> {
    let r = h - v.a - v.b;
    if r.rem_euclid(3) != 0 {
        return Err(Error::Invariant(format!(
            "height {h} incompatible with class {} of vertex ({}, {})",
            v.class(),
            v.a,
            v.b
        )));
    }
    let m = r / 3;
    Ok([v.a + m, v.b + m, m])
}

/// Elementary triangle. `up` is `{(a,b),(a+1,b),(a+1,b+1)}`, otherwise
/// `{(a,b),(a,b+1),(a+1,b+1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triangle {
    pub a: i64,
    pub b: i64,
    pub up: bool,
}

impl Triangle {
    pub const fn new(a: i64, b: i64, up: bool) -> Self {
        Triangle { a, b, up }
    }

    pub fn vertices(&self) -> [PlaneVertex; 3] {
        let (a, b) = (self.a, self.b);
        if self.up {
            [PlaneVertex::new(a, b), PlaneVertex::new(a + 1, b), PlaneVertex::new(a + 1, b + 1)]
        } else {
            [PlaneVertex::new(a, b), PlaneVertex::new(a, b + 1), PlaneVertex::new(a + 1, b + 1)]
        }
    }

    /// Triangle spanned by three mutually adjacent vertices.
    pub fn from_vertices(vs: [PlaneVertex; 3]) -> Self {
        let a = vs.iter().map(|v| v.a).min().unwrap();
        let b = vs.iter().map(|v| v.b).min().unwrap();
        let up = !vs.contains(&PlaneVertex::new(a, b + 1));
        Triangle::new(a, b, up)
    }

    /// The three edge-neighbours.
    pub fn neighbours(&self) -> [Triangle; 3] {
        let (a, b) = (self.a, self.b);
        if self.up {
            [Triangle::new(a, b, false), Triangle::new(a, b - 1, false), Triangle::new(a + 1, b, false)]
        } else {
            [Triangle::new(a, b, true), Triangle::new(a, b + 1, true), Triangle::new(a - 1, b, true)]
        }
    }

    /// Edge shared with an adjacent triangle.
    pub fn shared_edge(&self, o: &Triangle) -> Option<PlaneEdge> {
        let mine = self.vertices();
        let common: Vec<PlaneVertex> = o.vertices().into_iter().filter(|v| mine.contains(v)).collect();
        (common.len() == 2).then(|| PlaneEdge::new(common[0], common[1]))
    }

    /// Partner across the edge avoiding the class-`tau` vertex: the rhombus
    /// this triangle belongs to in the uniform type-`tau` tiling.
    pub fn canonical_partner(&self, tau: u8) -> Triangle {
        let vs = self.vertices();
        let keep: Vec<PlaneVertex> = vs.iter().copied().filter(|v| v.class() != tau).collect();
        let e = PlaneEdge::new(keep[0], keep[1]);
        self.neighbours()
            .into_iter()
            .find(|t| t.shared_edge(self) == Some(e))
            .expect("every edge has a neighbour")
    }

    /// Translation by a lattice vector.
    pub fn shift(&self, d: (i64, i64)) -> Triangle {
        Triangle::new(self.a + d.0, self.b + d.1, self.up)
    }
}

/// Undirected edge of the triangular lattice, stored with `to - from` in
/// `{(1,0), (0,1), (1,1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaneEdge {
    pub from: PlaneVertex,
    pub to: PlaneVertex,
}

impl PlaneEdge {
    pub fn new(v: PlaneVertex, w: PlaneVertex) -> Self {
        let d = (w.a - v.a, w.b - v.b);
        match d {
            (1, 0) | (0, 1) | (1, 1) => PlaneEdge { from: v, to: w },
            (-1, 0) | (0, -1) | (-1, -1) => PlaneEdge { from: w, to: v },
            _ => panic!("vertices ({},{}) and ({},{}) are not adjacent", v.a, v.b, w.a, w.b),
        }
    }

    /// Height increment walking `from -> to` along a tiling edge.
    pub fn increment(&self) -> i64 {
        match (self.to.a - self.from.a, self.to.b - self.from.b) {
            (1, 0) | (0, 1) => 1,
            _ => -1,
        }
    }

    /// The unordered pair of endpoint classes, as the edge family.
    pub fn family(&self) -> (u8, u8) {
        let (x, y) = (self.from.class(), self.to.class());
        (x.min(y), x.max(y))
    }
}

/// Projection of a face: spanned by the two unit vectors other than
/// `E[orient]` from `base`, the vertex of lowest height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rhombus {
    pub base: PlaneVertex,
    pub orient: u8,
}

impl Rhombus {
    pub fn new(base: PlaneVertex, orient: u8) -> Self {
        assert!(orient < 3);
        Rhombus { base, orient }
    }

    fn span(&self) -> (usize, usize) {
        let a = self.orient as usize;
        ((a + 1) % 3, (a + 2) % 3)
    }

    /// Corners in cyclic order starting at the base; heights are
    /// `n-1, n, n+1, n`.
    pub fn vertices(&self) -> [PlaneVertex; 4] {
        let (b, c) = self.span();
        let v0 = self.base;
        [v0, v0.step(b), v0.step(b).step(c), v0.step(c)]
    }

    pub fn tau(&self) -> u8 {
        (self.base.class() + 1) % 3
    }

    pub fn triangles(&self) -> [Triangle; 2] {
        let [v0, v1, v2, v3] = self.vertices();
        [Triangle::from_vertices([v0, v1, v2]), Triangle::from_vertices([v0, v2, v3])]
    }

    /// The short diagonal, shared by the two triangles.
    pub fn diagonal(&self) -> PlaneEdge {
        let v = self.vertices();
        PlaneEdge::new(v[0], v[2])
    }

    pub fn sides(&self) -> [PlaneEdge; 4] {
        let v = self.vertices();
        [
            PlaneEdge::new(v[0], v[1]),
            PlaneEdge::new(v[1], v[2]),
            PlaneEdge::new(v[2], v[3]),
            PlaneEdge::new(v[3], v[0]),
        ]
    }

    /// Rhombus formed by two adjacent triangles.
    pub fn from_triangles(t1: Triangle, t2: Triangle) -> Result<Rhombus> {
        let e = t1
            .shared_edge(&t2)
            .ok_or_else(|| Error::Invalid("triangles are not adjacent".into()))?;
        // The diagonal joins base and base - E[orient].
        let d = (e.to.a - e.from.a, e.to.b - e.from.b);
        let (orient, base) = match d {
            (1, 1) => (2, e.from),
            (1, 0) => (0, e.to),
            (0, 1) => (1, e.to),
            _ => unreachable!(),
        };
        Ok(Rhombus::new(base, orient))
    }

    pub fn shift(&self, d: (i64, i64)) -> Rhombus {
        Rhombus::new(self.base.shift(d), self.orient)
    }

    /// Interior point for rendering.
    pub fn centre(&self) -> (f64, f64) {
        let v = self.vertices();
        let (x0, y0) = v[0].xy();
        let (x2, y2) = v[2].xy();
        ((x0 + x2) / 2.0, (y0 + y2) / 2.0)
    }
}

/// Projected rhombus and level of a face.
pub fn project_face(face: &Face) -> (Rhombus, i64) {
    let p0 = face.corner();
    let n = p0[0] + p0[1] + p0[2] + 1;
    (Rhombus::new(project_point(p0), face.axis), n)
}

/// Inverse of [`project_face`].
pub fn lift_rhombus(r: &Rhombus, n: i64) -> Result<Face> {
    let p0 = lift_point(r.base, n - 1)?;
    let mut k = p0;
    k[r.orient as usize] -= 1;
    Ok(Face::new(Site { k }, r.orient))
}

/// Finite set of triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub triangles: BTreeSet<Triangle>,
}

impl Region {
    pub fn new(triangles: impl IntoIterator<Item = Triangle>) -> Self {
        Region { triangles: triangles.into_iter().collect() }
    }

    /// Regular hexagon of the given side around a lattice vertex. Even sides
    /// are centred on a class-0 vertex and odd sides on a class-1 vertex,
    /// which makes sides 1 and 2 unions of type-0 rhombi.
    pub fn hexagon(side: u32) -> Self {
        let c = if side.is_multiple_of(2) { PlaneVertex::new(0, 0) } else { PlaneVertex::new(1, 0) };
        let s = side as i64;
        let mut out = BTreeSet::new();
        for a in c.a - s - 1..=c.a + s {
            for b in c.b - s - 1..=c.b + s {
                for up in [true, false] {
                    let t = Triangle::new(a, b, up);
                    if t.vertices().iter().all(|v| v.dist(&c) <= s) {
                        out.insert(t);
                    }
                }
            }
        }
        Region { triangles: out }
    }

    /// Union of the type-0 rhombi whose corners all lie within graph
    /// distance `radius` of the origin.
    pub fn type0_patch(radius: u32) -> Self {
        let r = radius as i64;
        let c = PlaneVertex::new(0, 0);
        let mut out = BTreeSet::new();
        for a in -r - 2..=r + 2 {
            for b in -r - 2..=r + 2 {
                for o in 0..3 {
                    let rh = Rhombus::new(PlaneVertex::new(a, b), o);
                    if rh.tau() == 0 && rh.vertices().iter().all(|v| v.dist(&c) <= r) {
                        out.extend(rh.triangles());
                    }
                }
            }
        }
        Region { triangles: out }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        self.triangles.contains(t)
    }

    pub fn vertices(&self) -> BTreeSet<PlaneVertex> {
        self.triangles.iter().flat_map(|t| t.vertices()).collect()
    }

    /// Whether the uniform type-`tau` tiling restricts to a tiling of the
    /// region, i.e. the region is a union of type-`tau` rhombi.
    pub fn admits_uniform(&self, tau: u8) -> bool {
        self.triangles.iter().all(|t| self.contains(&t.canonical_partner(tau)))
    }

    /// Edges with triangles of the region on exactly one side.
    pub fn boundary_edges(&self) -> Vec<PlaneEdge> {
        let mut out = Vec::new();
        for t in &self.triangles {
            for n in t.neighbours() {
                if !self.contains(&n) {
                    out.push(t.shared_edge(&n).unwrap());
                }
            }
        }
        out.sort();
        out
    }
}

/// Exact rhombus cover of a region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tiling {
    pub rhombi: Vec<Rhombus>,
}

impl Tiling {
    pub fn new(mut rhombi: Vec<Rhombus>) -> Result<Self> {
        rhombi.sort();
        let t = Tiling { rhombi };
        t.cover()?;
        Ok(t)
    }

    /// Triangle -> index of the covering rhombus; fails on double cover.
    pub fn cover(&self) -> Result<HashMap<Triangle, usize>> {
        let mut m = HashMap::new();
        let mut bad = BTreeSet::new();
        for (i, r) in self.rhombi.iter().enumerate() {
            for t in r.triangles() {
                if m.insert(t, i).is_some() {
                    bad.insert(t);
                }
            }
        }
        if bad.is_empty() {
            Ok(m)
        } else {
            Err(Error::Overlap(bad.iter().map(|t| format!("{t:?}")).collect()))
        }
    }

    pub fn region(&self) -> Region {
        Region::new(self.rhombi.iter().flat_map(|r| r.triangles()))
    }

    /// The uniform type-`tau` tiling of a region admitting it.
    pub fn uniform(region: &Region, tau: u8) -> Result<Self> {
        if !region.admits_uniform(tau) {
            return Err(Error::Invalid(format!("region is not a union of type-{tau} rhombi")));
        }
        let mut seen = HashSet::new();
        let mut rh = Vec::new();
        for t in &region.triangles {
            if seen.insert(*t) {
                let p = t.canonical_partner(tau);
                seen.insert(p);
                rh.push(Rhombus::from_triangles(*t, p)?);
            }
        }
        Tiling::new(rh)
    }

    pub fn area(&self) -> usize {
        self.rhombi.len()
    }

    /// Whether every rhombus has type 0 (the staircase).
    pub fn is_uniform(&self, tau: u8) -> bool {
        self.rhombi.iter().all(|r| r.tau() == tau)
    }

    /// Tiling edges shared by two rhombi, with the two rhombus indices.
    pub fn interior_edges(&self) -> Vec<(PlaneEdge, usize, usize)> {
        let mut m: BTreeMap<PlaneEdge, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rhombi.iter().enumerate() {
            for e in r.sides() {
                m.entry(e).or_default().push(i);
            }
        }
        m.into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(e, v)| (e, v[0], v[1]))
            .collect()
    }

    /// Number of tiling edges between rhombi of different types.
    pub fn delta_edges(&self) -> usize {
        self.interior_edges()
            .iter()
            .filter(|(_, i, j)| self.rhombi[*i].tau() != self.rhombi[*j].tau())
            .count()
    }
}

/// Integer heights on plane vertices.
pub type HeightFunction = BTreeMap<PlaneVertex, i64>;

/// Height function of a tiling: `±1` increments along rhombus sides by
/// direction, pinned so that the smallest vertex carries `reference`
/// (default: its staircase height).
pub fn height_function(tiling: &Tiling, reference: Option<i64>) -> Result<HeightFunction> {
    let mut adj: HashMap<PlaneVertex, Vec<(PlaneVertex, i64)>> = HashMap::new();
    for r in &tiling.rhombi {
        for e in r.sides() {
            let d = e.increment();
            adj.entry(e.from).or_default().push((e.to, d));
            adj.entry(e.to).or_default().push((e.from, -d));
        }
    }
    let mut h = HeightFunction::new();
    let mut keys: Vec<PlaneVertex> = adj.keys().copied().collect();
    keys.sort();
    for start in keys {
        if h.contains_key(&start) {
            continue;
        }
        let h0 = if h.is_empty() {
            reference.unwrap_or_else(|| start.staircase_height())
        } else {
            start.staircase_height()
        };
        h.insert(start, h0);
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            let hv = h[&v];
            for &(w, d) in &adj[&v] {
                match h.get(&w) {
                    Some(&hw) if hw != hv + d => {
                        return Err(Error::Invariant(format!(
                            "inconsistent increment on edge ({},{})-({},{}): {} vs {}",
                            v.a, v.b, w.a, w.b, hw, hv + d
                        )))
                    }
                    Some(_) => {}
                    None => {
                        h.insert(w, hv + d);
                        q.push_back(w);
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Lifts each rhombus to the face whose corners carry its heights.
pub fn tiling_to_interface(tiling: &Tiling) -> Result<Vec<Face>> {
    let h = height_function(tiling, None)?;
    let mut faces = Vec::with_capacity(tiling.area());
    for r in &tiling.rhombi {
        let v = r.vertices();
        let n = h[&v[0]] + 1;
        if h[&v[1]] != n || h[&v[2]] != n + 1 || h[&v[3]] != n {
            return Err(Error::Invariant(format!("rhombus {r:?} heights not n-1,n,n+1,n")));
        }
        faces.push(lift_rhombus(r, n)?);
    }
    faces.sort();
    Ok(faces)
}

/// Projects a minimal interface; any doubly covered triangle is an error
/// listing the offending triangles.
pub fn interface_to_tiling(faces: &[Face]) -> Result<Tiling> {
    let rh: Vec<Rhombus> = faces.iter().map(|f| project_face(f).0).collect();
    Tiling::new(rh)
}

/// Heights read off an interface: the mean coordinate sum of the face
/// corners above each plane vertex.
pub fn interface_heights(faces: &[Face]) -> BTreeMap<PlaneVertex, f64> {
    let mut acc: BTreeMap<PlaneVertex, BTreeSet<i64>> = BTreeMap::new();
    for f in faces {
        for p in f.vertices() {
            acc.entry(project_point(p)).or_default().insert(p[0] + p[1] + p[2]);
        }
    }
    acc.into_iter()
        .map(|(v, hs)| (v, hs.iter().sum::<i64>() as f64 / hs.len() as f64))
        .collect()
}

/// Upper bound on region size for exhaustive enumeration.
pub const MAX_ENUM_TRIANGLES: usize = 60;

/// All tilings of a region by backtracking on the first uncovered triangle
/// in lexicographic order. The result order is deterministic.
pub fn enumerate_tilings(region: &Region) -> Result<Vec<Tiling>> {
    if region.len() > MAX_ENUM_TRIANGLES {
        return Err(Error::Cap(format!(
            "enumeration limited to {MAX_ENUM_TRIANGLES} triangles, region has {}",
            region.len()
        )));
    }
    let tris: Vec<Triangle> = region.triangles.iter().copied().collect();
    let idx: HashMap<Triangle, usize> = tris.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let nbrs: Vec<Vec<usize>> = tris
        .iter()
        .map(|t| t.neighbours().iter().filter_map(|n| idx.get(n).copied()).collect())
        .collect();
    let mut covered = vec![false; tris.len()];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    fn rec(
        tris: &[Triangle],
        nbrs: &[Vec<usize>],
        covered: &mut [bool],
        stack: &mut Vec<(usize, usize)>,
        out: &mut Vec<Tiling>,
    ) {
        let Some(i) = covered.iter().position(|c| !c) else {
            let rh = stack
                .iter()
                .map(|&(a, b)| Rhombus::from_triangles(tris[a], tris[b]).unwrap())
                .collect();
            let mut rh: Vec<Rhombus> = rh;
            rh.sort();
            out.push(Tiling { rhombi: rh });
            return;
        };
        covered[i] = true;
        for &j in &nbrs[i] {
            if !covered[j] {
                covered[j] = true;
                stack.push((i, j));
                rec(tris, nbrs, covered, stack, out);
                stack.pop();
                covered[j] = false;
            }
        }
        covered[i] = false;
    }
    rec(&tris, &nbrs, &mut covered, &mut stack, &mut out);
    Ok(out)
}

/// Counting bounds `2^(A/3) <= N <= 2^(2A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub area: usize,
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// The lower bound is only claimed for `A >= 3`.
    pub lower_applies: bool,
}

pub fn degeneracy_bounds_check(region: &Region) -> Result<DegeneracyReport> {
    let tilings = enumerate_tilings(region)?;
    let area = region.len() / 2;
    let count = tilings.len();
    let lower = 2f64.powf(area as f64 / 3.0);
    let upper = 2f64.powf(2.0 * area as f64);
    Ok(DegeneracyReport {
        area,
        count,
        lower,
        upper,
        lower_holds: count as f64 >= lower,
        upper_holds: count as f64 <= upper,
        lower_applies: area >= 3,
    })
}

/// Whether `v` can be flipped: all six neighbours are present and it is a
/// strict local extremum of `h`. Returns the height change.
pub fn flip_direction(h: &HeightFunction, v: PlaneVertex) -> Option<i64> {
    let hv = *h.get(&v)?;
    let mut nb = Vec::with_capacity(6);
    for w in v.neighbours() {
        nb.push(*h.get(&w)?);
    }
    if nb.iter().all(|&x| x < hv) {
        Some(-3)
    } else if nb.iter().all(|&x| x > hv) {
        Some(3)
    } else {
        None
    }
}

/// Rebuilds the tiling of `region` encoded by a height function: each
/// triangle pairs across its edge whose endpoint heights differ by 2.
pub fn tiling_from_heights(region: &Region, h: &HeightFunction) -> Result<Tiling> {
    let mut rh = BTreeSet::new();
    for t in &region.triangles {
        let vs = t.vertices();
        let mut partner = None;
        for n in t.neighbours() {
            let e = t.shared_edge(&n).unwrap();
            if (h[&e.from] - h[&e.to]).abs() == 2 {
                partner = Some(n);
            }
        }
        let p = partner.ok_or_else(|| Error::Invariant(format!("triangle {t:?} has no diagonal; heights {:?}", vs.map(|v| h.get(&v))) ))?;
        if !region.contains(&p) {
            return Err(Error::Invariant(format!("triangle {t:?} pairs outside the region")));
        }
        rh.insert(Rhombus::from_triangles(*t, p)?);
    }
    Tiling::new(rh.into_iter().collect())
}

/// Tiling reached from the uniform type-0 tiling by `steps` attempted
/// height flips at uniformly chosen interior vertices.
pub fn random_tiling<R: rand::Rng + ?Sized>(region: &Region, steps: usize, rng: &mut R) -> Result<Tiling> {
    let t = Tiling::uniform(region, 0)?;
    let mut h = height_function(&t, None)?;
    let inner = interior_vertices(region);
    if inner.is_empty() {
        return Ok(t);
    }
    for _ in 0..steps {
        let v = inner[rng.gen_range(0..inner.len())];
        if let Some(d) = flip_direction(&h, v) {
            *h.get_mut(&v).unwrap() += d;
        }
    }
    tiling_from_heights(region, &h)
}

/// Vertices of the region all of whose six triangles are in the region.
pub fn interior_vertices(region: &Region) -> Vec<PlaneVertex> {
    region
        .vertices()
        .into_iter()
        .filter(|v| {
            let around = [
                Triangle::new(v.a, v.b, true),
                Triangle::new(v.a, v.b, false),
                Triangle::new(v.a - 1, v.b, true),
                Triangle::new(v.a - 1, v.b - 1, true),
                Triangle::new(v.a - 1, v.b - 1, false),
                Triangle::new(v.a, v.b - 1, false),
            ];
            around.iter().all(|t| region.contains(t))
        })
        .collect()
}

/// Faces of the type-0 staircase just outside `region`: every type-0
/// rhombus not in the region that shares a vertex with it, lifted at its
/// staircase heights. Used to classify edges on the region boundary.
pub fn exterior_ring(region: &Region) -> Vec<Face> {
    let verts = region.vertices();
    let mut ring = BTreeSet::new();
    for v in &verts {
        for t in [
            Triangle::new(v.a, v.b, true),
            Triangle::new(v.a, v.b, false),
            Triangle::new(v.a - 1, v.b, true),
            Triangle::new(v.a - 1, v.b - 1, true),
            Triangle::new(v.a - 1, v.b - 1, false),
            Triangle::new(v.a, v.b - 1, false),
        ] {
            if region.contains(&t) {
                continue;
            }
            let p = t.canonical_partner(0);
            if region.contains(&p) {
                continue;
            }
            let r = Rhombus::from_triangles(t, p).unwrap();
            let n = r.base.staircase_height() + 1;
            ring.insert(lift_rhombus(&r, n).expect("staircase heights match classes"));
        }
    }
    ring.into_iter().collect()
}

/// Local type of an interface edge shared by two or four faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Bend between two non-overlapping rhombi of equal type.
    Good,
    /// Coplanar neighbours, projecting to rhombi of different types.
    Delta,
    /// Four faces around one edge.
    Omega,
    /// Bend where at least one rhombus is overlapping.
    Bend,
}

/// Interface edge with its incident faces (indices into `faces ++ ring`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeInfo {
    pub start: [i64; 3],
    pub dir: u8,
    pub plane: PlaneEdge,
    pub faces: Vec<usize>,
    pub kind: EdgeKind,
}

/// Projection of an interface: rhombi with overlap numbers and classified
/// edges. `ring` holds exterior faces that only serve to classify edges on
/// the region boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RConfiguration {
    pub faces: Vec<Face>,
    pub ring: Vec<Face>,
    pub rhombi: Vec<Rhombus>,
    pub levels: Vec<i64>,
    /// `o(t)` for every covered triangle of the interior faces.
    pub overlap: BTreeMap<Triangle, u32>,
    /// Per interior face: whether its rhombus contains an overlapping triangle.
    pub overlapping: Vec<bool>,
    pub edges: Vec<EdgeInfo>,
    /// Stacked parallel face pairs at unit distance (indices into `faces`).
    pub lambda_links: Vec<(usize, usize)>,
}

impl RConfiguration {
    pub fn new(faces: Vec<Face>, ring: Vec<Face>) -> Result<Self> {
        let mut faces = faces;
        faces.sort();
        faces.dedup();
        let inner: HashSet<Face> = faces.iter().copied().collect();
        let ring: Vec<Face> = ring.into_iter().filter(|f| !inner.contains(f)).collect();
        let all: Vec<Face> = faces.iter().chain(ring.iter()).copied().collect();
        let proj: Vec<(Rhombus, i64)> = all.iter().map(project_face).collect();
        let nf = faces.len();
        let mut count: BTreeMap<Triangle, u32> = BTreeMap::new();
        for (r, _) in &proj[..nf] {
            for t in r.triangles() {
                *count.entry(t).or_default() += 1;
            }
        }
        let overlap: BTreeMap<Triangle, u32> = count.into_iter().map(|(t, c)| (t, c - 1)).collect();
        let mut overlapping: Vec<bool> = proj[..nf]
            .iter()
            .map(|(r, _)| r.triangles().iter().any(|t| overlap[t] > 0))
            .collect();
        let ring_overlap = vec![false; ring.len()];
        overlapping.extend(ring_overlap);

        let mut emap: BTreeMap<([i64; 3], u8), Vec<usize>> = BTreeMap::new();
        for (i, f) in all.iter().enumerate() {
            for e in f.edges() {
                emap.entry(e).or_default().push(i);
            }
        }
        let mut edges = Vec::new();
        for ((start, dir), fs) in emap {
            if fs.len() < 2 || fs.iter().all(|&i| i >= nf) {
                continue;
            }
            let mut end = start;
            end[dir as usize] += 1;
            let plane = PlaneEdge::new(project_point(start), project_point(end));
            let kind = match fs.len() {
                2 => {
                    let (f, g) = (all[fs[0]], all[fs[1]]);
                    if f.axis == g.axis {
                        EdgeKind::Delta
                    } else if !overlapping[fs[0]] && !overlapping[fs[1]] {
                        if proj[fs[0]].0.tau() != proj[fs[1]].0.tau() {
                            return Err(Error::Invariant(format!("bend between types at {start:?}")));
                        }
                        EdgeKind::Good
                    } else {
                        EdgeKind::Bend
                    }
                }
                4 => EdgeKind::Omega,
                k => {
                    return Err(Error::Invalid(format!(
                        "{k} faces meet at edge {start:?}/{dir}; not a closed surface"
                    )))
                }
            };
            edges.push(EdgeInfo { start, dir, plane, faces: fs, kind });
        }
        overlapping.truncate(nf);

        let idx: HashMap<Face, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut lambda_links = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            let mut d = [0i64; 3];
            d[f.axis as usize] = 1;
            if let Some(&j) = idx.get(&f.translate(d)) {
                lambda_links.push((i, j));
            }
        }
        let (rhombi, levels) = proj[..nf].iter().copied().unzip();
        Ok(RConfiguration { faces, ring, rhombi, levels, overlap, overlapping, edges, lambda_links })
    }

    /// Configuration of a tiling with the type-0 staircase outside.
    pub fn from_tiling(tiling: &Tiling) -> Result<Self> {
        let faces = tiling_to_interface(tiling)?;
        let ring = exterior_ring(&tiling.region());
        Self::new(faces, ring)
    }

    pub fn is_minimal(&self) -> bool {
        self.overlap.values().all(|&o| o == 0)
    }

    /// Type of the rhombus of face `i` (interior or ring).
    pub fn face_tau(&self, i: usize) -> u8 {
        if i < self.faces.len() {
            self.rhombi[i].tau()
        } else {
            project_face(&self.ring[i - self.faces.len()]).0.tau()
        }
    }

    pub fn is_ring(&self, i: usize) -> bool {
        i >= self.faces.len()
    }

    /// Kind of the interface edge projecting onto `e` between the given
    /// rhombi, if any.
    pub fn classify_local(&self, e: &PlaneEdge) -> Vec<EdgeKind> {
        self.edges.iter().filter(|x| x.plane == *e).map(|x| x.kind).collect()
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    /// Good edges over edges shared by two non-overlapping interior faces.
    pub fn good_pair_fraction(&self) -> Option<f64> {
        let nf = self.faces.len();
        let mut good = 0usize;
        let mut total = 0usize;
        for e in &self.edges {
            if e.faces.len() != 2 || e.faces.iter().any(|&i| i >= nf || self.overlapping[i]) {
                continue;
            }
            total += 1;
            if e.kind == EdgeKind::Good {
                good += 1;
            }
        }
        (total > 0).then(|| good as f64 / total as f64)
    }

    /// Tiling of the region when the configuration is minimal.
    pub fn tiling(&self) -> Result<Tiling> {
        Tiling::new(self.rhombi.clone())
    }
}

/// Toggles the six faces of the unit cube around `site` in a face set; on a
/// pinned interface this is the effect of flipping the spin at `site`.
pub fn toggle_cube(faces: &mut BTreeSet<Face>, site: Site) {
    for a in 0..3u8 {
        let mut d = [0i64; 3];
        d[a as usize] = -1;
        for f in [Face::new(site, a), Face::new(site.offset(d), a)] {
            if !faces.remove(&f) {
                faces.insert(f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_rhombus_triangles_round_trip() {
        for o in 0..3 {
            let r = Rhombus::new(PlaneVertex::new(2, -1), o);
            let [t1, t2] = r.triangles();
            assert_ne!(t1, t2);
            assert_eq!(Rhombus::from_triangles(t1, t2).unwrap(), r);
            assert_eq!(t1.shared_edge(&t2), Some(r.diagonal()));
        }
    }

    #[test]
    fn test_face_projection_round_trip() {
        let f = Face::new(Site::new(0, 0, 0), 0);
        let (r, n) = project_face(&f);
        assert_eq!(n, 2);
        assert_eq!(r.tau(), 2);
        assert_eq!(lift_rhombus(&r, n).unwrap(), f);
        let (r3, n3) = project_face(&f.translate([1, 1, 1]));
        assert_eq!((r3, n3), (r, n + 3));
    }

    #[test]
    fn test_hexagon_counts() {
        assert_eq!(Region::hexagon(1).len(), 6);
        assert_eq!(Region::hexagon(2).len(), 24);
        assert_eq!(Region::hexagon(3).len(), 54);
        assert!(Region::hexagon(1).admits_uniform(0));
        assert!(Region::hexagon(2).admits_uniform(0));
    }

    #[test]
    fn test_enumerate_counts() {
        assert_eq!(enumerate_tilings(&Region::hexagon(1)).unwrap().len(), 2);
        assert_eq!(enumerate_tilings(&Region::hexagon(2)).unwrap().len(), 20);
    }
}
