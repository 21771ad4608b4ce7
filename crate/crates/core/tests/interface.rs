use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fk_rigidity::interface::{
    degeneracy_bounds_check, enumerate_tilings, height_function, interface_to_tiling, interior_vertices,
    lift_rhombus, project_face, project_point, random_tiling, tiling_to_interface, toggle_cube, EdgeKind, PlaneVertex,
    RConfiguration, Region, Rhombus, Tiling, E,
};
use fk_rigidity::lattice::{BoundaryCondition, Site, SpinConfiguration, Volume};
use fk_rigidity::model::Face;
use fk_rigidity::sampler::pinned_interface;
use fk_rigidity::Error;

fn pyramid() -> SpinConfiguration {
    let mut c = SpinConfiguration::ground_state(Volume::centered([7, 7, 7], 2), BoundaryCondition::Bc111);
    c.flip(Site::new(0, 0, 0));
    c
}

#[test]
fn test_face_round_trip_and_translation() {
    let f = Face::new(Site::new(0, 0, 0), 0);
    let (r, n) = project_face(&f);
    assert_eq!(n, 2);
    assert_eq!(lift_rhombus(&r, n).unwrap(), f);
    let g = f.translate([1, 1, 1]);
    let (r2, n2) = project_face(&g);
    assert_eq!((r2, n2), (r, n + 3));
    assert_eq!(r2.tau(), r.tau());
}

#[test]
fn test_three_orientations_give_three_edge_families() {
    let orients: BTreeSet<u8> = (0..3).map(|a| project_face(&Face::new(Site::new(0, 0, 0), a)).0.orient).collect();
    assert_eq!(orients.len(), 3);
    // Each rhombus misses exactly the edge direction of its own axis.
    for a in 0..3u8 {
        let (r, _) = project_face(&Face::new(Site::new(0, 0, 0), a));
        let dirs: BTreeSet<(i64, i64)> =
            r.sides().iter().map(|e| (e.to.a - e.from.a, e.to.b - e.from.b)).collect();
        assert_eq!(dirs.len(), 2);
    }
}

#[test]
fn test_staircase_round_trips() {
    let region = Region::type0_patch(3);
    let t = Tiling::uniform(&region, 0).unwrap();
    let faces = tiling_to_interface(&t).unwrap();
    for f in &faces {
        assert_eq!(project_face(f).1.rem_euclid(3), 0);
    }
    let back = interface_to_tiling(&faces).unwrap();
    assert!(back.is_uniform(0));
    assert_eq!(back, t);
}

#[test]
fn test_side_one_interfaces_differ_by_a_cube() {
    let ts = enumerate_tilings(&Region::hexagon(1)).unwrap();
    assert_eq!(ts.len(), 2);
    let a: BTreeSet<Face> = tiling_to_interface(&ts[0]).unwrap().into_iter().collect();
    let b: BTreeSet<Face> = tiling_to_interface(&ts[1]).unwrap().into_iter().collect();
    assert_eq!(a.symmetric_difference(&b).count(), 6);
    let mut toggled = a.clone();
    let found = (-3..=3)
        .flat_map(|x| (-3..=3).flat_map(move |y| (-3..=3).map(move |z| Site::new(x, y, z))))
        .any(|s| {
            toggled = a.clone();
            toggle_cube(&mut toggled, s);
            toggled == b
        });
    assert!(found);
}

#[test]
fn test_side_two_bijection() {
    let ts = enumerate_tilings(&Region::hexagon(2)).unwrap();
    assert_eq!(ts.len(), 20);
    let mut images = BTreeSet::new();
    for t in &ts {
        let faces = tiling_to_interface(t).unwrap();
        assert_eq!(&interface_to_tiling(&faces).unwrap(), t);
        assert_eq!(tiling_to_interface(&interface_to_tiling(&faces).unwrap()).unwrap(), faces);
        images.insert(faces);
    }
    assert_eq!(images.len(), 20);
}

#[test]
fn test_pyramid_is_reported_as_overlap() {
    let faces = pinned_interface(&pyramid());
    match interface_to_tiling(&faces) {
        Err(Error::Overlap(t)) => assert!(!t.is_empty()),
        other => panic!("expected overlap, got {other:?}"),
    }
    assert_eq!(interface_to_tiling(&[]).unwrap().area(), 0);
}

#[test]
fn test_edge_classes() {
    let t = Tiling::uniform(&Region::type0_patch(3), 0).unwrap();
    let rc = RConfiguration::from_tiling(&t).unwrap();
    assert!(rc.edges.iter().all(|e| e.kind == EdgeKind::Good));
    for e in &rc.edges {
        let (f, g) = (e.faces[0], e.faces[1]);
        assert_eq!(rc.face_tau(f), rc.face_tau(g));
        // Bent at 2π/3: the two faces are perpendicular in space.
        let fa = if f < rc.faces.len() { rc.faces[f].axis } else { rc.ring[f - rc.faces.len()].axis };
        let ga = if g < rc.faces.len() { rc.faces[g].axis } else { rc.ring[g - rc.faces.len()].axis };
        assert_ne!(fa, ga);
    }

    let mut faces: BTreeSet<Face> = rc.faces.iter().copied().collect();
    toggle_cube(&mut faces, Site::new(-1, -1, 0));
    let flipped = RConfiguration::new(faces.into_iter().collect(), rc.ring.clone()).unwrap();
    assert_eq!(flipped.count(EdgeKind::Delta), 6);
    for e in flipped.edges.iter().filter(|e| e.kind == EdgeKind::Delta) {
        assert_ne!(flipped.face_tau(e.faces[0]), flipped.face_tau(e.faces[1]));
    }

    let p = RConfiguration::new(pinned_interface(&pyramid()), vec![]).unwrap();
    let omega: Vec<_> = p.edges.iter().filter(|e| e.kind == EdgeKind::Omega).collect();
    assert!(!omega.is_empty());
    assert!(omega.iter().all(|e| e.faces.len() == 4));
    assert!(!p.is_minimal());
}

#[test]
fn test_enumeration_counts() {
    assert_eq!(enumerate_tilings(&Region::hexagon(1)).unwrap().len(), 2);
    assert_eq!(enumerate_tilings(&Region::hexagon(2)).unwrap().len(), 20);
    let single = Region::new(Rhombus::new(PlaneVertex::new(0, 0), 1).triangles());
    assert_eq!(enumerate_tilings(&single).unwrap().len(), 1);
    assert!(matches!(enumerate_tilings(&Region::hexagon(4)), Err(Error::Cap(_))));
}

#[test]
fn test_degeneracy_reports() {
    let r1 = degeneracy_bounds_check(&Region::hexagon(1)).unwrap();
    assert_eq!((r1.area, r1.count), (3, 2));
    assert!(r1.lower_holds && r1.upper_holds && r1.lower_applies);
    let r2 = degeneracy_bounds_check(&Region::hexagon(2)).unwrap();
    assert_eq!((r2.area, r2.count), (12, 20));
    assert_eq!(r2.lower, 16.0);
    let single = Region::new(Rhombus::new(PlaneVertex::new(0, 0), 1).triangles());
    let r = degeneracy_bounds_check(&single).unwrap();
    assert_eq!((r.area, r.count), (1, 1));
    assert!(!r.lower_holds && !r.lower_applies);
}

fn tilings() -> Vec<Tiling> {
    let mut out = enumerate_tilings(&Region::hexagon(2)).unwrap();
    out.extend(enumerate_tilings(&Region::type0_patch(3)).unwrap().into_iter().step_by(7));
    out
}

#[test]
fn test_height_rule_and_lift() {
    for t in tilings() {
        let h = height_function(&t, None).unwrap();
        for r in &t.rhombi {
            for e in r.sides() {
                let d = (e.to.a - e.from.a, e.to.b - e.from.b);
                let up = E.contains(&d);
                assert_eq!(h[&e.to] - h[&e.from], if up { 1 } else { -1 });
            }
        }
        let faces = tiling_to_interface(&t).unwrap();
        // Heights are pinned up to a multiple of 3 by the first vertex.
        let shifts: BTreeSet<i64> = faces
            .iter()
            .flat_map(|f| f.vertices())
            .map(|p| p[0] + p[1] + p[2] - h[&project_point(p)])
            .collect();
        assert_eq!(shifts.len(), 1);
    }
}

#[test]
fn test_angles_close_at_interior_vertices() {
    for t in tilings() {
        let region = t.region();
        let mut angle: BTreeMap<PlaneVertex, u32> = BTreeMap::new();
        for r in &t.rhombi {
            let v = r.vertices();
            // Obtuse corners at the lowest and highest vertex.
            for (i, w) in v.iter().enumerate() {
                *angle.entry(*w).or_default() += if i % 2 == 0 { 120 } else { 60 };
            }
        }
        for v in interior_vertices(&region) {
            assert_eq!(angle[&v], 360);
        }
    }
}

#[test]
fn test_overlap_sums_are_even_on_pyramid() {
    let p = RConfiguration::new(pinned_interface(&pyramid()), vec![]).unwrap();
    let total: u32 = p.overlap.values().sum();
    assert!(total > 0);
    assert_eq!(total % 2, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_random_tilings_round_trip(seed in any::<u64>(), steps in 0usize..150, radius in 3u32..6) {
        let region = Region::type0_patch(radius);
        let t = random_tiling(&region, steps, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(t.region(), region);
        let faces = tiling_to_interface(&t).unwrap();
        prop_assert_eq!(interface_to_tiling(&faces).unwrap(), t);
    }
}
