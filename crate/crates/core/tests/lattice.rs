use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;

use fk_rigidity::lattice::{
    boundary_spin, connectivity_g, enumerate_clusters, is_connected, stagger, BondCluster, BoundaryCondition, Site,
    SpinConfiguration, Volume,
};

/// Shortest closed lattice walk from the first site through all others,
/// found by breadth-first search over (position, visited set).
fn closed_walk_bfs(sites: &[Site]) -> u32 {
    let idx = |s: Site| sites.iter().position(|&x| x == s);
    let full = (1u32 << sites.len()) - 1;
    let start = (sites[0], 1u32);
    if full == 1 {
        return 0;
    }
    let mut seen = HashSet::from([start]);
    let mut q = VecDeque::from([(start, 0u32)]);
    while let Some(((pos, mask), d)) = q.pop_front() {
        for n in pos.neighbours() {
            let m = mask | idx(n).map_or(0, |i| 1 << i);
            if n == sites[0] && m == full {
                return d + 1;
            }
            // Walks never need to stray further than 2 from the set.
            if sites.iter().map(|s| s.l1(&n)).min().unwrap() > 2 {
                continue;
            }
            if seen.insert((n, m)) {
                q.push_back(((n, m), d + 1));
            }
        }
    }
    unreachable!("closed walk always exists")
}

#[test]
fn test_boundary_spin_examples() {
    assert_eq!(boundary_spin(BoundaryCondition::Bc100, Site::new(0, 0, 0)), 1);
    assert_eq!(boundary_spin(BoundaryCondition::Bc111, Site::new(-1, -1, -1)), -1);
    assert_eq!(boundary_spin(BoundaryCondition::HomPlus, Site::new(3, -7, 2)), 1);
}

#[test]
fn test_connectivity_examples() {
    let g = |s: &[Site]| connectivity_g(&BondCluster::new(s.iter().copied()).unwrap());
    assert_eq!(g(&[Site::new(0, 0, 0), Site::new(1, 0, 0)]), 1);
    assert_eq!(g(&[Site::new(0, 0, 0), Site::new(1, 0, 0), Site::new(2, 0, 0)]), 3);
    assert_eq!(g(&[Site::new(0, 0, 0), Site::new(1, 0, 0), Site::new(0, 1, 0), Site::new(1, 1, 0)]), 3);
    assert!(BondCluster::new([Site::new(0, 0, 0), Site::new(2, 0, 0)]).is_err());
}

#[test]
fn test_enumerate_small_cutoffs() {
    let vol = Volume::centered([5, 5, 5], 0);
    let a = Site::new(0, 0, 0);
    let c0 = enumerate_clusters(&vol, a, 0).unwrap();
    assert_eq!(c0.len(), 1);
    let c1 = enumerate_clusters(&vol, a, 1).unwrap();
    assert_eq!(c1.len(), 7);
    assert_eq!(c1.iter().filter(|c| c.len() == 2).count(), 6);
}

#[test]
fn test_enumerate_matches_subset_scan() {
    let vol = Volume::centered([7, 7, 7], 0);
    let a = Site::new(0, 0, 0);
    let got: BTreeSet<Vec<Site>> =
        enumerate_clusters(&vol, a, 3).unwrap().iter().map(|c| c.sites().to_vec()).collect();
    let near: Vec<Site> = vol.sites().filter(|s| s.l1(&a) <= 3 && *s != a).collect();
    let mut want = BTreeSet::new();
    let n = near.len();
    let mut consider = |mut set: Vec<Site>| {
        set.push(a);
        set.sort();
        if is_connected(&set) && closed_walk_bfs(&set).saturating_sub(1) <= 3 {
            want.insert(set);
        }
    };
    consider(vec![]);
    for i in 0..n {
        consider(vec![near[i]]);
        for j in i + 1..n {
            consider(vec![near[i], near[j]]);
            for k in j + 1..n {
                consider(vec![near[i], near[j], near[k]]);
            }
        }
    }
    assert_eq!(got, want);
}

#[test]
fn test_g_matches_walk_search_up_to_six_sites() {
    let vol = Volume::centered([5, 5, 5], 0);
    let clusters = enumerate_clusters(&vol, Site::new(0, 0, 0), 6).unwrap();
    let mut checked = 0;
    for c in clusters.iter().filter(|c| c.len() <= 6) {
        let walk = closed_walk_bfs(c.sites());
        assert_eq!(c.g(), walk.saturating_sub(1), "{:?}", c.sites());
        assert!(c.g() as usize >= c.len() - 1);
        // Equality exactly when some closed walk visits each site once.
        assert_eq!(c.g() as usize == c.len() - 1, walk as usize <= c.len().max(2));
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn test_neel_and_uniform_under_stagger() {
    let vol = Volume::centered([3, 3, 3], 1);
    let neel = SpinConfiguration::from_fn(vol.clone(), BoundaryCondition::HomPlus, |s| s.parity());
    let st = stagger(&neel);
    assert!(st.volume.sites().all(|s| st.get(s) == 1));
    let plus = SpinConfiguration::uniform(vol.clone(), BoundaryCondition::HomPlus, 1);
    let sp = stagger(&plus);
    assert!(vol.sites().all(|s| sp.get(s) == s.parity()));
}

proptest! {
    #[test]
    fn prop_bc111_sign_matches_coordinate_sum(k in prop::array::uniform3(-20i64..20)) {
        let s = Site { k };
        let x = s.twice_coord_sum();
        prop_assert_eq!(boundary_spin(BoundaryCondition::Bc111, s), if x > 0 { 1 } else { -1 });
    }

    #[test]
    fn prop_stagger_is_involution(bits in prop::collection::vec(any::<bool>(), 27)) {
        let vol = Volume::centered([3, 3, 3], 2);
        let spins: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let c = SpinConfiguration::from_interior(vol, BoundaryCondition::Bc111, &spins).unwrap();
        let twice = stagger(&stagger(&c));
        prop_assert_eq!(twice.raw(), c.raw());
        prop_assert_eq!(stagger(&c).raw().len(), c.raw().len());
    }

    #[test]
    fn prop_enumerated_clusters_are_distinct_and_connected(x in -1i64..=1, y in -1i64..=1, g in 0u32..4) {
        let vol = Volume::centered([4, 4, 3], 0);
        let a = Site::new(x, y, 0);
        let cs = enumerate_clusters(&vol, a, g).unwrap();
        let set: BTreeSet<_> = cs.iter().map(|c| c.sites().to_vec()).collect();
        prop_assert_eq!(set.len(), cs.len());
        for c in &cs {
            prop_assert!(is_connected(c.sites()));
            prop_assert!(c.sites().contains(&a));
            prop_assert!(c.g() <= g);
        }
    }
}
