//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; the process fails if any does.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fk_rigidity::bounds::{find_b0, k0, q_bar, PolymerInputs, C_D};
use fk_rigidity::cli::tiling_h4_energy;
use fk_rigidity::interface::{
    degeneracy_bounds_check, enumerate_tilings, height_function, interface_to_tiling, random_tiling,
    tiling_to_interface, RConfiguration, Region, Triangle,
};
use fk_rigidity::lattice::{BoundaryCondition, Site, SpinConfiguration, Volume};
use fk_rigidity::model::{
    extract_contours, h2_relative_energy, nnn_potential, plaquette_potential, Connectivity, ModelCoefficients,
};
use fk_rigidity::quantum::{extract_couplings, verify_decay, FkParameters};
use fk_rigidity::rcontour::{decompose, dobrushin_remove, f_energy, h4_contour_energy};
use fk_rigidity::sampler::{mc_run, summarize, MoveSet, RunSpec, Start};
use fk_rigidity::model::Hamiltonian;

type Outcome = (bool, String);

fn c1_potentials() -> Outcome {
    let mut bad = 0;
    let mut seen = BTreeSet::new();
    for m in 0..16u32 {
        let s: [i8; 4] = std::array::from_fn(|i| if m >> i & 1 == 1 { -1 } else { 1 });
        let minus = s.iter().filter(|&&x| x < 0).count();
        // Hand table: uniform 0, three-to-one -16, two-two by columns -12,
        // two-two on a diagonal 0.
        let want = match minus {
            0 | 4 => 0,
            1 | 3 => -16,
            _ if s[0] == s[2] => 0,
            _ => -12,
        };
        let got = plaquette_potential(s);
        seen.insert(got);
        if got != want {
            bad += 1;
        }
    }
    for m in 0..8u32 {
        let s: [i8; 3] = std::array::from_fn(|i| if m >> i & 1 == 1 { -1 } else { 1 });
        let want = if s[0] == s[2] { 0 } else { -2 };
        if nnn_potential(s[0], s[2]) != want {
            bad += 1;
        }
    }
    let checks = [
        plaquette_potential([1, 1, -1, 1]) == -16,
        plaquette_potential([1, -1, -1, 1]) == -12,
        plaquette_potential([1, -1, 1, -1]) == 0,
        nnn_potential(1, 1) == 0,
        nnn_potential(1, -1) == -2,
    ];
    let ok = bad == 0 && checks.iter().all(|&c| c) && seen.iter().min() == Some(&-16);
    (ok, format!("24 patterns, {bad} mismatches, named values {checks:?}"))
}

fn pair_coupling(u: f64) -> f64 {
    let vol = Volume::with_lo([0, 0, 0], [2, 1, 1], 0);
    let p = FkParameters::half_filled(u, 10.0 * u);
    let t = extract_couplings(&vol, None, &p, 1).expect("2-site extraction");
    t.get(&[Site::new(0, 0, 0), Site::new(1, 0, 0)]).expect("pair entry")
}

fn c2_pair() -> Outcome {
    let (j16, j32) = (pair_coupling(16.0), pair_coupling(32.0));
    let dev = |u: f64, j: f64| (4.0 * u * j - 1.0).abs();
    let tail = |u: f64, j: f64| (j - 1.0 / (4.0 * u)).abs();
    let shrink = tail(16.0, j16) / tail(32.0, j32);
    let rel_shrink = dev(16.0, j16) / dev(32.0, j32);
    let ok = dev(16.0, j16) <= 0.05 && dev(32.0, j32) <= 0.05 && shrink >= 4.0;
    (
        ok,
        format!(
            "|4UJ-1| = {:.3e}, {:.3e}; |J-1/4U| shrinks {shrink:.2}x (|4UJ-1| shrinks {rel_shrink:.2}x)",
            dev(16.0, j16),
            dev(32.0, j32)
        ),
    )
}

fn c3_decay() -> Outcome {
    let vol = Volume::with_lo([0, 0, 0], [2, 2, 1], 0);
    let levels = |u: f64| {
        let t = extract_couplings(&vol, None, &FkParameters::half_filled(u, 256.0), 4).expect("window extraction");
        verify_decay(&t).levels
    };
    let (a, b) = (levels(16.0), levels(32.0));
    let at = |l: &[(u32, f64)], g: u32| l.iter().find(|x| x.0 == g).map(|x| x.1).unwrap_or(0.0);
    let shape = at(&a, 3) < at(&a, 1);
    let mut worst = f64::INFINITY;
    for &(g, v) in a.iter().filter(|x| x.0 >= 3 && x.1 > 1e-12) {
        worst = worst.min(v / at(&b, g).max(f64::MIN_POSITIVE));
    }
    let ok = shape && worst >= 4.0;
    (ok, format!("U=16 levels {:?}; weakest g>=3 suppression {worst:.2}x", a.iter().map(|(g, v)| format!("g{g} {v:.2e}")).collect::<Vec<_>>()))
}

/// Perfect matchings of the triangle adjacency graph, counted directly.
fn dimer_count(region: &Region) -> usize {
    fn rec(free: &mut BTreeSet<Triangle>) -> usize {
        let Some(&t) = free.iter().next() else { return 1 };
        free.remove(&t);
        let mut n = 0;
        for nb in t.neighbours() {
            if free.remove(&nb) {
                n += rec(free);
                free.insert(nb);
            }
        }
        free.insert(t);
        n
    }
    rec(&mut region.triangles.clone())
}

fn c4_bijection() -> Outcome {
    let mut notes = vec![];
    let mut ok = true;
    for (side, want) in [(1, 2), (2, 20)] {
        let region = Region::hexagon(side);
        let ts = enumerate_tilings(&region).expect("enumeration");
        let oracle = dimer_count(&region);
        ok &= ts.len() == want && oracle == want;
        for t in &ts {
            let faces = tiling_to_interface(t).expect("lift");
            let back = interface_to_tiling(&faces).expect("projection");
            let a: BTreeSet<_> = t.rhombi.iter().collect();
            let b: BTreeSet<_> = back.rhombi.iter().collect();
            ok &= a == b;
            // A consistent height function is the zero-cycle-sum statement.
            let h = height_function(t, None).expect("heights");
            ok &= t.rhombi.iter().flat_map(|r| r.sides()).all(|e| (h[&e.to] - h[&e.from]).abs() == 1);
        }
        notes.push(format!("side {side}: {} tilings, dimer oracle {oracle}", ts.len()));
    }
    (ok, notes.join("; "))
}

fn c5_degeneracy() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for side in 1..=3 {
        let r = degeneracy_bounds_check(&Region::hexagon(side)).expect("bounds");
        ok &= r.lower_holds && r.upper_holds && r.lower_applies;
        notes.push(format!("A={} N={} in [{:.0}, 2^{}]", r.area, r.count, r.lower, 2 * r.area));
    }
    let areas: Vec<_> = notes.iter().collect();
    (ok, format!("{areas:?}"))
}

fn c6_selection() -> Outcome {
    let k = ModelCoefficients::new(8.0);
    let ts = enumerate_tilings(&Region::hexagon(2)).expect("enumeration");
    let mut rows: Vec<(f64, bool)> = vec![];
    let mut agree = true;
    for t in &ts {
        let e = tiling_h4_energy(t, &k).expect("lift to spins");
        let rc = RConfiguration::from_tiling(t).expect("configuration");
        let by_contours: f64 = decompose(&rc).contours.iter().map(|c| h4_contour_energy(c, &k)).sum();
        agree &= (e - by_contours).abs() < 1e-12;
        rows.push((e, rc.good_pair_fraction() == Some(1.0)));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let per_defect = 6.0 * k.k2;
    let gap = rows[1].0 - rows[0].0;
    let ok = agree && rows[0].1 && rows[1..].iter().all(|r| !r.1) && gap >= 0.9 * per_defect;
    (ok, format!("{} tilings, min {:.3e}, gap {gap:.6e} vs 6K2 = {per_defect:.6e}", ts.len(), rows[0].0))
}

fn c7_additivity() -> Outcome {
    let k = ModelCoefficients::new(8.0);
    let mut worst = 0f64;
    let mut check = |cfg: &SpinConfiguration| {
        let e = h2_relative_energy(cfg, &k);
        let s: f64 = extract_contours(cfg, Connectivity::Edge).iter().map(|c| k.j1 * c.area() as f64).sum();
        worst = worst.max((e - s).abs());
    };
    let small = Volume::centered([2, 2, 2], 2);
    for m in 0..256u32 {
        let spins: Vec<i8> = (0..8).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect();
        check(&SpinConfiguration::from_interior(small.clone(), BoundaryCondition::HomPlus, &spins).unwrap());
    }
    let big = Volume::centered([5, 5, 5], 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let bc = if i % 2 == 0 { BoundaryCondition::HomPlus } else { BoundaryCondition::HomMinus };
        let p: f64 = rng.gen_range(0.05..0.95);
        check(&SpinConfiguration::from_fn(big.clone(), bc, |_| if rng.gen_bool(p) { 1 } else { -1 }));
    }
    (worst <= 1e-12, format!("756 configurations, max deviation {worst:.1e}"))
}

fn c8_dobrushin() -> Outcome {
    let k = ModelCoefficients::new(8.0);
    let (mut done, mut failed, mut multi) = (0usize, 0usize, 0usize);
    let mut seed = 0u64;
    let mut first_err = None;
    while done < 1000 && seed < 100_000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = Region::type0_patch(4 + (seed % 3) as u32);
        let steps = rng.gen_range(10..200);
        seed += 1;
        let t = random_tiling(&region, steps, &mut rng).expect("random tiling");
        let rc = RConfiguration::from_tiling(&t).expect("configuration");
        let dec = decompose(&rc);
        for i in 0..dec.contours.len() {
            if done == 1000 {
                break;
            }
            done += 1;
            match dobrushin_remove(&rc, &dec, i) {
                Ok(r) => {
                    let after = decompose(&r.config);
                    let mut want: Vec<f64> =
                        dec.contours.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| f_energy(c, &k)).collect();
                    let mut got: Vec<f64> = after.contours.iter().map(|c| f_energy(c, &k)).collect();
                    want.sort_by(f64::total_cmp);
                    got.sort_by(f64::total_cmp);
                    let same = want.len() == got.len() && want.iter().zip(&got).all(|(a, b)| (a - b).abs() < 1e-12);
                    if r.shifts.len() > 1 {
                        multi += 1;
                    }
                    if !same {
                        failed += 1;
                    }
                }
                Err(e) => {
                    failed += 1;
                    first_err.get_or_insert(e.to_string());
                }
            }
        }
    }
    let ok = done == 1000 && failed == 0;
    let mut msg = format!("{done} removals over {seed} configurations, {failed} failures, {multi} with several interiors");
    if let Some(e) = first_err {
        msg.push_str(&format!("; first error: {e}"));
    }
    (ok, msg)
}

fn spec(bc: BoundaryCondition, h: Hamiltonian, beta: f64, moves: MoveSet) -> RunSpec {
    RunSpec {
        dims: [9, 9, 9],
        bc,
        hamiltonian: h,
        u: 8.0,
        beta,
        sweeps: 2000,
        thermalization: 500,
        seed: 20,
        moves,
        stride: 10,
        replicas: 4,
        check_every: 100,
        slab: 1,
        start: Start::Ground,
    }
}

fn c9_mc() -> Outcome {
    let s100 = spec(BoundaryCondition::Bc100, Hamiltonian::H2, 40.0 * 8.0, MoveSet::SingleFlip);
    let r100 = mc_run(&s100).expect("bc100 run");
    let sum100 = summarize(&r100);
    let min_m = sum100.profile.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
    let again = mc_run(&s100).expect("bc100 rerun");
    let det = serde_json::to_string(&r100).unwrap() == serde_json::to_string(&again).unwrap();
    // Matched beta/U^3 = 4 for both Hamiltonians.
    let beta = 4.0 * 8f64.powi(3);
    let gp = |h| {
        let r = mc_run(&spec(BoundaryCondition::Bc111, h, beta, MoveSet::SingleFlipHexagon)).expect("bc111 run");
        summarize(&r).good_pair_fraction.map(|e| e.mean).unwrap_or(f64::NAN)
    };
    let (g2, g4) = (gp(Hamiltonian::H2), gp(Hamiltonian::H4));
    let ok = min_m >= 0.9 && g4 - g2 >= 0.2 && det;
    (
        ok,
        format!("bc100 min |m| {min_m:.3}; bc111 good pairs H4 {g4:.3} vs H2 {g2:.3}; deterministic {det}"),
    )
}

fn c10_bounds() -> Outcome {
    let mut k0_ok = 0;
    for i in 0..10 {
        for j in 0..10 {
            let pre = 1.5 * 10f64.powf(i as f64 * 0.6);
            let base = 0.05 + 0.09 * j as f64;
            let a = 2.0f64;
            let lambda = base / (C_D * a.exp());
            let Some(k) = k0(1.0, pre, lambda, C_D, a) else { continue };
            let holds = |k: u32| pre * base.powi(k as i32) <= 1.0;
            if holds(k) && (k == 1 || !holds(k - 1)) {
                k0_ok += 1;
            }
        }
    }
    let mut mono = true;
    let mut bracket = true;
    let mut b_ok = true;
    for (c1, c2) in [(0.5, 1.0), (1.0, 0.1), (0.4, 5.0), (2.0, 2.0)] {
        let p = PolymerInputs::new(c1, c2, 1.0, 1.0);
        b_ok &= p.big_b() > 1.0;
        for frac in [0.5, 0.01] {
            let lambda = frac * p.lambda0();
            let r = find_b0(c1, c2, lambda).expect("b0");
            bracket &= q_bar(&p, lambda, r.b0 * (1.0 - 1e-6)) <= 0.0 && q_bar(&p, lambda, r.b0 * (1.0 + 1e-6)) > 0.0;
            let q: Vec<f64> = (0..100).map(|i| q_bar(&p, lambda, r.b0 * (1.0 + 0.25 * i as f64))).collect();
            mono &= q.windows(2).all(|w| w[1] > w[0]);
        }
    }
    let ok = k0_ok == 100 && mono && bracket && b_ok;
    (ok, format!("k0 exact on {k0_ok}/100; q increasing {mono}; b0 bracket {bracket}; B > 1 {b_ok}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("potential tables", c1_potentials),
        ("pair coupling", c2_pair),
        ("coupling decay", c3_decay),
        ("tiling bijection", c4_bijection),
        ("degeneracy bounds", c5_degeneracy),
        ("ground-state selection", c6_selection),
        ("contour additivity", c7_additivity),
        ("contour removal", c8_dobrushin),
        ("Monte Carlo contrast", c9_mc),
        ("bounds calculators", c10_bounds),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f();
        let secs = start.elapsed().as_secs_f64();
        println!("{} {:>2} {name}: {detail} ({secs:.2}s)", if ok { "PASS" } else { "FAIL" }, i + 1);
        failures += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
