//! Explicit constant chains of the convergence proofs: the jump-count
//! sequence `C_j` of the electron cluster expansion, the polymer-expansion
//! constants (`k0`, `a0`, `C4`, `a1`, `q`, `Z_pol`), the thresholds `λ0`, `B`
//! and `b0`, and an audit of extracted couplings against `c̃2 (c1/U)^g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::CouplingTable;

/// Connectivity constant `(2d)^2` in three dimensions.
pub const C_D: f64 = 36.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CjReport {
    /// `2dt/(cU)`.
    pub ratio: f64,
    pub c0: f64,
    /// `C_2, C_3, ...` up to the first term below `1e-16` (at most 200).
    pub terms: Vec<f64>,
    /// `Σ_{j≥2} C_j` in closed form (infinite when the ratio is ≥ 1).
    pub tail: f64,
    /// `C_0 + Σ_{j≥2} C_j`.
    pub total: f64,
    /// Geometric convergence of the jump series.
    pub converges: bool,
    /// Whether the full sum is below one.
    pub sum_below_one: bool,
}

pub fn cj_sequence(d: u32, t: f64, u: f64, beta: f64, c: f64) -> Result<CjReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Invalid(format!("c must lie in (0,1), got {c}")));
    }
    if !(u > 1.0) {
        return Err(Error::Invalid(format!("U must exceed 1, got {u}")));
    }
    let ratio = 2.0 * d as f64 * t / (c * u);
    let c0 = (-beta * c * u).exp();
    let mut terms = Vec::new();
    let mut x = ratio * ratio;
    while terms.len() < 200 && (x >= 1e-16 || terms.is_empty()) {
        terms.push(x);
        x *= ratio;
        if ratio >= 1.0 && terms.len() >= 20 {
            break;
        }
    }
    let converges = ratio < 1.0;
    let tail = if converges { ratio * ratio / (1.0 - ratio) } else { f64::INFINITY };
    let total = c0 + tail;
    Ok(CjReport { ratio, c0, terms, tail, total, converges, sum_below_one: total < 1.0 })
}

fn default_a() -> f64 {
    2.0
}
fn default_cd() -> f64 {
    C_D
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolymerInputs {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub lambda: f64,
    /// `β λ`.
    pub b: f64,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_cd")]
    pub c_d: f64,
}

impl PolymerInputs {
    pub fn new(c1: f64, c2: f64, lambda: f64, b: f64) -> Self {
        PolymerInputs { c1, c2, lambda, b, a: 2.0, c_d: C_D }
    }

    pub fn beta(&self) -> f64 {
        self.b / self.lambda
    }

    fn validate(&self) -> Result<()> {
        for (n, v) in [("C1", self.c1), ("C2", self.c2), ("lambda", self.lambda), ("b", self.b), ("c_d", self.c_d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{n} must be positive and finite, got {v}")));
            }
        }
        if !(self.a > 0.0) {
            return Err(Error::Invalid(format!("a must be positive, got {}", self.a)));
        }
        Ok(())
    }

    /// `B = (1 + sqrt(1 + 4 c_d C2/C1))/2`.
    pub fn big_b(&self) -> f64 {
        0.5 * (1.0 + (1.0 + 4.0 * self.c_d * self.c2 / self.c1).sqrt())
    }

    /// `λ0 = 1/(B c_d² e^a)`.
    pub fn lambda0(&self) -> f64 {
        1.0 / (self.big_b() * self.c_d * self.c_d * self.a.exp())
    }

    /// `λ1 = 1/(c_d e^a)`.
    pub fn lambda1(&self) -> f64 {
        1.0 / (self.c_d * self.a.exp())
    }

    /// Zero of `X`.
    pub fn lambda2(&self) -> f64 {
        2.0 / (self.c_d * (1.0 + (1.0 + 4.0 * self.c_d * self.c2 / self.c1).sqrt()))
    }

    /// `X(λ) = C1 - C2 c_d³ λ² / (1 - c_d λ)`.
    pub fn x(&self, lambda: f64) -> f64 {
        self.c1 - self.c2 * self.c_d.powi(3) * lambda * lambda / (1.0 - self.c_d * lambda)
    }

    /// `r = log c_d / log(B c_d)`.
    pub fn r(&self) -> f64 {
        self.c_d.ln() / (self.big_b() * self.c_d).ln()
    }
}

/// Smallest positive integer `k` with `C2 β (λ c_d e^a)^k ≤ 1`; `None` when
/// the base is not below one (no such `k`) or `k` would exceed `10^6`.
pub fn k0(c2: f64, beta: f64, lambda: f64, c_d: f64, a: f64) -> Option<u32> {
    let base = lambda * c_d * a.exp();
    if !(base < 1.0) {
        return None;
    }
    let pre = c2 * beta;
    if pre * base <= 1.0 {
        return Some(1);
    }
    // Estimate from logs, then settle exactly.
    let est = ((pre.ln()) / (-base.ln())).ceil().max(1.0);
    if est > 1e6 {
        return None;
    }
    let mut k = est as u32;
    let holds = |k: u32| pre * base.powi(k as i32) <= 1.0;
    while k > 1 && holds(k - 1) {
        k -= 1;
    }
    while !holds(k) {
        k += 1;
    }
    Some(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    /// `c_d λ < 1`.
    pub cond1: bool,
    /// `c_d λ e^a < 1`.
    pub cond2: bool,
    /// `q > 0`.
    pub cond4: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub inputs: PolymerInputs,
    pub beta: f64,
    pub k0: Option<u32>,
    pub alpha: Option<f64>,
    pub a0: Option<f64>,
    #[serde(rename = "C3")]
    pub c3: Option<f64>,
    #[serde(rename = "C4")]
    pub c4: Option<f64>,
    pub a_prime: f64,
    pub a_double_prime: f64,
    pub a1: Option<f64>,
    pub q: Option<f64>,
    /// `2 C4 e^{-q}/(1-e^{-q})²`, when `q > 0`.
    pub zpol_bound: Option<f64>,
    pub flags: Flags,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(rename = "X")]
    pub x: f64,
}

/// Evaluates the polymer constant chain. Infeasible inputs produce a report
/// with the failing flags set and the dependent fields absent.
pub fn polymer_report(p: &PolymerInputs) -> Result<ConvergenceReport> {
    p.validate()?;
    let beta = p.beta();
    let ea = p.a.exp();
    let cond1 = p.c_d * p.lambda < 1.0;
    let cond2 = p.c_d * p.lambda * ea < 1.0;
    let k = if cond2 { k0(p.c2, beta, p.lambda, p.c_d, p.a) } else { None };
    let alpha = k.map(|k| p.c2 * beta * (p.lambda * p.c_d * ea).powi(k as i32));
    let c3 = cond1.then(|| p.c2 * p.c_d.powi(3) / (1.0 - p.c_d * p.lambda));
    let a0 = c3.map(|c3| beta * (p.c1 * p.lambda - c3 * p.lambda.powi(3)) - p.a);
    let c4 = k.map(|k| (k as f64 + 1.0) * p.c_d.powi(k as i32 + 1));
    let z = p.lambda * ea;
    let a1 = if cond2 { k.map(|k| k as f64 * p.c_d * z / (1.0 - p.c_d * z).powi(2)) } else { None };
    let a_double_prime = p.a + 0.25;
    let q = match (a0, a1, c4) {
        (Some(a0), Some(a1), Some(c4)) => Some(a0 - p.c_d.ln() - a1 - a_double_prime * c4),
        _ => None,
    };
    let cond4 = q.is_some_and(|q| q > 0.0 && q.is_finite());
    let zpol_bound = match (q, c4) {
        (Some(q), Some(c4)) if cond4 => Some(2.0 * c4 * (-q).exp() / (1.0 - (-q).exp()).powi(2)),
        _ => None,
    };
    Ok(ConvergenceReport {
        inputs: *p,
        beta,
        k0: k,
        alpha,
        a0,
        c3,
        c4,
        a_prime: p.a + std::f64::consts::LN_2 / 3.0,
        a_double_prime,
        a1,
        q,
        zpol_bound,
        flags: Flags { cond1, cond2, cond4 },
        big_b: p.big_b(),
        lambda0: p.lambda0(),
        lambda1: p.lambda1(),
        lambda2: p.lambda2(),
        x: p.x(p.lambda),
    })
}

/// Continuous `k̄0(b) = 1 + log(C2 c_d e^a b)/log(B c_d)`, the choice that
/// covers every `λ < λ0`.
pub fn k0_bar(p: &PolymerInputs, b: f64) -> f64 {
    1.0 + (p.c2 * p.c_d * p.a.exp() * b).ln() / (p.big_b() * p.c_d).ln()
}

/// `A(λ, b)`: the right-hand side of the sufficient condition for `q > 0`
/// with `k0 = k̄0(b)`.
pub fn a_rhs(p: &PolymerInputs, lambda: f64, b: f64) -> f64 {
    let k = k0_bar(p, b);
    let cz = p.c_d * lambda * p.a.exp();
    p.a + p.c_d.ln() + k * cz / (1.0 - cz).powi(2) + (p.a + 0.25) * (k + 1.0) * p.c_d.powf(k + 1.0)
}

/// `q̄(λ, b) = b X(λ) - A(λ, b)`, the lower bound on `q` used for the `b0`
/// threshold; smooth in `b`.
pub fn q_bar(p: &PolymerInputs, lambda: f64, b: f64) -> f64 {
    b * p.x(lambda) - a_rhs(p, lambda, b)
}

/// `log C'(b)`, the bound on the polymer sum at `λ0` with `k0 = k̄0(b)`.
/// Kept in log form because `C'` underflows long before `b` leaves the
/// range of interest.
pub fn ln_c_prime(p: &PolymerInputs, b: f64) -> Option<f64> {
    let q = q_bar(p, p.lambda0(), b);
    if !(q > 0.0) {
        return None;
    }
    let bc = p.big_b() * p.c_d;
    let pre = 2.0 * p.c_d * p.c_d * (2.0 + (p.c1 * b).ln() / bc.ln());
    Some(pre.ln() + p.r() * (p.c1 * b).ln() - q - 2.0 * (-(-q).exp()).ln_1p())
}

pub fn c_prime(p: &PolymerInputs, b: f64) -> Option<f64> {
    ln_c_prime(p, b).map(f64::exp)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct B0Report {
    pub b0: f64,
    pub lambda0: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    /// Minimiser of `q̄` in `b`; `q̄` increases beyond it.
    pub b_min: f64,
}

/// Smallest `b` beyond which `q̄(λ, b) > 0`, by bisection to relative `1e-12`.
pub fn find_b0(c1: f64, c2: f64, lambda: f64) -> Result<B0Report> {
    let p = PolymerInputs::new(c1, c2, lambda, 1.0);
    p.validate()?;
    let l0 = p.lambda0();
    if !(lambda < l0) {
        return Err(Error::Invalid(format!("lambda = {lambda} must be below lambda0 = {l0}")));
    }
    let f = |b: f64| q_bar(&p, lambda, b);
    // Coarse log grid to locate the minimum and a positive point.
    let mut best = (f64::INFINITY, 0.0);
    let mut hi = None;
    let mut b = 1e-6;
    while b < 1e300 {
        let v = f(b);
        if v < best.0 {
            best = (v, b);
        }
        if v > 0.0 && b > best.1 {
            hi = Some(b);
            break;
        }
        b *= 1.25;
    }
    let hi = hi.ok_or_else(|| Error::Numeric("q̄ never becomes positive".into()))?;
    let mut lo = best.1.min(hi / 1.25);
    let mut hi = hi;
    if f(lo) > 0.0 {
        return Err(Error::Numeric("no sign change bracketed".into()));
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(B0Report { b0: hi, lambda0: l0, big_b: p.big_b(), b_min: best.1 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub cluster: Vec<[i64; 3]>,
    pub g: u32,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayAudit {
    pub u: f64,
    /// Template `c̃2 (c1/U)^g` used for the check.
    pub c2_tilde: f64,
    pub c1_over_u: f64,
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// Least-squares fit of `log max|Φ_g|` against `g`.
    pub fitted_c2_tilde: f64,
    pub fitted_c1_over_u: f64,
    /// Nearest-neighbour pairs with `1/(4U)` removed, checked at exponent 3.
    pub pair_residuals: Vec<(Vec<[i64; 3]>, f64)>,
    pub pair_bound: f64,
    pub pairs_ok: bool,
}

impl DecayAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.pairs_ok
    }
}

/// Checks `|Φ_B| ≤ c̃2 (c1/U)^{g(B)}` for every cluster of two or more sites,
/// and the stronger cubic bound for nearest-neighbour pairs after removing
/// the leading `1/(4U)`.
pub fn decay_audit(table: &CouplingTable, c2_tilde: f64, c1_over_u: f64) -> DecayAudit {
    let u = table.meta.u;
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut pair_residuals = Vec::new();
    let pair_bound = c2_tilde * c1_over_u.powi(3);
    for e in &table.couplings {
        if e.cluster.len() < 2 || e.g == 0 {
            continue;
        }
        checked += 1;
        let bound = c2_tilde * c1_over_u.powi(e.g as i32);
        if e.value.abs() > bound {
            violations.push(Violation { cluster: e.cluster.clone(), g: e.g, value: e.value, bound });
        }
        if e.cluster.len() == 2 && e.g == 1 {
            let lead = if table.meta.t == 0.0 { 0.0 } else { table.meta.t * table.meta.t / (4.0 * u) };
            pair_residuals.push((e.cluster.clone(), e.value - lead));
        }
    }
    let pairs_ok = pair_residuals.iter().all(|(_, r)| r.abs() <= pair_bound);
    let fit = crate::quantum::verify_decay(table);
    DecayAudit {
        u,
        c2_tilde,
        c1_over_u,
        checked,
        violations,
        fitted_c2_tilde: fit.fitted_c1,
        fitted_c1_over_u: fit.fitted_c / u,
        pair_residuals,
        pair_bound,
        pairs_ok,
    }
}
