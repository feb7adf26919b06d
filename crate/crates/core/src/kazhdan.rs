//! Kazhdan-constant bounds on small finite groups.
//!
//! κ(G, S) is never computed exactly. Two kinds of certified information are
//! used instead: the sandwich interval `[√(2·gap), √(2|S|·gap)]` from the exact
//! spectral gap of Cay(G, S), and explicit-vector upper bounds for the
//! restricted quantity over unit vectors of ℓ²₀(G). Every inequality check is
//! phrased as non-falsification: the certified upper bound of the left-hand
//! side must not fall below the constant times the certified lower bounds of
//! the right-hand side.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_group::{intersection, union, GroupTable};
use crate::rng::task_rng;
use crate::spectral::{cayley_adjacency_table, jacobi_eigen, table_gap};

/// Largest group for the subgradient search.
pub const MAX_OPT_ORDER: usize = 2000;
pub const OPT_ITERATIONS: usize = 500;
pub const OPT_STEP: f64 = 0.1;
/// Slack applied to every non-falsification comparison.
pub const CHECK_TOL: f64 = 1e-9;

/// A real function on G, normalized to unit length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepVector {
    coords: Vec<f64>,
    mean_zero: bool,
}

impl RepVector {
    /// Normalizes `coords`; with `mean_zero` the mean is removed first, so the
    /// vector lies in ℓ²₀(G).
    pub fn new(mut coords: Vec<f64>, mean_zero: bool) -> Result<Self> {
        if mean_zero {
            project_mean_zero(&mut coords);
        }
        let norm = norm(&coords);
        if norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        coords.iter_mut().for_each(|x| *x /= norm);
        Ok(Self { coords, mean_zero })
    }

    pub fn constant(order: usize) -> Self {
        Self::new(vec![1.0; order], false).expect("nonempty")
    }

    pub fn random<R: Rng + ?Sized>(order: usize, mean_zero: bool, rng: &mut R) -> Result<Self> {
        Self::new(
            (0..order).map(|_| rng.random_range(-1.0..1.0)).collect(),
            mean_zero,
        )
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn project_mean_zero(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|a| *a -= mean);
}

/// Index maps of the left-regular action: `(π(s)ξ)(g) = ξ(s⁻¹g)`.
struct LeftRegular {
    shifts: Vec<Vec<usize>>,
    inverse_shifts: Vec<Vec<usize>>,
}

impl LeftRegular {
    fn new(table: &GroupTable, gens: &[usize]) -> Self {
        let shift = |s: usize| -> Vec<usize> {
            let s_inv = table.inv(s);
            (0..table.order()).map(|g| table.mul(s_inv, g)).collect()
        };
        Self {
            shifts: gens.iter().map(|&s| shift(s)).collect(),
            inverse_shifts: gens.iter().map(|&s| shift(table.inv(s))).collect(),
        }
    }

    fn apply(map: &[usize], xi: &[f64]) -> Vec<f64> {
        map.iter().map(|&h| xi[h]).collect()
    }

    /// ‖π(s)ξ − ξ‖ for each generator.
    fn displacements(&self, xi: &[f64]) -> Vec<f64> {
        self.shifts
            .iter()
            .map(|m| {
                m.iter()
                    .zip(xi)
                    .map(|(&h, &x)| (xi[h] - x).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// `max_{s ∈ S} ‖π(s)ξ − ξ‖` in the left-regular representation.
pub fn displacement(table: &GroupTable, gens: &[usize], xi: &RepVector) -> Result<f64> {
    if gens.is_empty() {
        return Err(Error::InvalidArgument("empty generating set".into()));
    }
    if xi.coords.len() != table.order() {
        return Err(Error::DimensionMismatch {
            left: xi.coords.len(),
            right: table.order(),
        });
    }
    if gens.iter().any(|&s| s >= table.order()) {
        return Err(Error::OutsideGroup);
    }
    let action = LeftRegular::new(table, gens);
    Ok(action
        .displacements(&xi.coords)
        .into_iter()
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalSource {
    Sandwich,
    ExplicitVector,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KazhdanInterval {
    pub lower: f64,
    pub upper: f64,
    pub source: IntervalSource,
    /// Spectral gap of Cay(G, S), clamped to [0, 2].
    pub gap: f64,
    pub generating: bool,
}

impl KazhdanInterval {
    fn degenerate() -> Self {
        Self {
            lower: 0.0,
            upper: 0.0,
            source: IntervalSource::Sandwich,
            gap: 0.0,
            generating: false,
        }
    }
}

/// `[√(2·gap), √(2|S|·gap)] ∩ [0, 2]`. A non-generating (or empty) S gives [0, 0].
pub fn kazhdan_interval(table: &GroupTable, gens: &[usize]) -> Result<KazhdanInterval> {
    if table.order() < 2 {
        return Err(Error::InvalidArgument(
            "Kazhdan intervals need a nontrivial group".into(),
        ));
    }
    if gens.is_empty() {
        return Ok(KazhdanInterval::degenerate());
    }
    if !table.generates(gens)? {
        return Ok(KazhdanInterval::degenerate());
    }
    let gap = table_gap(table, gens)?.gap.clamp(0.0, 2.0);
    Ok(KazhdanInterval {
        lower: (2.0 * gap).sqrt().min(2.0),
        upper: (2.0 * gens.len() as f64 * gap).sqrt().min(2.0),
        source: IntervalSource::Sandwich,
        gap,
        generating: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedUpperBound {
    /// Displacement of `witness`; an upper bound for the ℓ²₀(G)-restricted quantity.
    pub value: f64,
    pub witness: RepVector,
    /// Restart that produced the witness; `None` for the spectral start.
    pub restart: Option<u64>,
}

/// Projected subgradient descent on the unit sphere of ℓ²₀(G), minimizing
/// `max_s ‖π(s)ξ − ξ‖`. Starts from `restarts` random vectors (restart r uses
/// stream r of `seed`) and from the second eigenvector of Cay(G, S).
pub fn kazhdan_upper_opt(
    table: &GroupTable,
    gens: &[usize],
    restarts: u64,
    seed: u64,
) -> Result<OptimizedUpperBound> {
    let order = table.order();
    if order < 2 {
        return Err(Error::InvalidArgument("need a nontrivial group".into()));
    }
    if order > MAX_OPT_ORDER {
        return Err(Error::TooLarge {
            what: "group order for optimization",
            value: order as u128,
            limit: MAX_OPT_ORDER as u128,
        });
    }
    if gens.is_empty() {
        return Err(Error::InvalidArgument("empty generating set".into()));
    }
    if gens.iter().any(|&s| s >= order) {
        return Err(Error::OutsideGroup);
    }
    let action = LeftRegular::new(table, gens);

    let mut candidates: Vec<(Option<u64>, RepVector)> = Vec::new();
    if let Some(start) = spectral_start(table, gens)? {
        candidates.push((None, start));
    }
    for r in 0..restarts {
        candidates.push((
            Some(r),
            RepVector::random(order, true, &mut task_rng(seed, r))?,
        ));
    }

    let results: Vec<(Option<u64>, f64, Vec<f64>)> = candidates
        .into_par_iter()
        .map(|(tag, start)| {
            let (value, x) = descend(&action, start.coords);
            (tag, value, x)
        })
        .collect();
    let (restart, value, coords) = results
        .into_iter()
        .fold(
            None::<(Option<u64>, f64, Vec<f64>)>,
            |best, cand| match best {
                Some(b) if b.1 <= cand.1 => Some(b),
                _ => Some(cand),
            },
        )
        .expect("at least one candidate");
    Ok(OptimizedUpperBound {
        value,
        witness: RepVector {
            coords,
            mean_zero: true,
        },
        restart,
    })
}

fn max_with_index(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |b, (i, x)| if x > b.1 { (i, x) } else { b },
    )
}

fn descend(action: &LeftRegular, mut x: Vec<f64>) -> (f64, Vec<f64>) {
    let (_, mut best) = max_with_index(&action.displacements(&x));
    let mut best_x = x.clone();
    for it in 1..=OPT_ITERATIONS {
        let (s, norm_d) = max_with_index(&action.displacements(&x));
        if norm_d < 1e-15 {
            break;
        }
        // ∇‖(π(s) − I)x‖ = (π(s)ᵀ − I)(π(s)x − x) / ‖·‖, and π(s)ᵀ = π(s⁻¹)
        let moved = LeftRegular::apply(&action.shifts[s], &x);
        let d: Vec<f64> = moved.iter().zip(&x).map(|(a, b)| a - b).collect();
        let back = LeftRegular::apply(&action.inverse_shifts[s], &d);
        let step = OPT_STEP / (it as f64).sqrt();
        for ((xi, bi), di) in x.iter_mut().zip(&back).zip(&d) {
            *xi -= step * (bi - di) / norm_d;
        }
        project_mean_zero(&mut x);
        let n = norm(&x);
        if n < 1e-300 {
            break;
        }
        x.iter_mut().for_each(|a| *a /= n);
        let (_, value) = max_with_index(&action.displacements(&x));
        if value < best {
            best = value;
            best_x.clone_from(&x);
        }
    }
    (best, best_x)
}

/// Mean-zero eigenvector for the second eigenvalue of the left Cayley
/// operator (1/2|S|) Σ_s (π(s) + π(s)ᵀ).
fn spectral_start(table: &GroupTable, gens: &[usize]) -> Result<Option<RepVector>> {
    // The right Cayley graph is carried to the left one by g ↦ g⁻¹.
    let right = cayley_adjacency_table(table, gens)?;
    let order = table.order();
    let eig = jacobi_eigen(&right.scaled(1.0 / (2 * gens.len()) as f64))?;
    let mut idx: Vec<usize> = (0..order).collect();
    idx.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));
    for k in idx {
        let mut coords: Vec<f64> = (0..order).map(|g| eig.vectors[(table.inv(g), k)]).collect();
        project_mean_zero(&mut coords);
        if norm(&coords) > 0.5 {
            return Ok(Some(RepVector::new(coords, true)?));
        }
    }
    Ok(None)
}

/// One non-falsification comparison `lhs ≥ rhs` (or `lhs ≤ rhs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Check {
    fn at_least(name: &str, statement: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_owned(),
            statement: statement.into(),
            lhs,
            rhs,
            holds: lhs >= rhs - CHECK_TOL,
        }
    }

    fn at_most(name: &str, statement: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_owned(),
            statement: statement.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + CHECK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn falsifications(&self) -> usize {
        self.checks.iter().filter(|c| !c.holds).count()
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

/// Basic properties of κ: monotonicity in S, κ ≤ 2, κ(G, G) ≥ √2 and
/// κ(G, S) ≥ κ(G, S^k)/k, each at the level of certified intervals.
pub fn verify_basics(
    table: &GroupTable,
    gens: &[usize],
    n_power: usize,
) -> Result<VerificationReport> {
    if n_power == 0 {
        return Err(Error::InvalidArgument("n_power must be >= 1".into()));
    }
    let mut report = VerificationReport::new("basic properties");
    let all = table.all();
    let s_int = kazhdan_interval(table, gens)?;

    let square = table.power_set(gens, 2)?;
    let supersets: [(&str, Vec<usize>); 2] =
        [("S ∪ S²", union(&[gens, &square])), ("G", all.clone())];
    for (label, t) in &supersets {
        let t_int = kazhdan_interval(table, t)?;
        report.checks.push(Check::at_most(
            "monotonicity",
            format!("lower κ(G,S) ≤ upper κ(G,T) for T = {label}"),
            s_int.lower,
            t_int.upper,
        ));
        report.checks.push(Check::at_most(
            "at-most-two",
            format!("upper κ(G,T) ≤ 2 for T = {label}"),
            t_int.upper,
            2.0,
        ));
    }
    report.checks.push(Check::at_most(
        "at-most-two",
        "upper κ(G,S) ≤ 2",
        s_int.upper,
        2.0,
    ));
    report.checks.push(Check::at_most(
        "interval-order",
        "lower κ(G,S) ≤ upper κ(G,S)",
        s_int.lower,
        s_int.upper,
    ));

    // κ(G,G) ≥ √(2·gap(G,G)) ≥ √2 exactly when gap(G,G) ≥ 1
    let g_int = kazhdan_interval(table, &all)?;
    report.checks.push(Check::at_least(
        "whole-group",
        "gap(G,G) ≥ 1, hence κ(G,G) ≥ √2",
        g_int.gap,
        1.0,
    ));

    let power = table.power_set(gens, n_power)?;
    let p_int = kazhdan_interval(table, &power)?;
    report.checks.push(Check::at_least(
        "power",
        format!("upper κ(G,S) ≥ lower κ(G,S^{n_power}) / {n_power}"),
        s_int.upper,
        p_int.lower / n_power as f64,
    ));
    Ok(report)
}

/// Almost-invariant vectors are close to invariant ones, in the full regular
/// representation ℓ²(G): with ε = max_s ‖π(s)ξ − ξ‖ and ξ = ξ₁ + ξ₂ split into
/// constants and mean-zero parts, ‖ξ₂‖ ≤ ε/κ and ‖π(g)ξ − ξ‖ ≤ 2‖ξ₂‖ for all g.
/// κ is replaced by its certified lower bound √(2·gap), which only weakens
/// the claim.
pub fn verify_almost_invariance(
    table: &GroupTable,
    gens: &[usize],
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let interval = kazhdan_interval(table, gens)?;
    if interval.gap <= 0.0 {
        return Err(Error::NotGenerating);
    }
    let kappa_lb = interval.lower;
    let order = table.order();
    let action = LeftRegular::new(table, gens);
    let all = LeftRegular::new(table, &table.all());

    let worst = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = task_rng(seed, i);
            // even trials: generic vectors; odd trials: small perturbations of a constant
            let xi = if i == 0 {
                RepVector::constant(order)
            } else if i % 2 == 0 {
                RepVector::random(order, false, &mut rng)?
            } else {
                let scale: f64 = rng.random_range(0.0..0.5);
                let coords = (0..order)
                    .map(|_| 1.0 + scale * rng.random_range(-1.0..1.0))
                    .collect();
                RepVector::new(coords, false)?
            };
            let x = xi.coords();
            let eps = action.displacements(x).into_iter().fold(0.0, f64::max);
            let mean = x.iter().sum::<f64>() / order as f64;
            let xi2 = norm(&x.iter().map(|a| a - mean).collect::<Vec<_>>());
            let bound_i = eps / kappa_lb;
            let ratio_i = if xi2 <= 1e-12 {
                0.0
            } else {
                xi2 / (bound_i + 1e-12)
            };
            let max_move = all.displacements(x).into_iter().fold(0.0, f64::max);
            let ratio_ii = if max_move <= 1e-12 {
                0.0
            } else {
                max_move / (2.0 * xi2 + 1e-12)
            };
            Ok((ratio_i, ratio_ii))
        })
        .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))?;

    let mut report = VerificationReport::new("almost-invariant vectors");
    report.checks.push(Check::at_most(
        "near-invariant",
        format!("max over {trials} vectors of ‖ξ₂‖·√(2·gap)/ε ≤ 1"),
        worst.0,
        1.0,
    ));
    report.checks.push(Check::at_most(
        "almost-invariant-everywhere",
        format!("max over {trials} vectors and g ∈ G of ‖π(g)ξ − ξ‖/(2‖ξ₂‖) ≤ 1"),
        worst.1,
        1.0,
    ));
    Ok(report)
}

/// Every unit ξ ∈ ℓ²₀(G) has displacement at least √(2·gap).
pub fn verify_displacement_lower_bound(
    table: &GroupTable,
    gens: &[usize],
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let interval = kazhdan_interval(table, gens)?;
    let action = LeftRegular::new(table, gens);
    let order = table.order();
    let min = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let xi = RepVector::random(order, true, &mut task_rng(seed, i))?;
            Ok(action
                .displacements(xi.coords())
                .into_iter()
                .fold(0.0, f64::max))
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
    let mut report = VerificationReport::new("displacement lower bound");
    report.checks.push(Check::at_least(
        "displacement",
        format!("min over {trials} unit ξ ∈ ℓ²₀(G) of displacement ≥ √(2·gap)"),
        min,
        (2.0 * interval.gap).sqrt(),
    ));
    Ok(report)
}

/// G = N ⋊ H as index sets of a group table.
#[derive(Debug, Clone)]
pub struct SemidirectSplit {
    pub table: GroupTable,
    pub normal: Vec<usize>,
    pub complement: Vec<usize>,
}

impl SemidirectSplit {
    pub fn new(table: GroupTable, normal: Vec<usize>, complement: Vec<usize>) -> Result<Self> {
        let mut normal = normal;
        let mut complement = complement;
        normal.sort_unstable();
        normal.dedup();
        complement.sort_unstable();
        complement.dedup();
        if !table.is_normal(&normal)? {
            return Err(Error::NotSemidirect("N is not a normal subgroup".into()));
        }
        if !table.is_subgroup(&complement)? {
            return Err(Error::NotSemidirect("H is not a subgroup".into()));
        }
        if intersection(&normal, &complement) != vec![table.identity()] {
            return Err(Error::NotSemidirect("N ∩ H is nontrivial".into()));
        }
        if normal.len() * complement.len() != table.order() {
            return Err(Error::NotSemidirect("|N|·|H| ≠ |G|".into()));
        }
        if normal.len() < 2 || complement.len() < 2 {
            return Err(Error::NotSemidirect("N and H must be nontrivial".into()));
        }
        Ok(Self {
            table,
            normal,
            complement,
        })
    }
}

fn sub_interval(table: &GroupTable, subgroup: &[usize], set: &[usize]) -> Result<KazhdanInterval> {
    let (sub, embed) = table.subgroup(subgroup)?;
    kazhdan_interval(&sub, &GroupTable::localize(&embed, set))
}

/// Non-falsification of the semidirect-product inequality
/// κ(G, S ∪ T) ≥ (√2/48) κ(N, S^H) κ(H, T) and of the subgroup, normal-subgroup
/// and power steps that lead to it.
pub fn verify_inequality_chain(
    split: &SemidirectSplit,
    s: &[usize],
    t: &[usize],
) -> Result<VerificationReport> {
    let g = &split.table;
    let n_set = &split.normal;
    let h_set = &split.complement;
    if s.iter().any(|x| n_set.binary_search(x).is_err()) {
        return Err(Error::NotSemidirect("S must lie in N".into()));
    }
    if t.iter().any(|x| h_set.binary_search(x).is_err()) {
        return Err(Error::NotSemidirect("T must lie in H".into()));
    }
    let r = union(&[s, t]);
    let s_h = union(&[&s
        .iter()
        .flat_map(|&x| h_set.iter().map(move |&h| (x, h)))
        .map(|(x, h)| g.conjugate(x, h))
        .collect::<Vec<_>>()]);

    let g_r = kazhdan_interval(g, &r)?;
    let n_sh = sub_interval(g, n_set, &s_h)?;
    let h_t = sub_interval(g, h_set, t)?;

    let mut report = VerificationReport::new("semidirect product chain");
    let c = std::f64::consts::SQRT_2 / 48.0;
    report.checks.push(Check::at_least(
        "semidirect",
        "upper κ(G,S∪T) ≥ (√2/48)·lower κ(N,S^H)·lower κ(H,T)",
        g_r.upper,
        c * n_sh.lower * h_t.lower,
    ));

    // subgroup step with H ≤ G applied to R
    let g_rh = kazhdan_interval(g, &union(&[&r, h_set]))?;
    let h_rh = sub_interval(g, h_set, &intersection(&r, h_set))?;
    report.checks.push(Check::at_least(
        "subgroup",
        "upper κ(G,R) ≥ ½·lower κ(G,R∪H)·lower κ(H,R∩H)",
        g_r.upper,
        0.5 * g_rh.lower * h_rh.lower,
    ));

    // subgroup step with N ≤ G applied to S^H ∪ H
    let sh_h = union(&[&s_h, h_set]);
    let g_shh = kazhdan_interval(g, &sh_h)?;
    let g_nh = kazhdan_interval(g, &union(&[n_set, h_set]))?;
    let n_shh = sub_interval(g, n_set, &intersection(&sh_h, n_set))?;
    report.checks.push(Check::at_least(
        "subgroup",
        "upper κ(G,S^H∪H) ≥ ½·lower κ(G,N∪H)·lower κ(N,S^H)",
        g_shh.upper,
        0.5 * g_nh.lower * n_shh.lower,
    ));

    // power step: S^H ∪ H ⊆ (S ∪ H)³
    let g_sh = kazhdan_interval(g, &union(&[s, h_set]))?;
    report.checks.push(Check::at_least(
        "power",
        "upper κ(G,S∪H) ≥ ⅓·lower κ(G,S^H∪H)",
        g_sh.upper,
        g_shh.lower / 3.0,
    ));

    // normal-subgroup steps through G/N
    let (quotient, coset_of) = g.quotient(n_set)?;
    let project = |set: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| coset_of[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    if quotient.order() * n_set.len() != g.order() {
        return Err(Error::NotSemidirect("coset count mismatch".into()));
    }
    let g_rn = kazhdan_interval(g, &union(&[&r, n_set]))?;
    let q_r = kazhdan_interval(&quotient, &project(&r))?;
    report.checks.push(Check::at_least(
        "normal-subgroup",
        "upper κ(G,R∪N) ≥ ¼·lower κ(G/N,RN/N)",
        g_rn.upper,
        0.25 * q_r.lower,
    ));
    let q_all = kazhdan_interval(&quotient, &quotient.all())?;
    report.checks.push(Check::at_least(
        "normal-subgroup",
        "upper κ(G,N∪H) ≥ ¼·lower κ(G/N,G/N)",
        g_nh.upper,
        0.25 * q_all.lower,
    ));
    Ok(report)
}
