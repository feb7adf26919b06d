//! Permutational exponential sums
//!
//! ```text
//! λ_{v,w} = (1/n!) Σ_{σ ∈ S_n} e_p(⟨v, w^σ⟩),        λ_v(u) = λ_{v,(u,0,…,0)} = (1/n) Σ_i e_p(u v_i)
//! ```
//!
//! together with the switching certificate
//! `max_{w ∉ ⟨𝟏⟩} |λ_{v,w}|² ≤ 1/2 + 1/2 · max_{u ≠ 0} |λ_v(u)|²`,
//! which bounds all p^{n−1} nontrivial sums using only p−1 support-one sums.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::{dot_raw, FpScalar, FpVector, PrimeField};
use crate::perm::{for_each_rearrangement, multinomial_count, Permutation, MAX_ENUMERATION_DEGREE};
use crate::rng::task_rng;

/// Default acceptance threshold on `max_u |λ_v(u)|`.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Candidates evaluated per parallel batch in [`search_v`].
const SEARCH_BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    Exact,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    pub mode: EvalMode,
    /// Number of Monte Carlo samples; 0 for exact and closed-form values.
    pub sample_count: u64,
}

impl ExpSumValue {
    fn new(z: Complex64, mode: EvalMode, sample_count: u64) -> Self {
        Self {
            re: z.re,
            im: z.im,
            mode,
            sample_count,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

fn check_field(field: &PrimeField, v: &FpVector) -> Result<()> {
    if v.modulus() != field.modulus() {
        return Err(Error::ModulusMismatch {
            left: v.modulus(),
            right: field.modulus(),
        });
    }
    Ok(())
}

/// Exact λ_{v,w}.
///
/// Each distinct rearrangement of w occurs equally often among the w^σ, so the
/// average over S_n equals the uniform average over distinct rearrangements.
/// Since ⟨v, w^σ⟩ = ⟨v^{σ⁻¹}, w⟩ we may equally rearrange v; whichever of the
/// two has the smaller orbit is enumerated.
pub fn lambda_exact(field: &PrimeField, v: &FpVector, w: &FpVector) -> Result<ExpSumValue> {
    v.check_compatible(w)?;
    check_field(field, v)?;
    if v.len() > MAX_ENUMERATION_DEGREE {
        return Err(Error::TooLarge {
            what: "degree n for exact evaluation",
            value: v.len() as u128,
            limit: MAX_ENUMERATION_DEGREE as u128,
        });
    }
    let (moving, fixed) = if multinomial_count(v.entries()) < multinomial_count(w.entries()) {
        (v, w)
    } else {
        (w, v)
    };
    Ok(ExpSumValue::new(
        orbit_average(field, moving.entries(), fixed.entries()),
        EvalMode::Exact,
        0,
    ))
}

fn orbit_average(field: &PrimeField, moving: &[u64], fixed: &[u64]) -> Complex64 {
    let p = field.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0u64;
    for_each_rearrangement(moving, |r| {
        sum += field.ep(dot_raw(r, fixed, p));
        count += 1;
    });
    sum / count as f64
}

/// Average of e_p(⟨x, w⟩) over a precomputed list `orbit` (uniform weights).
pub(crate) fn average_over(field: &PrimeField, orbit: &[Vec<u64>], w: &[u64]) -> Complex64 {
    let p = field.modulus();
    let sum: Complex64 = orbit.iter().map(|x| field.ep(dot_raw(x, w, p))).sum();
    sum / orbit.len() as f64
}

/// λ_v(u) = (1/n) Σ_i e_p(u v_i).
pub fn lambda_support_one(field: &PrimeField, v: &FpVector, u: FpScalar) -> Result<ExpSumValue> {
    check_field(field, v)?;
    if u.modulus() != field.modulus() {
        return Err(Error::ModulusMismatch {
            left: u.modulus(),
            right: field.modulus(),
        });
    }
    Ok(ExpSumValue::new(
        support_one_raw(field, v.entries(), u.value()),
        EvalMode::ClosedForm,
        0,
    ))
}

#[inline]
fn support_one_raw(field: &PrimeField, v: &[u64], u: u64) -> Complex64 {
    let sum: Complex64 = v.iter().map(|&x| field.ep(field.mul(u, x))).sum();
    sum / v.len() as f64
}

/// Unbiased estimate of λ_{v,w} from `samples` uniform permutations.
pub fn lambda_monte_carlo<R: Rng + ?Sized>(
    field: &PrimeField,
    v: &FpVector,
    w: &FpVector,
    samples: u64,
    rng: &mut R,
) -> Result<ExpSumValue> {
    v.check_compatible(w)?;
    check_field(field, v)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let n = v.len();
    let p = field.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut shuffled = vec![0u64; n];
    for _ in 0..samples {
        let sigma = Permutation::random(n, rng);
        for (slot, &j) in shuffled.iter_mut().zip(sigma.images()) {
            *slot = w.entries()[j];
        }
        sum += field.ep(dot_raw(v.entries(), &shuffled, p));
    }
    Ok(ExpSumValue::new(
        sum / samples as f64,
        EvalMode::MonteCarlo,
        samples,
    ))
}

/// `max_{u ≠ 0} |λ_v(u)|` and the smallest u attaining it.
///
/// Only the multiset of entries matters, so the sweep runs over the distinct
/// residues of v with their multiplicities.
pub fn max_support_one(field: &PrimeField, v: &FpVector) -> Result<(f64, FpScalar)> {
    check_field(field, v)?;
    let p = field.modulus();
    if p < 2 || v.is_empty() {
        return Err(Error::InvalidArgument("need p >= 2 and n >= 1".into()));
    }
    let mut sorted = v.entries().to_vec();
    sorted.sort_unstable();
    let histogram: Vec<(u64, f64)> = sorted
        .chunk_by(|a, b| a == b)
        .map(|run| (run[0], run.len() as f64))
        .collect();
    let n = v.len() as f64;
    let mut best = (-1.0f64, 1u64);
    for u in 1..p {
        let z: Complex64 = histogram
            .iter()
            .map(|&(x, m)| field.ep(field.mul(u, x)) * m)
            .sum();
        let modulus = z.norm() / n;
        if modulus > best.0 {
            best = (modulus, u);
        }
    }
    Ok((best.0.min(1.0), field.scalar(best.1)))
}

/// `sqrt(1/2 + m²/2)`, the switching bound implied by `m = max_u |λ_v(u)|`.
pub fn switching_bound(max_support_one: f64) -> f64 {
    (0.5 + 0.5 * max_support_one * max_support_one).sqrt()
}

/// Certificate that `|λ_{v,w}| ≤ spectral_bound` for every nonconstant w.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchCertificate {
    pub v: FpVector,
    pub max_support_one: f64,
    pub spectral_bound: f64,
    pub u_argmax: u64,
}

impl SwitchCertificate {
    fn from_parts(v: FpVector, max_support_one: f64, u_argmax: u64) -> Self {
        Self {
            v,
            max_support_one,
            spectral_bound: switching_bound(max_support_one),
            u_argmax,
        }
    }
}

pub fn certify(field: &PrimeField, v: &FpVector) -> Result<SwitchCertificate> {
    check_field(field, v)?;
    if !v.is_deleted_module() {
        return Err(Error::NotInDeletedModule);
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let (m, u) = max_support_one(field, v)?;
    Ok(SwitchCertificate::from_parts(v.clone(), m, u.value()))
}

/// The intermediate bound from the switching argument, squared:
/// `|λ_{v,w}|² ≤ 1/2 + 1/2 · (n |λ_v(u)|² − 1)/(n − 1)` with u = a − b for the
/// first pair of adjacent distinct values a < b in sorted w.
pub fn sharper_switching_bound_sq(field: &PrimeField, v: &FpVector, w: &FpVector) -> Result<f64> {
    v.check_compatible(w)?;
    check_field(field, v)?;
    let mut sorted = w.entries().to_vec();
    sorted.sort_unstable();
    let pair = sorted
        .windows(2)
        .find(|pair| pair[0] != pair[1])
        .ok_or_else(|| Error::InvalidArgument("w is constant".into()))?;
    let p = field.modulus();
    let u = (pair[0] + p - pair[1]) % p;
    let n = v.len() as f64;
    let lam = support_one_raw(field, v.entries(), u).norm_sqr();
    Ok(0.5 + 0.5 * (n * lam - 1.0) / (n - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found {
        certificate: SwitchCertificate,
        trials: u64,
    },
    Failed {
        best: SwitchCertificate,
        trials: u64,
    },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn certificate(&self) -> &SwitchCertificate {
        match self {
            SearchOutcome::Found { certificate, .. } => certificate,
            SearchOutcome::Failed { best, .. } => best,
        }
    }

    pub fn trials(&self) -> u64 {
        match self {
            SearchOutcome::Found { trials, .. } | SearchOutcome::Failed { trials, .. } => *trials,
        }
    }
}

/// Samples candidates v ∈ V_0 (candidate i from stream i of `seed`) and returns
/// the first one with `max_u |λ_v(u)| < threshold`. The zero vector is scored as
/// vacuous (maximum 1).
pub fn search_v(
    field: &PrimeField,
    n: usize,
    threshold: f64,
    max_trials: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if max_trials == 0 {
        return Err(Error::InvalidArgument("max_trials must be >= 1".into()));
    }

    let evaluate = |index: u64| -> Result<SwitchCertificate> {
        let v = field.sample_v0(n, &mut task_rng(seed, index))?;
        if v.is_zero() {
            return Ok(SwitchCertificate::from_parts(v, 1.0, 1));
        }
        certify(field, &v)
    };

    let mut best: Option<(u64, SwitchCertificate)> = None;
    let mut start = 0u64;
    while start < max_trials {
        let end = (start + SEARCH_BATCH as u64).min(max_trials);
        let batch = (start..end)
            .into_par_iter()
            .map(|i| evaluate(i).map(|c| (i, c)))
            .collect::<Result<Vec<_>>>()?;
        if let Some((i, cert)) = batch.iter().find(|(_, c)| c.max_support_one < threshold) {
            return Ok(SearchOutcome::Found {
                certificate: cert.clone(),
                trials: i + 1,
            });
        }
        for (i, cert) in batch {
            if best
                .as_ref()
                .is_none_or(|(_, b)| cert.max_support_one < b.max_support_one)
            {
                best = Some((i, cert));
            }
        }
        start = end;
    }
    let (_, best) = best.expect("max_trials >= 1");
    Ok(SearchOutcome::Failed {
        best,
        trials: max_trials,
    })
}

/// `4 exp(−ε² n / 8)`.
pub fn tail_bound(n: usize, eps: f64) -> f64 {
    4.0 * (-eps * eps * n as f64 / 8.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub p: u64,
    pub eps: f64,
    pub u: u64,
    pub trials: u64,
    pub exceedances: u64,
    pub empirical_rate: f64,
    pub bound: f64,
}

/// Empirical frequency of `|λ_v(u)| ≥ eps` over random v ∈ V_0, trial i drawn
/// from stream i of `seed`.
pub fn tail_experiment(
    field: &PrimeField,
    n: usize,
    eps: f64,
    trials: u64,
    u: FpScalar,
    seed: u64,
) -> Result<TailReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if eps.is_nan() || eps < 2.0 / n as f64 {
        return Err(Error::InvalidArgument(format!(
            "eps must be at least 2/n = {}, got {eps}",
            2.0 / n as f64
        )));
    }
    if u.is_zero() {
        return Err(Error::InvalidArgument("u must be nonzero".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let exceedances = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let v = field.sample_v0(n, &mut task_rng(seed, i))?;
            let lam = support_one_raw(field, v.entries(), u.value()).norm();
            Ok(u64::from(lam >= eps))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(TailReport {
        n,
        p: field.modulus(),
        eps,
        u: u.value(),
        trials,
        exceedances,
        empirical_rate: exceedances as f64 / trials as f64,
        bound: tail_bound(n, eps),
    })
}

/// Largest `p^n` accepted by [`switching_sweep`].
pub const MAX_SWEEP_SPACE: u64 = 100_000;

/// Outcome of checking the switching inequality on every pair (v, w) with
/// v ∈ V_0 and w ∈ F_p^n nonconstant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingSweep {
    pub n: usize,
    pub p: u64,
    pub pairs: u64,
    /// Pairs with `|λ_{v,w}|² > 1/2 + m_v²/2 + tol`.
    pub violations: u64,
    /// Pairs exceeding the sharper bound from [`sharper_switching_bound_sq`].
    pub sharper_violations: u64,
    /// `max (|λ_{v,w}|² − 1/2 − m_v²/2)` over all pairs.
    pub worst_slack: f64,
    pub tolerance: f64,
}

fn sorted_key(entries: &[u64]) -> Vec<u64> {
    let mut k = entries.to_vec();
    k.sort_unstable();
    k
}

/// Exhaustive check of `|λ_{v,w}|² ≤ 1/2 + 1/2 · max_u |λ_v(u)|²`. Values are
/// cached per pair of sorted entry lists, since λ_{v,w} and λ_v(u) only depend
/// on the multisets of entries.
pub fn switching_sweep(field: &PrimeField, n: usize, tolerance: f64) -> Result<SwitchingSweep> {
    let p = field.modulus();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let space = p.checked_pow(n as u32).unwrap_or(u64::MAX);
    if space > MAX_SWEEP_SPACE || n > MAX_ENUMERATION_DEGREE {
        return Err(Error::TooLarge {
            what: "p^n for the switching sweep",
            value: space as u128,
            limit: MAX_SWEEP_SPACE as u128,
        });
    }
    let vectors: Vec<Vec<u64>> = (0..space)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % p;
                    k /= p;
                    d
                })
                .collect()
        })
        .collect();
    let is_v0 = |e: &[u64]| e.iter().fold(0u64, |a, &x| (a + x) % p) == 0;
    let is_constant = |e: &[u64]| e.iter().all(|&x| x == e[0]);

    let mut v_keys: Vec<Vec<u64>> = vectors
        .iter()
        .filter(|e| is_v0(e))
        .map(|e| sorted_key(e))
        .collect();
    v_keys.sort();
    v_keys.dedup();
    let mut w_keys: Vec<Vec<u64>> = vectors
        .iter()
        .filter(|e| !is_constant(e))
        .map(|e| sorted_key(e))
        .collect();
    w_keys.sort();
    w_keys.dedup();

    // (|λ_{v,w}|², bound², sharper bound²) per pair of keys
    let table: Vec<Vec<(f64, f64, f64)>> = v_keys
        .par_iter()
        .map(|kv| -> Result<Vec<(f64, f64, f64)>> {
            let v = FpVector::from_reduced(kv.clone(), p);
            let (m, _) = max_support_one(field, &v)?;
            let bound = 0.5 + 0.5 * m * m;
            w_keys
                .iter()
                .map(|kw| {
                    let w = FpVector::from_reduced(kw.clone(), p);
                    let lam = lambda_exact(field, &v, &w)?.value().norm_sqr();
                    Ok((lam, bound, sharper_switching_bound_sq(field, &v, &w)?))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let v_index: std::collections::HashMap<&[u64], usize> = v_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_slice(), i))
        .collect();
    let w_index: std::collections::HashMap<&[u64], usize> = w_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_slice(), i))
        .collect();
    let w_slots: Vec<usize> = vectors
        .iter()
        .filter(|e| !is_constant(e))
        .map(|e| w_index[sorted_key(e).as_slice()])
        .collect();

    let mut sweep = SwitchingSweep {
        n,
        p,
        pairs: 0,
        violations: 0,
        sharper_violations: 0,
        worst_slack: f64::NEG_INFINITY,
        tolerance,
    };
    for v in vectors.iter().filter(|e| is_v0(e)) {
        let row = &table[v_index[sorted_key(v).as_slice()]];
        for &j in &w_slots {
            let (lam, bound, sharper) = row[j];
            sweep.pairs += 1;
            sweep.violations += u64::from(lam > bound + tolerance);
            sweep.sharper_violations += u64::from(lam > sharper + tolerance);
            sweep.worst_slack = sweep.worst_slack.max(lam - bound);
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::factorial;
    use crate::rng::master_rng;
    use proptest::prelude::*;
    use rand::Rng;

    /// Literal definition: average over all n! permutations.
    fn lambda_bruteforce(field: &PrimeField, v: &FpVector, w: &FpVector) -> Complex64 {
        let n = v.len();
        let total = factorial(n) as u64;
        let mut sum = Complex64::new(0.0, 0.0);
        for r in 0..total {
            let ws = Permutation::unrank(n, r).act(w).unwrap();
            sum += field.ep_eval(v.dot(&ws).unwrap());
        }
        sum / total as f64
    }

    fn all_vectors(n: usize, p: u64) -> Vec<FpVector> {
        let mut out = vec![];
        let total = p.pow(n as u32);
        for mut k in 0..total {
            let mut e = vec![0; n];
            for slot in e.iter_mut() {
                *slot = k % p;
                k /= p;
            }
            out.push(FpVector::new(e, p));
        }
        out
    }

    #[test]
    fn lambda_exact_examples() {
        let f = PrimeField::new(5).unwrap();
        let v = FpVector::new(vec![1, 4], 5);
        let one = lambda_exact(&f, &v, &FpVector::zeros(2, 5)).unwrap();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let c = lambda_exact(&f, &v, &FpVector::constant(2, 3, 5)).unwrap();
        assert_eq!((c.re, c.im), (1.0, 0.0));

        let lam = lambda_exact(&f, &v, &FpVector::new(vec![1, 0], 5)).unwrap();
        let expected = (f.ep(1) + f.ep(4)) / 2.0;
        assert!((lam.value() - expected).norm() < 1e-15);
        assert!((lam.re - 0.309017).abs() < 1e-6);
        assert_eq!(lam.mode, EvalMode::Exact);
    }

    #[test]
    fn lambda_exact_guards() {
        let f = PrimeField::new(3).unwrap();
        let big = FpVector::zeros(11, 3);
        assert!(matches!(
            lambda_exact(&f, &big, &big),
            Err(Error::TooLarge { .. })
        ));
        assert!(lambda_exact(&f, &FpVector::zeros(2, 3), &FpVector::zeros(3, 3)).is_err());
        let f5 = PrimeField::new(5).unwrap();
        assert!(lambda_exact(&f5, &FpVector::zeros(2, 3), &FpVector::zeros(2, 3)).is_err());
    }

    #[test]
    fn lambda_exact_matches_bruteforce() {
        let mut rng = master_rng(11);
        for (n, p) in [(3, 5), (4, 3), (5, 7), (6, 2)] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..10 {
                let v = f.sample_v0(n, &mut rng).unwrap();
                let w = FpVector::new((0..n).map(|_| rng.random_range(0..p)).collect(), p);
                let fast = lambda_exact(&f, &v, &w).unwrap().value();
                let slow = lambda_bruteforce(&f, &v, &w);
                assert!((fast - slow).norm() < 1e-12, "n={n} p={p} v={v} w={w}");
            }
        }
    }

    #[test]
    fn support_one_examples() {
        let f = PrimeField::new(3).unwrap();
        let v = FpVector::from_signed(&[1, -1, 0], 3);
        let z = lambda_support_one(&f, &v, f.scalar(0)).unwrap();
        assert_eq!((z.re, z.im), (1.0, 0.0));
        let z = lambda_support_one(&f, &v, f.scalar(1)).unwrap();
        assert!(z.norm() < 1e-15);
        assert_eq!(z.mode, EvalMode::ClosedForm);
    }

    #[test]
    fn support_one_matches_exact_sweep() {
        let mut rng = master_rng(5);
        for n in 2..=6 {
            for p in [2u64, 3, 5] {
                let f = PrimeField::new(p).unwrap();
                for _ in 0..20 {
                    let v = f.sample_v0(n, &mut rng).unwrap();
                    for u in 0..p {
                        let w = FpVector::support_one(n, u, p);
                        let exact = lambda_bruteforce(&f, &v, &w);
                        let closed = lambda_support_one(&f, &v, f.scalar(u)).unwrap().value();
                        assert!((exact - closed).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn monte_carlo_examples() {
        let f = PrimeField::new(7).unwrap();
        let v = FpVector::from_signed(&[1, -1, 2, -2, 0], 7);
        let z = FpVector::zeros(5, 7);
        let est = lambda_monte_carlo(&f, &v, &z, 17, &mut master_rng(0)).unwrap();
        assert_eq!((est.re, est.im, est.sample_count), (1.0, 0.0, 17));

        let w = FpVector::new(vec![0, 1, 3, 3, 6], 7);
        let a = lambda_monte_carlo(&f, &v, &w, 500, &mut master_rng(42)).unwrap();
        let b = lambda_monte_carlo(&f, &v, &w, 500, &mut master_rng(42)).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
        assert!(lambda_monte_carlo(&f, &v, &w, 0, &mut master_rng(0)).is_err());
    }

    #[test]
    fn monte_carlo_concentrates_around_exact() {
        let f = PrimeField::new(7).unwrap();
        let v = FpVector::from_signed(&[1, -1, 2, -2, 0], 7);
        let w = FpVector::new(vec![0, 1, 3, 3, 6], 7);
        let exact = lambda_exact(&f, &v, &w).unwrap().value();
        let samples = 400u64;
        let runs = 200;
        let hits = (0..runs)
            .filter(|&i| {
                let est = lambda_monte_carlo(&f, &v, &w, samples, &mut task_rng(1, i)).unwrap();
                (est.value() - exact).norm() <= 3.0 / (samples as f64).sqrt()
            })
            .count();
        assert!(hits as f64 >= 0.99 * runs as f64, "{hits}/{runs}");
    }

    #[test]
    fn monte_carlo_is_unbiased() {
        let f = PrimeField::new(5).unwrap();
        let v = FpVector::new(vec![1, 2, 3, 4, 0], 5);
        let w = FpVector::new(vec![0, 0, 1, 2, 2], 5);
        let exact = lambda_exact(&f, &v, &w).unwrap().value();
        let seeds = 40u64;
        let samples = 2_000u64;
        let mean: Complex64 = (0..seeds)
            .map(|s| {
                lambda_monte_carlo(&f, &v, &w, samples, &mut task_rng(77, s))
                    .unwrap()
                    .value()
            })
            .sum::<Complex64>()
            / seeds as f64;
        // each sample has variance ≤ 1; 4σ on the pooled mean
        let sigma = 1.0 / ((seeds * samples) as f64).sqrt();
        assert!((mean - exact).norm() <= 4.0 * sigma);
    }

    #[test]
    fn max_support_one_examples() {
        let f = PrimeField::new(5).unwrap();
        let (m, _) = max_support_one(&f, &FpVector::zeros(3, 5)).unwrap();
        assert_eq!(m, 1.0);

        // λ_v(u) = cos(2πu/5): |·| is 0.309 at u ∈ {1,4} and 0.809 at u ∈ {2,3}
        let (m, u) = max_support_one(&f, &FpVector::new(vec![1, 4], 5)).unwrap();
        assert!((m - 0.809017).abs() < 1e-6);
        assert_eq!(u.value(), 2);

        let (m, _) = max_support_one(&f, &FpVector::new(vec![0, 1, 2, 3, 4], 5)).unwrap();
        assert!(m < 1e-15);
    }

    #[test]
    fn certify_examples() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(certify(&f, &FpVector::zeros(2, 5)), Err(Error::ZeroVector));
        assert_eq!(
            certify(&f, &FpVector::new(vec![1, 1], 5)),
            Err(Error::NotInDeletedModule)
        );
        assert_eq!(switching_bound(1.0), 1.0);
        assert!(switching_bound(0.5) <= (5.0f64 / 8.0).sqrt() + 1e-15);
        assert!((switching_bound(0.5) - 0.790569).abs() < 1e-6);

        let v = FpVector::new(vec![1, 4], 5);
        let cert = certify(&f, &v).unwrap();
        assert!((cert.spectral_bound - 0.909535).abs() < 1e-6);
        let exhaustive = all_vectors(2, 5)
            .into_iter()
            .filter(|w| !w.is_constant())
            .map(|w| lambda_exact(&f, &v, &w).unwrap().norm())
            .fold(0.0, f64::max);
        assert!((exhaustive - 0.809017).abs() < 1e-6);
        assert!(exhaustive <= cert.spectral_bound);
    }

    #[test]
    fn search_examples() {
        let f = PrimeField::new(5).unwrap();
        let out = search_v(&f, 2, 0.5, 50, 1).unwrap();
        assert!(!out.is_found());
        assert_eq!(out.trials(), 50);
        assert!((out.certificate().max_support_one - 0.809017).abs() < 1e-6);

        let f = PrimeField::new(61).unwrap();
        let out = search_v(&f, 64, 0.5, 100, 7).unwrap();
        assert!(out.is_found());
        assert!(out.certificate().spectral_bound <= (5.0f64 / 8.0).sqrt() + 1e-12);
        assert_eq!(out, search_v(&f, 64, 0.5, 100, 7).unwrap());

        assert!(search_v(&f, 64, 1.5, 100, 7).is_err());
        assert!(search_v(&f, 64, 0.0, 100, 7).is_err());
    }

    #[test]
    fn switching_sweep_small_cases() {
        let f = PrimeField::new(3).unwrap();
        let sweep = switching_sweep(&f, 2, 1e-9).unwrap();
        // |V_0| = 3 and 9 − 3 nonconstant w
        assert_eq!(sweep.pairs, 18);
        assert_eq!((sweep.violations, sweep.sharper_violations), (0, 0));
        // v = 0 gives |λ|² = 1 = bound
        assert!(sweep.worst_slack.abs() < 1e-12);
        assert!(switching_sweep(&f, 1, 1e-9).is_err());
        let f = PrimeField::new(11).unwrap();
        assert!(switching_sweep(&f, 5, 1e-9).is_err());
    }

    #[test]
    fn tail_examples() {
        assert!((tail_bound(1000, 0.25) - 0.0016186).abs() < 1e-7);
        let f = PrimeField::new(101).unwrap();
        let r = tail_experiment(&f, 50, 2.0, 200, f.scalar(3), 1).unwrap();
        assert_eq!(r.empirical_rate, 0.0);
        assert!(tail_experiment(&f, 50, 0.01, 10, f.scalar(3), 1).is_err());
        assert!(tail_experiment(&f, 50, 0.5, 10, f.scalar(0), 1).is_err());
        let a = tail_experiment(&f, 40, 0.3, 500, f.scalar(1), 9).unwrap();
        let b = tail_experiment(&f, 40, 0.3, 500, f.scalar(1), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn switching_inequalities_small_exhaustive() {
        for (n, p) in [(2, 5), (3, 3), (3, 5), (4, 3)] {
            let f = PrimeField::new(p).unwrap();
            let vs: Vec<_> = all_vectors(n, p)
                .into_iter()
                .filter(|v| v.is_deleted_module())
                .collect();
            let ws: Vec<_> = all_vectors(n, p)
                .into_iter()
                .filter(|w| !w.is_constant())
                .collect();
            for v in &vs {
                let (m, _) = max_support_one(&f, v).unwrap();
                for w in &ws {
                    let lam = lambda_exact(&f, v, w).unwrap().value().norm_sqr();
                    assert!(lam <= 0.5 + 0.5 * m * m + 1e-9);
                    assert!(lam <= sharper_switching_bound_sq(&f, v, w).unwrap() + 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn lambda_is_permutation_invariant_and_conjugate_symmetric(
            seed in any::<u64>(), n in 2usize..7, p_idx in 0usize..3, r in 0u64..5040
        ) {
            let p = [3u64, 5, 7][p_idx];
            let f = PrimeField::new(p).unwrap();
            let mut rng = master_rng(seed);
            let v = f.sample_v0(n, &mut rng).unwrap();
            let w = FpVector::new((0..n).map(|_| rng.random_range(0..p)).collect(), p);
            let sigma = Permutation::unrank(n, r % factorial(n) as u64);
            let a = lambda_exact(&f, &v, &w).unwrap().value();
            let b = lambda_exact(&f, &v, &sigma.act(&w).unwrap()).unwrap().value();
            prop_assert!((a - b).norm() <= 1e-12);
            let c = lambda_exact(&f, &v, &w.neg()).unwrap().value();
            prop_assert!((c - a.conj()).norm() <= 1e-12);
            prop_assert!(a.norm() <= 1.0 + 1e-9);
        }

        #[test]
        fn certificate_invariants(seed in any::<u64>(), n in 2usize..30, p_idx in 0usize..4) {
            let p = [2u64, 3, 61, 101][p_idx];
            let f = PrimeField::new(p).unwrap();
            let v = f.sample_v0(n, &mut master_rng(seed)).unwrap();
            prop_assume!(!v.is_zero());
            let c = certify(&f, &v).unwrap();
            prop_assert!((0.0..=1.0).contains(&c.max_support_one));
            prop_assert!((c.spectral_bound - ((1.0 + c.max_support_one.powi(2)) / 2.0).sqrt()).abs() <= 1e-12);
            prop_assert!(c.spectral_bound >= std::f64::consts::FRAC_1_SQRT_2 - 1e-15);
        }
    }
}
