//! Spectra of Cayley multigraphs.
//!
//! Two independent routes are provided: the character method for the abelian
//! graphs Cay(V_0, v^{S_n}), whose normalized eigenvalues are the real parts
//! Re λ_{v,w} over coset representatives w of V/⟨𝟏⟩, and a cyclic Jacobi
//! eigensolver for arbitrary small Cayley multigraphs.
//!
//! Gap convention: `gap = 1 − μ₂` with μ₂ the second largest (signed)
//! eigenvalue of the normalized adjacency matrix, so gap ∈ [0, 2].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::average_over;
use crate::finite_group::{GroupLike, GroupTable};
use crate::modp::{dot_raw, FpVector, PrimeField};
use crate::perm::{
    factorial, for_each_rearrangement, multinomial_count, orbit, orbit_span_rank,
    MAX_ENUMERATION_DEGREE,
};

pub const MAX_DENSE_DIMENSION: usize = 4000;
pub const MAX_ABELIAN_ORDER: u128 = 1_000_000;
pub const MAX_DISJOINT_UNION_ORDER: u128 = 100_000;

const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    left: r.len(),
                    right: n,
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self[(i, j)] * self[(i, j)];
                }
            }
        }
        acc.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition `A = Q diag(values) Qᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in the order of the columns of `vectors` (unsorted).
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// 1e−10.
pub fn jacobi_eigen(matrix: &DenseMatrix) -> Result<SymmetricEigen> {
    let n = matrix.dim();
    for i in 0..n {
        for j in i + 1..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Asymmetric { row: i, col: j });
            }
        }
    }
    let mut a = matrix.clone();
    let mut q = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        if a.off_diagonal_norm() < OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J = [[c, s], [−s, c]] in the (p, r) plane
                for k in (0..n).filter(|&k| k != p && k != r) {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    let new_kp = c * akp - s * akr;
                    let new_kr = s * akp + c * akr;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp;
                    a[(k, r)] = new_kr;
                    a[(r, k)] = new_kr;
                }
                a[(p, p)] -= t * apr;
                a[(r, r)] += t * apr;
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    if a.off_diagonal_norm() >= OFF_DIAGONAL_TOL {
        return Err(Error::InvalidArgument(
            "Jacobi iteration did not converge".into(),
        ));
    }
    Ok(SymmetricEigen {
        values: (0..n).map(|i| a[(i, i)]).collect(),
        vectors: q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Character,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Normalized eigenvalues in ascending order, with multiplicity.
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    pub method: SpectrumMethod,
    pub graph_order: usize,
    /// The degree the adjacency matrix was divided by.
    pub degree_normalization: u64,
}

impl SpectrumResult {
    fn from_unsorted(
        mut eigenvalues: Vec<f64>,
        method: SpectrumMethod,
        degree_normalization: u64,
    ) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let graph_order = eigenvalues.len();
        // a single vertex has no nontrivial eigenvalue; report the gap as 1
        let gap = match graph_order {
            0 | 1 => 1.0,
            k => 1.0 - eigenvalues[k - 2],
        };
        Self {
            eigenvalues,
            gap,
            method,
            graph_order,
            degree_normalization,
        }
    }

    pub fn second_largest(&self) -> Option<f64> {
        let k = self.eigenvalues.len();
        (k >= 2).then(|| self.eigenvalues[k - 2])
    }
}

/// Full spectrum of `adjacency / degree`.
pub fn dense_spectrum(adjacency: &DenseMatrix, degree: usize) -> Result<SpectrumResult> {
    let n = adjacency.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if n > MAX_DENSE_DIMENSION {
        return Err(Error::TooLarge {
            what: "dense matrix dimension",
            value: n as u128,
            limit: MAX_DENSE_DIMENSION as u128,
        });
    }
    if degree == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (adjacency[(i, j)] - adjacency[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Asymmetric { row: i, col: j });
            }
        }
        let sum: f64 = adjacency.row(i).iter().sum();
        if (sum - degree as f64).abs() > 1e-9 {
            return Err(Error::NotRegular {
                row: i,
                sum,
                degree,
            });
        }
    }
    let eig = jacobi_eigen(&adjacency.scaled(1.0 / degree as f64))?;
    Ok(SpectrumResult::from_unsorted(
        eig.values,
        SpectrumMethod::Dense,
        degree as u64,
    ))
}

/// Adjacency of Cay(G, S) on `elements`: entry (g, h) counts h among
/// {g s, g s⁻¹ : s ∈ S}. Row sums are 2|S|.
pub fn cayley_adjacency<E: GroupLike>(elements: &[E], gens: &[E]) -> Result<DenseMatrix> {
    let n = elements.len();
    if n > MAX_DENSE_DIMENSION {
        return Err(Error::TooLarge {
            what: "group order for dense adjacency",
            value: n as u128,
            limit: MAX_DENSE_DIMENSION as u128,
        });
    }
    let index: std::collections::HashMap<&E, usize> =
        elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    if gens.iter().any(|s| !index.contains_key(s)) {
        return Err(Error::OutsideGroup);
    }
    let inverses: Vec<E> = gens.iter().map(GroupLike::inv).collect();
    let mut m = DenseMatrix::zeros(n);
    for (i, g) in elements.iter().enumerate() {
        for s in gens.iter().chain(&inverses) {
            let j = *index.get(&g.op(s)).ok_or(Error::OutsideGroup)?;
            m[(i, j)] += 1.0;
        }
    }
    Ok(m)
}

/// Cayley adjacency computed from a multiplication table.
pub fn cayley_adjacency_table(table: &GroupTable, gens: &[usize]) -> Result<DenseMatrix> {
    let n = table.order();
    if gens.iter().any(|&s| s >= n) {
        return Err(Error::OutsideGroup);
    }
    if n > MAX_DENSE_DIMENSION {
        return Err(Error::TooLarge {
            what: "group order for dense adjacency",
            value: n as u128,
            limit: MAX_DENSE_DIMENSION as u128,
        });
    }
    let mut m = DenseMatrix::zeros(n);
    for g in 0..n {
        for &s in gens {
            m[(g, table.mul(g, s))] += 1.0;
            m[(g, table.mul(g, table.inv(s)))] += 1.0;
        }
    }
    Ok(m)
}

/// Spectral gap of Cay(G, S) from the dense solver.
pub fn table_gap(table: &GroupTable, gens: &[usize]) -> Result<SpectrumResult> {
    dense_spectrum(&cayley_adjacency_table(table, gens)?, 2 * gens.len())
}

/// Character spectrum of Cay(V_0, v^{S_n}) together with the extremal character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianSpectrum {
    pub spectrum: SpectrumResult,
    /// A nonconstant coset representative w attaining the second largest eigenvalue.
    pub extremal_w: FpVector,
    /// `max |Im λ_{v,w}|`, which cancels between w and −w.
    pub max_imaginary: f64,
}

fn check_abelian_input(field: &PrimeField, v: &FpVector, limit: u128, power: u32) -> Result<()> {
    let p = field.modulus();
    let n = v.len();
    if v.modulus() != p {
        return Err(Error::ModulusMismatch {
            left: v.modulus(),
            right: p,
        });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if !v.is_deleted_module() {
        return Err(Error::NotInDeletedModule);
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    if n > MAX_ENUMERATION_DEGREE {
        return Err(Error::TooLarge {
            what: "degree n for exact spectra",
            value: n as u128,
            limit: MAX_ENUMERATION_DEGREE as u128,
        });
    }
    let size = (p as u128).checked_pow(power).unwrap_or(u128::MAX);
    if size > limit {
        return Err(Error::TooLarge {
            what: "number of characters",
            value: size,
            limit,
        });
    }
    Ok(())
}

/// λ_{v,w} for every w in `ws`, enumerating whichever orbit is smaller.
fn lambdas(field: &PrimeField, v: &FpVector, ws: &[Vec<u64>]) -> Vec<Complex64> {
    let orbit_v: Vec<Vec<u64>> = orbit(v)
        .expect("degree checked")
        .into_iter()
        .map(|x| x.entries().to_vec())
        .collect();
    let p = field.modulus();
    ws.par_iter()
        .map(|w| {
            if orbit_v.len() as u128 <= multinomial_count(w) {
                average_over(field, &orbit_v, w)
            } else {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut count = 0u64;
                for_each_rearrangement(w, |r| {
                    sum += field.ep(dot_raw(v.entries(), r, p));
                    count += 1;
                });
                sum / count as f64
            }
        })
        .collect()
}

/// Vectors of length `n` whose first `free` coordinates run over F_p (in
/// base-p order, coordinate 0 least significant) and whose others are 0.
fn enumerate_vectors(n: usize, free: usize, p: u64) -> Vec<Vec<u64>> {
    let total = p.pow(free as u32);
    (0..total)
        .map(|mut k| {
            let mut e = vec![0u64; n];
            for slot in e.iter_mut().take(free) {
                *slot = k % p;
                k /= p;
            }
            e
        })
        .collect()
}

fn index_of(w: &[u64], free: usize, p: u64) -> usize {
    w[..free].iter().rev().fold(0u64, |acc, &x| acc * p + x) as usize
}

/// Spectrum of Cay(V_0, v^{S_n}) by characters: one eigenvalue Re λ_{v,w} per
/// coset representative w = (w_1, …, w_{n−1}, 0) of V/⟨𝟏⟩.
pub fn abelian_spectrum(field: &PrimeField, v: &FpVector) -> Result<AbelianSpectrum> {
    let n = v.len();
    check_abelian_input(field, v, MAX_ABELIAN_ORDER, n.saturating_sub(1) as u32)?;
    let p = field.modulus();
    let reps = enumerate_vectors(n, n - 1, p);
    let values = lambdas(field, v, &reps);

    // w ↦ −w permutes the representatives and conjugates λ
    let mut max_imaginary = 0.0f64;
    for (k, w) in reps.iter().enumerate() {
        let neg: Vec<u64> = w.iter().map(|&x| (p - x) % p).collect();
        let j = index_of(&neg, n - 1, p);
        let mismatch = (values[j] - values[k].conj()).norm();
        if mismatch > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "character values not closed under conjugation (|Δ| = {mismatch:e})"
            )));
        }
        max_imaginary = max_imaginary.max(values[k].im.abs());
    }

    let (extremal, _) =
        values
            .iter()
            .enumerate()
            .skip(1)
            .fold((1usize, f64::NEG_INFINITY), |best, (k, z)| {
                if z.re > best.1 {
                    (k, z.re)
                } else {
                    best
                }
            });
    let spectrum = SpectrumResult::from_unsorted(
        values.iter().map(|z| z.re).collect(),
        SpectrumMethod::Character,
        2 * factorial(n) as u64,
    );
    Ok(AbelianSpectrum {
        spectrum,
        extremal_w: FpVector::new(reps[extremal].clone(), p),
        max_imaginary,
    })
}

/// Spectrum of Cay(V_0, v^{S_n}) from the dense solver on the distinct orbit,
/// used to cross-check [`abelian_spectrum`].
pub fn dense_v0_spectrum(field: &PrimeField, v: &FpVector) -> Result<SpectrumResult> {
    let n = v.len();
    check_abelian_input(
        field,
        v,
        MAX_DENSE_DIMENSION as u128,
        n.saturating_sub(1) as u32,
    )?;
    let p = field.modulus();
    let elements: Vec<FpVector> = enumerate_vectors(n, n - 1, p)
        .into_iter()
        .map(|mut e| {
            let s: u64 = e.iter().sum::<u64>() % p;
            e[n - 1] = (p - s) % p;
            FpVector::new(e, p)
        })
        .collect();
    let gens = orbit(v)?;
    dense_spectrum(&cayley_adjacency(&elements, &gens)?, 2 * gens.len())
}

/// Whether the orbit v^{S_n} spans V_0, i.e. whether Cay(V_0, v^{S_n}) is connected.
pub fn orbit_spans_v0(v: &FpVector) -> bool {
    v.len() >= 2 && orbit_span_rank(v) == v.len() - 1 && v.is_deleted_module()
}

/// Checks that {Re λ_{v,w} : w ∈ V} is p copies of the V_0 spectrum.
pub fn disjoint_union_check(field: &PrimeField, v: &FpVector) -> Result<bool> {
    let n = v.len();
    check_abelian_input(field, v, MAX_DISJOINT_UNION_ORDER, n as u32)?;
    let p = field.modulus();
    let base = abelian_spectrum(field, v)?;
    let all = enumerate_vectors(n, n, p);
    let mut full: Vec<f64> = lambdas(field, v, &all).iter().map(|z| z.re).collect();
    full.sort_by(f64::total_cmp);
    let mut copies: Vec<f64> = base
        .spectrum
        .eigenvalues
        .iter()
        .flat_map(|&x| std::iter::repeat_n(x, p as usize))
        .collect();
    copies.sort_by(f64::total_cmp);
    Ok(full.len() == copies.len() && full.iter().zip(&copies).all(|(a, b)| (a - b).abs() <= 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_group::EnumeratedGroup;
    use crate::perm::{standard_generators, Permutation};
    use crate::rng::master_rng;
    use rand::Rng;

    fn assert_close_sorted(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    fn cos_deg(d: f64) -> f64 {
        d.to_radians().cos()
    }

    fn v0_elements(n: usize, p: u64) -> Vec<FpVector> {
        enumerate_vectors(n, n, p)
            .into_iter()
            .map(|e| FpVector::new(e, p))
            .filter(|v| v.is_deleted_module())
            .collect()
    }

    #[test]
    fn c2_doubled_edge() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let s = dense_spectrum(&a, 2).unwrap();
        assert_close_sorted(&s.eigenvalues, &[-1.0, 1.0], 1e-12);
        assert!((s.gap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn five_cycle_matches_circulant_formula() {
        let c5: Vec<FpVector> = (0..5).map(|k| FpVector::new(vec![k], 5)).collect();
        let a = cayley_adjacency(&c5, &[FpVector::new(vec![1], 5)]).unwrap();
        let s = dense_spectrum(&a, 2).unwrap();
        // eigenvalues cos(2πk/5), k = 0..4
        let mut expected: Vec<f64> = (0..5).map(|k| cos_deg(72.0 * k as f64)).collect();
        expected.sort_by(f64::total_cmp);
        assert_close_sorted(&s.eigenvalues, &expected, 1e-10);
    }

    #[test]
    fn diagonal_adjacency_has_flat_spectrum() {
        let a = DenseMatrix::identity(4).scaled(2.0);
        let s = dense_spectrum(&a, 2).unwrap();
        assert_close_sorted(&s.eigenvalues, &[1.0; 4], 1e-15);
        assert_eq!(s.gap, 0.0);
    }

    #[test]
    fn dense_spectrum_rejects_bad_input() {
        let asym = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(matches!(
            dense_spectrum(&asym, 2),
            Err(Error::Asymmetric { .. })
        ));
        let irregular = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            dense_spectrum(&irregular, 2),
            Err(Error::NotRegular { .. })
        ));
    }

    #[test]
    fn jacobi_reconstructs_and_agrees_with_nalgebra() {
        let mut rng = master_rng(4);
        for n in [1usize, 2, 3, 7, 20, 40] {
            let mut m = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let x: f64 = rng.random_range(-1.0..1.0);
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            let eig = jacobi_eigen(&m).unwrap();
            // Q Λ Qᵀ
            let mut err = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let r: f64 = (0..n)
                        .map(|k| eig.vectors[(i, k)] * eig.values[k] * eig.vectors[(j, k)])
                        .sum();
                    err += (r - m[(i, j)]).powi(2);
                }
            }
            assert!(err.sqrt() < 1e-8, "n={n} err={}", err.sqrt());

            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
            let mut expected: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
            expected.sort_by(f64::total_cmp);
            let mut got = eig.values.clone();
            got.sort_by(f64::total_cmp);
            assert_close_sorted(&got, &expected, 1e-9);
        }
    }

    #[test]
    fn identity_generator_gives_doubled_loops() {
        let els: Vec<Permutation> = (0..6).map(|r| Permutation::unrank(3, r)).collect();
        let a = cayley_adjacency(&els, &[Permutation::identity(3)]).unwrap();
        assert_eq!(a, DenseMatrix::identity(6).scaled(2.0));
    }

    #[test]
    fn cayley_adjacency_of_s3_matches_hand_table() {
        // vertices ordered by Lehmer rank; g ↦ g∘s and g ↦ g∘s⁻¹ for s ∈ {(0 1), (0 1 2)}
        let els: Vec<Permutation> = (0..6).map(|r| Permutation::unrank(3, r)).collect();
        let gens = standard_generators(3).unwrap();
        let a = cayley_adjacency(&els, &gens).unwrap();
        // rank order: 012, 021, 102, 120, 201, 210
        #[rustfmt::skip]
        let expected = [
            [0., 0., 2., 1., 1., 0.],
            [0., 0., 1., 0., 2., 1.],
            [2., 1., 0., 0., 0., 1.],
            [1., 0., 0., 0., 1., 2.],
            [1., 2., 0., 1., 0., 0.],
            [0., 1., 1., 2., 0., 0.],
        ];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(a.row(i), row, "row {i}");
            assert_eq!(a.row(i).iter().sum::<f64>(), 4.0);
        }
        let outside = [Permutation::identity(4)];
        assert!(cayley_adjacency(&els[..1], &outside).is_err());
    }

    #[test]
    fn abelian_spectrum_n2_p5() {
        let f = PrimeField::new(5).unwrap();
        let v = FpVector::new(vec![1, 4], 5);
        let a = abelian_spectrum(&f, &v).unwrap();
        let mut expected = vec![
            1.0,
            cos_deg(72.0),
            cos_deg(144.0),
            cos_deg(144.0),
            cos_deg(72.0),
        ];
        expected.sort_by(f64::total_cmp);
        assert_close_sorted(&a.spectrum.eigenvalues, &expected, 1e-12);
        assert!((a.spectrum.gap - 0.690983).abs() < 1e-6);
        assert_eq!(a.spectrum.degree_normalization, 4);
        assert!(!a.extremal_w.is_constant());

        // dense route on the 5-cycle
        let c5: Vec<FpVector> = v0_elements(2, 5);
        let orbit_v = orbit(&v).unwrap();
        let dense = dense_spectrum(&cayley_adjacency(&c5, &orbit_v).unwrap(), 4).unwrap();
        assert_close_sorted(&dense.eigenvalues, &a.spectrum.eigenvalues, 1e-10);
        let public = dense_v0_spectrum(&f, &v).unwrap();
        assert_close_sorted(&public.eigenvalues, &a.spectrum.eigenvalues, 1e-10);
    }

    #[test]
    fn abelian_spectrum_preconditions() {
        // p | n: the all-ones vector lies in V_0 and its orbit spans only ⟨𝟏⟩
        let f3 = PrimeField::new(3).unwrap();
        let ones = abelian_spectrum(&f3, &FpVector::new(vec![1, 1, 1], 3)).unwrap();
        assert!(ones.spectrum.gap.abs() < 1e-12);
        let v = FpVector::new(vec![1, 2, 0], 3);
        let a = abelian_spectrum(&f3, &v).unwrap();
        let dense = dense_spectrum(
            &cayley_adjacency(&v0_elements(3, 3), &orbit(&v).unwrap()).unwrap(),
            12,
        )
        .unwrap();
        assert_close_sorted(&dense.eigenvalues, &a.spectrum.eigenvalues, 1e-10);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(
            abelian_spectrum(&f5, &FpVector::new(vec![1, 1], 5)).unwrap_err(),
            Error::NotInDeletedModule
        );
        assert_eq!(
            abelian_spectrum(&f5, &FpVector::zeros(3, 5)).unwrap_err(),
            Error::ZeroVector
        );
        let f101 = PrimeField::new(101).unwrap();
        let v = FpVector::from_signed(&[1, -1, 0, 0], 101);
        assert!(matches!(
            abelian_spectrum(&f101, &v),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn trivial_eigenvalue_and_gap_bounds() {
        let mut rng = master_rng(8);
        for (n, p) in [(3usize, 5u64), (4, 3), (5, 2), (4, 5)] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..5 {
                let v = f.sample_v0(n, &mut rng).unwrap();
                if v.is_zero() {
                    continue;
                }
                let a = abelian_spectrum(&f, &v).unwrap();
                let s = &a.spectrum;
                assert!((s.eigenvalues.last().unwrap() - 1.0).abs() < 1e-9);
                assert!(s
                    .eigenvalues
                    .iter()
                    .all(|&x| (-1.0 - 1e-9..=1.0 + 1e-9).contains(&x)));
                assert!((0.0..=2.0).contains(&s.gap));
                assert_eq!(s.gap > 1e-9, orbit_spans_v0(&v), "v = {v}");
                assert_eq!(s.graph_order as u64, p.pow(n as u32 - 1));
            }
        }
    }

    #[test]
    fn connectivity_matches_bfs() {
        // gap > 0 ⇔ orbit spans V_0 ⇔ Cay(V_0, orbit) is connected
        for (n, p) in [(3usize, 2u64), (3, 5), (4, 3)] {
            let f = PrimeField::new(p).unwrap();
            let els = v0_elements(n, p);
            for v in els.iter().filter(|v| !v.is_zero()) {
                let orbit_v = orbit(v).unwrap();
                let closure = EnumeratedGroup::generated_by(&orbit_v, FpVector::zeros(n, p))
                    .unwrap()
                    .table
                    .order();
                let gap = abelian_spectrum(&f, v).unwrap().spectrum.gap;
                assert_eq!(closure == els.len(), gap > 1e-9, "v = {v}");
                assert_eq!(closure == els.len(), orbit_spans_v0(v));
            }
        }
    }

    #[test]
    fn multiset_and_distinct_orbit_graphs_share_spectra() {
        // all n! labelled edges (normalization 2·n!) vs. distinct orbit elements
        let p = 5;
        let f = PrimeField::new(p).unwrap();
        let v = FpVector::new(vec![1, 1, 3], p);
        let els = v0_elements(3, p);
        let distinct = orbit(&v).unwrap();
        let labelled: Vec<FpVector> = (0..6)
            .map(|r| Permutation::unrank(3, r).act(&v).unwrap())
            .collect();
        let a = dense_spectrum(
            &cayley_adjacency(&els, &distinct).unwrap(),
            2 * distinct.len(),
        )
        .unwrap();
        let b = dense_spectrum(&cayley_adjacency(&els, &labelled).unwrap(), 12).unwrap();
        assert_close_sorted(&a.eigenvalues, &b.eigenvalues, 1e-10);
        let c = abelian_spectrum(&f, &v).unwrap();
        assert_close_sorted(&a.eigenvalues, &c.spectrum.eigenvalues, 1e-8);
    }

    #[test]
    fn disjoint_union_examples() {
        for (entries, p) in [(vec![1u64, 2], 3u64), (vec![1, 1, 0], 2), (vec![1, 4], 5)] {
            let f = PrimeField::new(p).unwrap();
            assert!(disjoint_union_check(&f, &FpVector::new(entries, p)).unwrap());
        }
        let f = PrimeField::new(3).unwrap();
        assert!(disjoint_union_check(&f, &FpVector::new(vec![1, 2, 0], 3)).unwrap());
        let f = PrimeField::new(11).unwrap();
        let v = FpVector::from_signed(&[1, -1, 0, 0, 0], 11);
        assert!(matches!(
            disjoint_union_check(&f, &v),
            Err(Error::TooLarge { .. })
        ));
    }
}
