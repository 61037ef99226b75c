//! Measure-theoretic vocabulary on a finite state space: quantized one-point
//! measures, sorted multi-indices, symmetrization by sorting, and the
//! closed-form two-point marginal of extremal symmetric measures.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::exact::{rat, Rational};
use crate::polytopes::CoeffVector;
use crate::{Error, Result};

/// The finite state space; states are identified with 1..=ell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpace {
    ell: usize,
}

impl StateSpace {
    pub fn new(ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidInput("state count must be >= 1".into()));
        }
        Ok(StateSpace { ell })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// The uniform marginal (1/ell, ..., 1/ell).
    pub fn uniform(&self) -> Vec<Rational> {
        vec![rat(1, self.ell as i64); self.ell]
    }
}

/// Sorted multi-index 1 <= i_1 <= ... <= i_N <= ell, the canonical label of
/// an extremal symmetric measure. Ordered colexicographically, which fixes
/// the global column order of the constraint matrix and every coefficient
/// vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(sorted: Vec<u32>) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(sorted.iter().all(|&i| i >= 1));
        MultiIndex(sorted)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

/// An element of the 1/N-quantized probability measures: every weight is a
/// multiple of 1/N and the weights sum to one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuantizedMeasure {
    n: u32,
    weights: Vec<Rational>,
}

impl QuantizedMeasure {
    pub fn new(n: u32, weights: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("marginal count must be >= 1".into()));
        }
        let mut total = Rational::zero();
        for w in &weights {
            let scaled = w * rat(n as i64, 1);
            if w < &Rational::zero() || !scaled.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "weight {w} is not a nonnegative multiple of 1/{n}"
                )));
            }
            total += w;
        }
        if total != rat(1, 1) {
            return Err(Error::InvalidInput("weights must sum to 1".into()));
        }
        Ok(QuantizedMeasure { n, weights })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn dirac(n: u32, space: StateSpace, state: usize) -> Self {
        assert!((1..=space.ell()).contains(&state));
        let mut weights = vec![Rational::zero(); space.ell()];
        weights[state - 1] = rat(1, 1);
        QuantizedMeasure { n, weights }
    }
}

/// A symmetric two-point probability measure (an N-representable 2-plan).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoPlan {
    ell: usize,
    entries: Vec<Rational>,
}

impl TwoPlan {
    pub fn new(ell: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != ell * ell {
            return Err(Error::InvalidInput("two-plan entry count".into()));
        }
        let mut mass = Rational::zero();
        for i in 0..ell {
            for j in 0..ell {
                let v = &entries[i * ell + j];
                if v < &Rational::zero() {
                    return Err(Error::InvalidInput("two-plan entries must be >= 0".into()));
                }
                if entries[i * ell + j] != entries[j * ell + i] {
                    return Err(Error::InvalidInput("two-plan must be symmetric".into()));
                }
                mass += v;
            }
        }
        if mass != rat(1, 1) {
            return Err(Error::InvalidInput("two-plan mass must be 1".into()));
        }
        Ok(TwoPlan { ell, entries })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.ell + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Row sums, i.e. the one-point marginal.
    pub fn marginal(&self) -> Vec<Rational> {
        (0..self.ell)
            .map(|i| {
                (0..self.ell).fold(Rational::zero(), |acc, j| acc + self.get(i, j))
            })
            .collect()
    }

    /// Strict upper-triangle entries in row-major order; under the uniform
    /// marginal these coordinates determine the plan.
    pub fn off_diagonal(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.ell * (self.ell - 1) / 2);
        for i in 0..self.ell {
            for j in i + 1..self.ell {
                out.push(self.get(i, j).clone());
            }
        }
        out
    }
}

/// All sorted multi-indices of length `n` over the states, in colex order.
pub fn canonical_multi_indices(n: u32, space: StateSpace) -> Vec<MultiIndex> {
    let ell = space.ell() as u32;
    let mut out = Vec::new();
    let mut current = vec![1u32; n as usize];
    loop {
        out.push(MultiIndex::new(current.clone()));
        // next nondecreasing tuple in lex order
        let mut k = n as usize;
        loop {
            if k == 0 {
                out.sort(); // colex is the MultiIndex Ord
                return out;
            }
            k -= 1;
            if current[k] < ell {
                let v = current[k] + 1;
                for item in current.iter_mut().skip(k) {
                    *item = v;
                }
                break;
            }
        }
    }
}

/// Number of quantized measures / extremal symmetric measures, C(n+ell-1, n).
pub fn quantized_count(n: u32, ell: usize) -> u128 {
    let mut c: u128 = 1;
    let n = n as u128;
    let k = (ell - 1) as u128;
    for i in 0..k {
        c = c.saturating_mul(n + i + 1) / (i + 1);
    }
    c
}

/// All 1/N-quantized measures in canonical (colex multi-index) order. This
/// order is the column order of the constraint matrix and fixes coefficient
/// indexing everywhere.
pub fn enumerate_quantized(
    n: u32,
    space: StateSpace,
    budget: crate::Budget,
) -> Result<Vec<QuantizedMeasure>> {
    if n == 0 {
        return Err(Error::InvalidInput("marginal count must be >= 1".into()));
    }
    let count = quantized_count(n, space.ell());
    if count > budget.basis_candidates as u128 {
        return Err(Error::Budget {
            what: "quantized measures",
            candidates: count,
            cap: budget.basis_candidates,
        });
    }
    Ok(canonical_multi_indices(n, space)
        .into_iter()
        .map(|m| empirical(&m, space))
        .collect())
}

/// The unique sorted multi-index whose empirical measure is `lambda`
/// (N * lambda_i copies of state i).
pub fn psi(lambda: &QuantizedMeasure) -> MultiIndex {
    let n = lambda.n();
    let mut indices = Vec::with_capacity(n as usize);
    for (i, w) in lambda.weights().iter().enumerate() {
        let copies = (w * rat(n as i64, 1)).to_integer();
        let copies: u32 = copies.try_into().expect("weight multiple of 1/N");
        indices.extend(std::iter::repeat_n(i as u32 + 1, copies as usize));
    }
    debug_assert_eq!(indices.len(), n as usize);
    MultiIndex::new(indices)
}

/// Inverse of `psi`: the empirical measure of a multi-index.
pub fn empirical(idx: &MultiIndex, space: StateSpace) -> QuantizedMeasure {
    let n = idx.len() as u32;
    let mut weights = vec![Rational::zero(); space.ell()];
    for &i in idx.indices() {
        weights[(i - 1) as usize] += rat(1, n as i64);
    }
    QuantizedMeasure { n, weights }
}

/// Sorts a tuple of states: the symmetrization operator collapses the whole
/// permutation orbit of a Dirac tensor onto its sorted representative.
pub fn canonicalize_tuple(t: &[u32], space: StateSpace) -> Result<MultiIndex> {
    if t.iter().any(|&i| i < 1 || i as usize > space.ell()) {
        return Err(Error::InvalidInput(format!(
            "tuple entries must lie in 1..={}",
            space.ell()
        )));
    }
    let mut v = t.to_vec();
    v.sort_unstable();
    Ok(MultiIndex::new(v))
}

/// Two-point marginal of the extremal symmetric measure labeled by `lambda`:
/// N/(N-1) * lambda (x) lambda - 1/(N-1) * diag(lambda).
pub fn m2_of_extremal(lambda: &QuantizedMeasure) -> Result<TwoPlan> {
    let n = lambda.n();
    if n < 2 {
        return Err(Error::InvalidInput(
            "two-point marginal needs at least 2 marginals".into(),
        ));
    }
    let ell = lambda.ell();
    let outer = rat(n as i64, n as i64 - 1);
    let diag = rat(1, n as i64 - 1);
    let w = lambda.weights();
    let mut entries = Vec::with_capacity(ell * ell);
    for i in 0..ell {
        for j in 0..ell {
            let mut v = &outer * &w[i] * &w[j];
            if i == j {
                v -= &diag * &w[i];
            }
            entries.push(v);
        }
    }
    TwoPlan::new(ell, entries)
}

/// Two-point marginal of the coupling represented by a coefficient vector:
/// the convex combination of the extremal two-point marginals.
pub fn reduce_coeff(alpha: &CoeffVector) -> Result<TwoPlan> {
    let space = StateSpace::new(alpha.ell())?;
    let ell = space.ell();
    let mut entries = vec![Rational::zero(); ell * ell];
    for (idx, weight) in alpha.coeffs() {
        let lambda = empirical(idx, space);
        let m2 = m2_of_extremal(&lambda)?;
        for (e, v) in entries.iter_mut().zip(m2.entries()) {
            *e += weight * v;
        }
    }
    TwoPlan::new(ell, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_i64;
    use crate::Budget;

    fn space(ell: usize) -> StateSpace {
        StateSpace::new(ell).unwrap()
    }

    fn qm(n: u32, weights: &[(i64, i64)]) -> QuantizedMeasure {
        QuantizedMeasure::new(n, weights.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn quantized_two_states() {
        let q = enumerate_quantized(2, space(2), Budget::default()).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(q[0].weights(), &[rat_i64(1), rat_i64(0)]);
        assert_eq!(q[1].weights(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(q[2].weights(), &[rat_i64(0), rat_i64(1)]);
    }

    #[test]
    fn quantized_count_three_three() {
        let q = enumerate_quantized(3, space(3), Budget::default()).unwrap();
        assert_eq!(q.len(), 10);
    }

    #[test]
    fn quantized_diracs_for_n_one() {
        let q = enumerate_quantized(1, space(4), Budget::default()).unwrap();
        assert_eq!(q.len(), 4);
        for (i, m) in q.iter().enumerate() {
            assert_eq!(m, &QuantizedMeasure::dirac(1, space(4), i + 1));
        }
    }

    #[test]
    fn quantized_budget_error() {
        let err = enumerate_quantized(3, space(3), Budget::uniform(5)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(
            psi(&QuantizedMeasure::dirac(3, space(2), 1)).indices(),
            &[1, 1, 1]
        );
        assert_eq!(
            psi(&qm(3, &[(1, 3), (1, 3), (1, 3)])).indices(),
            &[1, 2, 3]
        );
        assert_eq!(psi(&qm(3, &[(2, 3), (1, 3)])).indices(), &[1, 1, 2]);
    }

    #[test]
    fn empirical_examples() {
        let m = MultiIndex::new(vec![1, 1, 2]);
        assert_eq!(
            empirical(&m, space(2)).weights(),
            &[rat(2, 3), rat(1, 3)]
        );
        let m = MultiIndex::new(vec![1, 2, 3]);
        assert_eq!(
            empirical(&m, space(3)).weights(),
            &[rat(1, 3), rat(1, 3), rat(1, 3)]
        );
        let m = MultiIndex::new(vec![2, 2, 2, 2]);
        assert_eq!(
            empirical(&m, space(3)).weights(),
            &[rat_i64(0), rat_i64(1), rat_i64(0)]
        );
    }

    #[test]
    fn psi_empirical_inverse_exhaustive() {
        for ell in 1..=4 {
            for n in 1..=10u32 {
                let sp = space(ell);
                for (k, lambda) in enumerate_quantized(n, sp, Budget::default())
                    .unwrap()
                    .iter()
                    .enumerate()
                {
                    let idx = psi(lambda);
                    assert_eq!(&empirical(&idx, sp), lambda);
                    // canonical order round trip
                    let order = canonical_multi_indices(n, sp);
                    assert_eq!(order[k], idx);
                }
            }
        }
    }

    #[test]
    fn canonicalize_examples() {
        let sp = space(3);
        assert_eq!(
            canonicalize_tuple(&[3, 1, 2], sp).unwrap().indices(),
            &[1, 2, 3]
        );
        assert_eq!(
            canonicalize_tuple(&[2, 2, 1], sp).unwrap().indices(),
            &[1, 2, 2]
        );
        assert_eq!(
            canonicalize_tuple(&[1, 1, 1], sp).unwrap().indices(),
            &[1, 1, 1]
        );
        assert!(canonicalize_tuple(&[0, 1], sp).is_err());
        assert!(canonicalize_tuple(&[4, 1], sp).is_err());
    }

    #[test]
    fn m2_dirac_concentrates() {
        for n in 2..=5 {
            let m2 = m2_of_extremal(&QuantizedMeasure::dirac(n, space(2), 1)).unwrap();
            assert_eq!(m2.get(0, 0), &rat_i64(1));
            assert_eq!(m2.get(0, 1), &rat_i64(0));
            assert_eq!(m2.get(1, 1), &rat_i64(0));
        }
    }

    #[test]
    fn m2_half_half() {
        let m2 = m2_of_extremal(&qm(2, &[(1, 2), (1, 2)])).unwrap();
        assert_eq!(m2.get(0, 0), &rat_i64(0));
        assert_eq!(m2.get(0, 1), &rat(1, 2));
        assert_eq!(m2.get(1, 0), &rat(1, 2));
        assert_eq!(m2.get(1, 1), &rat_i64(0));
    }

    #[test]
    fn m2_uniform_three() {
        // N=3 uniform over 3 states: zero diagonal, 1/6 off-diagonal
        let m2 = m2_of_extremal(&qm(3, &[(1, 3), (1, 3), (1, 3)])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { rat_i64(0) } else { rat(1, 6) };
                assert_eq!(m2.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn m2_rejects_single_marginal() {
        assert!(m2_of_extremal(&QuantizedMeasure::dirac(1, space(2), 1)).is_err());
    }

    #[test]
    fn m2_marginal_consistency() {
        for ell in 1..=4 {
            for n in 2..=8u32 {
                let sp = space(ell);
                for lambda in enumerate_quantized(n, sp, Budget::default()).unwrap() {
                    let m2 = m2_of_extremal(&lambda).unwrap();
                    assert_eq!(m2.marginal(), lambda.weights());
                }
            }
        }
    }

    #[test]
    fn m2_images_pairwise_distinct() {
        for ell in 2..=4 {
            for n in 2..=6u32 {
                let sp = space(ell);
                let images: Vec<TwoPlan> = enumerate_quantized(n, sp, Budget::default())
                    .unwrap()
                    .iter()
                    .map(|l| m2_of_extremal(l).unwrap())
                    .collect();
                for (i, a) in images.iter().enumerate() {
                    for b in images.iter().skip(i + 1) {
                        assert_ne!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn colex_order_is_paper_order_for_two_states() {
        // for 2 states the canonical order sorts the first weight decreasing
        let q = enumerate_quantized(5, space(2), Budget::default()).unwrap();
        for w in q.windows(2) {
            assert!(w[0].weights()[0] > w[1].weights()[0]);
        }
    }
}
