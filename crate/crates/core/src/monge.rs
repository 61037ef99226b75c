//! Monge states from permutation tuples, the 1/ell-integrality test, the
//! Monge polytope, and Quasi-Monge decompositions of vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::exact::{rat, Rational};
use crate::measures::{MultiIndex, StateSpace};
use crate::polytopes::{extreme_flags, CoeffVector, VertexInfo, VertexSet};
use crate::{Budget, Error, Result};

/// N permutations of the states, the first fixed to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationTuple {
    maps: Vec<Vec<u32>>,
}

impl PermutationTuple {
    /// `maps[k][site]` is the 1-based image of `site + 1` under the k-th
    /// permutation; `maps[0]` must be the identity.
    pub fn new(maps: Vec<Vec<u32>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("need at least one map".into()));
        }
        let ell = maps[0].len();
        for (k, m) in maps.iter().enumerate() {
            if m.len() != ell || !is_permutation(m) {
                return Err(Error::InvalidInput(format!(
                    "map {k} is not a permutation of 1..={ell}"
                )));
            }
        }
        if !maps[0].iter().enumerate().all(|(i, &v)| v == i as u32 + 1) {
            return Err(Error::InvalidInput("first map must be the identity".into()));
        }
        Ok(PermutationTuple { maps })
    }

    pub fn maps(&self) -> &[Vec<u32>] {
        &self.maps
    }
}

fn is_permutation(m: &[u32]) -> bool {
    let ell = m.len();
    let mut seen = vec![false; ell];
    for &v in m {
        if v < 1 || v as usize > ell || seen[v as usize - 1] {
            return false;
        }
        seen[v as usize - 1] = true;
    }
    true
}

/// Coefficient vector of the symmetrized Monge state of a permutation
/// tuple: mass 1/ell on the sorted tuple of each site, collisions summed.
pub fn monge_coeff(t: &PermutationTuple, space: StateSpace) -> Result<CoeffVector> {
    let ell = space.ell();
    if t.maps[0].len() != ell {
        return Err(Error::InvalidInput("tuple is over a different state count".into()));
    }
    let n = t.maps.len();
    let mut coeffs: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    let share = rat(1, ell as i64);
    for site in 0..ell {
        let mut tuple: Vec<u32> = t.maps.iter().map(|m| m[site]).collect();
        tuple.sort_unstable();
        *coeffs.entry(MultiIndex::new(tuple)).or_insert_with(Rational::zero) += &share;
    }
    CoeffVector::new(n as u32, ell, coeffs)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, u128::saturating_mul)
}

fn tuple_count(n: u32, ell: usize) -> u128 {
    let f = factorial(ell);
    let mut c: u128 = 1;
    for _ in 1..n {
        c = c.saturating_mul(f);
    }
    c
}

fn all_permutations(ell: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (1..=ell as u32).collect();
    loop {
        out.push(current.clone());
        // next permutation in lexicographic order
        let Some(i) = (0..ell.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
        else {
            return out;
        };
        let j = (i + 1..ell).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
}

/// All distinct Monge states for `n` marginals, enumerated over the
/// `(ell!)^(n-1)` ordered tuples with the first permutation fixed to the
/// identity, deduplicated, in canonical dense-lexicographic order.
pub fn enumerate_monge(n: u32, space: StateSpace, budget: Budget) -> Result<Vec<CoeffVector>> {
    if n == 0 {
        return Err(Error::InvalidInput("marginal count must be >= 1".into()));
    }
    let ell = space.ell();
    if ell > 255 {
        return Err(Error::InvalidInput("more than 255 states unsupported".into()));
    }
    let candidates = tuple_count(n, ell);
    if candidates > budget.monge_tuples as u128 {
        return Err(Error::Budget {
            what: "permutation tuples",
            candidates,
            cap: budget.monge_tuples,
        });
    }
    let perms = all_permutations(ell);
    let free = n as usize - 1;

    // a state is the multiset of its ell sorted site tuples; the key is the
    // concatenation of those byte tuples, themselves sorted
    let shard_keys = |first: &[u32]| -> BTreeSet<Vec<u8>> {
        let mut keys = BTreeSet::new();
        let mut counters = vec![0usize; free.saturating_sub(1)];
        let mut scratch = vec![0u8; ell * n as usize];
        let mut chunk_order: Vec<usize> = Vec::with_capacity(ell);
        loop {
            for site in 0..ell {
                let chunk = &mut scratch[site * n as usize..(site + 1) * n as usize];
                chunk[0] = site as u8 + 1;
                if n >= 2 {
                    chunk[1] = first[site] as u8;
                }
                for (k, &c) in counters.iter().enumerate() {
                    chunk[k + 2] = perms[c][site] as u8;
                }
                chunk.sort_unstable();
            }
            chunk_order.clear();
            chunk_order.extend(0..ell);
            chunk_order.sort_by(|&a, &b| {
                scratch[a * n as usize..(a + 1) * n as usize]
                    .cmp(&scratch[b * n as usize..(b + 1) * n as usize])
            });
            let key: Vec<u8> = chunk_order
                .iter()
                .flat_map(|&c| scratch[c * n as usize..(c + 1) * n as usize].iter().copied())
                .collect();
            keys.insert(key);
            // advance the mixed-radix counter over the remaining maps
            let mut k = 0;
            loop {
                if k == counters.len() {
                    return keys;
                }
                counters[k] += 1;
                if counters[k] < perms.len() {
                    break;
                }
                counters[k] = 0;
                k += 1;
            }
        }
    };

    let keys: BTreeSet<Vec<u8>> = if free == 0 {
        let identity: Vec<u32> = (1..=ell as u32).collect();
        shard_keys(&identity)
    } else {
        perms
            .par_iter()
            .map(|first| shard_keys(first))
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    };

    let share = rat(1, ell as i64);
    let mut states: Vec<CoeffVector> = keys
        .into_iter()
        .map(|key| {
            let mut coeffs: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
            for chunk in key.chunks(n as usize) {
                let idx = MultiIndex::new(chunk.iter().map(|&b| b as u32).collect());
                *coeffs.entry(idx).or_insert_with(Rational::zero) += &share;
            }
            CoeffVector::new(n, ell, coeffs)
        })
        .collect::<Result<_>>()?;
    states.sort_by(CoeffVector::cmp_dense_lex);
    Ok(states)
}

/// Monge integrality: every coefficient is an integer multiple of 1/ell.
pub fn is_monge(alpha: &CoeffVector) -> bool {
    let ell = rat(alpha.ell() as i64, 1);
    alpha.coeffs().all(|(_, v)| (v * &ell).is_integer())
}

/// Extreme points of the convex hull of all Monge states.
pub fn monge_polytope_vertices(
    n: u32,
    space: StateSpace,
    budget: Budget,
) -> Result<VertexSet<CoeffVector>> {
    let states = enumerate_monge(n, space, budget)?;
    let order = crate::measures::canonical_multi_indices(n, space);
    let dense: Vec<Vec<Rational>> = states.iter().map(|s| s.to_dense(&order)).collect();
    let flags = extreme_flags(&dense)?;
    let points = states
        .into_iter()
        .zip(&flags)
        .filter(|(_, f)| **f)
        .map(|(point, _)| VertexInfo {
            point,
            is_monge: true,
            exposing_cost: None,
        })
        .collect();
    Ok(VertexSet { points })
}

/// Quasi-Monge data of a sparse coefficient vector: site weights and N maps
/// (not necessarily bijective) satisfying the pushforward marginal identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiMongeForm {
    /// ell site weights, nonnegative, summing to 1
    pub weights: Vec<Rational>,
    /// N maps; maps[k][site] is the 1-based state hit by site k-th factor
    pub maps: Vec<Vec<u32>>,
}

impl QuasiMongeForm {
    /// All site weights equal 1/ell, i.e. the state is of Monge type.
    pub fn has_uniform_weights(&self) -> bool {
        let ell = self.weights.len() as i64;
        self.weights.iter().all(|w| *w == rat(1, ell))
    }
}

/// Decomposes a vertex (at most ell support elements) into Quasi-Monge
/// form: the support multi-indices become the columns of the maps, short
/// supports are padded with a repeated column of weight zero. The marginal
/// identity (1/N) sum_k T_k # alpha = uniform is verified exactly.
pub fn to_quasi_monge(v: &CoeffVector) -> Result<QuasiMongeForm> {
    let ell = v.ell();
    let n = v.n() as usize;
    if v.support_size() > ell {
        return Err(Error::InvalidInput(format!(
            "not a vertex: {} nonzero coefficients exceed {ell}",
            v.support_size()
        )));
    }
    let mut weights: Vec<Rational> = Vec::with_capacity(ell);
    let mut columns: Vec<&MultiIndex> = Vec::with_capacity(ell);
    for (idx, w) in v.coeffs() {
        weights.push(w.clone());
        columns.push(idx);
    }
    let last = *columns.last().expect("coefficients sum to 1");
    while columns.len() < ell {
        weights.push(Rational::zero());
        columns.push(last);
    }
    let maps: Vec<Vec<u32>> = (0..n)
        .map(|k| columns.iter().map(|c| c.indices()[k]).collect())
        .collect();

    // (1/N) sum_k T_k # alpha must be the uniform marginal
    let mut pushed = vec![Rational::zero(); ell];
    for map in &maps {
        for (site, w) in map.iter().zip(&weights) {
            pushed[(*site - 1) as usize] += w;
        }
    }
    let expected = rat(n as i64, ell as i64);
    if pushed.iter().any(|p| *p != expected) {
        return Err(Error::InvalidInput(
            "coefficient vector does not satisfy the uniform-marginal constraint".into(),
        ));
    }
    Ok(QuasiMongeForm { weights, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_i64;
    use crate::polytopes::build_system;

    fn space(ell: usize) -> StateSpace {
        StateSpace::new(ell).unwrap()
    }

    fn tuple(maps: &[&[u32]]) -> PermutationTuple {
        PermutationTuple::new(maps.iter().map(|m| m.to_vec()).collect()).unwrap()
    }

    #[test]
    fn coeff_identity_pair() {
        let t = tuple(&[&[1, 2], &[1, 2]]);
        let alpha = monge_coeff(&t, space(2)).unwrap();
        assert_eq!(alpha.get(&MultiIndex::new(vec![1, 1])), rat(1, 2));
        assert_eq!(alpha.get(&MultiIndex::new(vec![2, 2])), rat(1, 2));
    }

    #[test]
    fn coeff_swap_collides() {
        let t = tuple(&[&[1, 2], &[2, 1]]);
        let alpha = monge_coeff(&t, space(2)).unwrap();
        assert_eq!(alpha.support_size(), 1);
        assert_eq!(alpha.get(&MultiIndex::new(vec![1, 2])), rat_i64(1));
    }

    #[test]
    fn coeff_three_cycle() {
        let t = tuple(&[&[1, 2, 3], &[2, 3, 1]]);
        let alpha = monge_coeff(&t, space(3)).unwrap();
        for idx in [[1, 2], [2, 3], [1, 3]] {
            assert_eq!(alpha.get(&MultiIndex::new(idx.to_vec())), rat(1, 3));
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_monge(2, space(2), Budget::default()).unwrap().len(), 2);
        assert_eq!(enumerate_monge(2, space(3), Budget::default()).unwrap().len(), 5);
        assert_eq!(enumerate_monge(2, space(4), Budget::default()).unwrap().len(), 17);
        assert_eq!(enumerate_monge(3, space(3), Budget::default()).unwrap().len(), 10);
    }

    #[test]
    fn enumerate_budget() {
        let err = enumerate_monge(4, space(3), Budget::uniform(100)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn states_are_feasible_and_monge() {
        for (n, ell) in [(2, 2), (2, 3), (3, 3), (4, 2), (3, 4)] {
            let sp = space(ell);
            let sys = build_system(n, sp, Budget::default()).unwrap();
            for state in enumerate_monge(n, sp, Budget::default()).unwrap() {
                assert!(is_monge(&state));
                let dense = state.to_dense(sys.indices());
                assert_eq!(sys.matrix().mul_vec(&dense), sys.rhs());
            }
        }
    }

    #[test]
    fn monge_coeff_round_trip_exhaustive() {
        // every tuple yields a Monge state (exhaustive for small spaces)
        for (n, ell) in [(2, 3), (3, 3), (4, 2), (6, 2)] {
            let sp = space(ell);
            let perms = all_permutations(ell);
            let mut stack = vec![vec![(1..=ell as u32).collect::<Vec<u32>>()]];
            while let Some(maps) = stack.pop() {
                if maps.len() == n {
                    let t = PermutationTuple::new(maps).unwrap();
                    assert!(is_monge(&monge_coeff(&t, sp).unwrap()));
                    continue;
                }
                for p in &perms {
                    let mut next = maps.clone();
                    next.push(p.clone());
                    stack.push(next);
                }
            }
        }
    }

    #[test]
    fn non_monge_vertex_detected() {
        // mass 1/2 on (1,1,2) and (2,3,3): coefficients are not multiples of 1/3
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::new(vec![1, 1, 2]), rat(1, 2));
        coeffs.insert(MultiIndex::new(vec![2, 3, 3]), rat(1, 2));
        let alpha = CoeffVector::new(3, 3, coeffs).unwrap();
        assert!(!is_monge(&alpha));
    }

    #[test]
    fn quasi_monge_of_monge_vertex() {
        let t = tuple(&[&[1, 2], &[1, 2]]);
        let alpha = monge_coeff(&t, space(2)).unwrap();
        let q = to_quasi_monge(&alpha).unwrap();
        assert_eq!(q.weights, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(q.maps, vec![vec![1, 2], vec![1, 2]]);
        assert!(q.has_uniform_weights());
    }

    #[test]
    fn quasi_monge_padding() {
        // all mass on (1,2): weights (1, 0), maps repeat the single column
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::new(vec![1, 2]), rat_i64(1));
        let alpha = CoeffVector::new(2, 2, coeffs).unwrap();
        let q = to_quasi_monge(&alpha).unwrap();
        assert_eq!(q.weights, vec![rat_i64(1), rat_i64(0)]);
        assert_eq!(q.maps, vec![vec![1, 1], vec![2, 2]]);
        assert!(!q.has_uniform_weights());
    }

    #[test]
    fn quasi_monge_rejects_infeasible() {
        // mass 1 on (1,1): pushforwards pile up on state 1
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::new(vec![1, 1]), rat_i64(1));
        let alpha = CoeffVector::new(2, 2, coeffs).unwrap();
        assert!(to_quasi_monge(&alpha).is_err());
    }

    #[test]
    fn monge_polytope_small() {
        // two distinct states on a segment: both extreme
        let vs = monge_polytope_vertices(2, space(2), Budget::default()).unwrap();
        assert_eq!(vs.len(), 2);
        // all five states for N=2, ell=3 are extreme
        let vs = monge_polytope_vertices(2, space(3), Budget::default()).unwrap();
        assert_eq!(vs.len(), 5);
    }
}
