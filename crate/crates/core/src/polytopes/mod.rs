//! The coefficient polytope: constraint-system assembly, vertex enumeration
//! by basis subsets, extremality and membership tests over finite point
//! sets, exposedness certificates, and exact 3-D hulls (see `hull3`).

mod filter;
mod hull3;

pub use filter::extreme_flags;
pub use hull3::{hull3, HullMesh};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::exact::{
    self, lp_feasible, rat, Feasibility, LpProblem, RatMatrix, Rational, SolveOutcome,
};
use crate::measures::{
    canonical_multi_indices, enumerate_quantized, MultiIndex, QuantizedMeasure,
    StateSpace,
};
use crate::{Budget, Error, Result};

/// Barycentric coordinates over the extremal symmetric measures: a sparse
/// map from sorted multi-indices to positive rational weights summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffVector {
    n: u32,
    ell: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

impl CoeffVector {
    pub fn new(n: u32, ell: usize, coeffs: BTreeMap<MultiIndex, Rational>) -> Result<Self> {
        let mut total = Rational::zero();
        for (idx, v) in &coeffs {
            if idx.len() != n as usize {
                return Err(Error::InvalidInput(format!(
                    "multi-index {idx} has length {} instead of {n}",
                    idx.len()
                )));
            }
            if idx.indices().iter().any(|&i| i as usize > ell) {
                return Err(Error::InvalidInput(format!(
                    "multi-index {idx} exceeds {ell} states"
                )));
            }
            if !v.is_positive() {
                return Err(Error::InvalidInput(
                    "sparse coefficients must be strictly positive".into(),
                ));
            }
            total += v;
        }
        if total != rat(1, 1) {
            return Err(Error::InvalidInput("coefficients must sum to 1".into()));
        }
        Ok(CoeffVector { n, ell, coeffs })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, idx: &MultiIndex) -> Rational {
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    /// Dense coordinates in the canonical (colex) column order.
    pub fn to_dense(&self, order: &[MultiIndex]) -> Vec<Rational> {
        let mut dense = vec![Rational::zero(); order.len()];
        let positions: BTreeMap<&MultiIndex, usize> =
            order.iter().enumerate().map(|(i, m)| (m, i)).collect();
        for (idx, v) in &self.coeffs {
            dense[positions[idx]] = v.clone();
        }
        dense
    }

    /// Dense-lexicographic comparison without materializing dense vectors.
    /// Sparse values are strictly positive, so at a position present in only
    /// one operand that operand is larger.
    pub fn cmp_dense_lex(&self, other: &Self) -> Ordering {
        let mut a = self.coeffs.iter().peekable();
        let mut b = other.coeffs.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ia, va)), Some((ib, vb))) => match ia.cmp(ib) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match va.cmp(vb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

/// The linear system `A alpha = uniform` whose columns are the quantized
/// measures in canonical order.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    n: u32,
    space: StateSpace,
    indices: Vec<MultiIndex>,
    columns: Vec<QuantizedMeasure>,
    matrix: RatMatrix,
    rhs: Vec<Rational>,
}

impl ConstraintSystem {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn columns(&self) -> &[QuantizedMeasure] {
        &self.columns
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }
}

/// Assembles the constraint system for `n` marginals on the given states.
pub fn build_system(n: u32, space: StateSpace, budget: Budget) -> Result<ConstraintSystem> {
    let columns = enumerate_quantized(n, space, budget)?;
    let indices = canonical_multi_indices(n, space);
    let ell = space.ell();
    let mut data = Vec::with_capacity(ell * columns.len());
    for row in 0..ell {
        for col in &columns {
            data.push(col.weights()[row].clone());
        }
    }
    let matrix = RatMatrix::new(ell, columns.len(), data);
    debug_assert_eq!(exact::rank(&matrix), ell);
    Ok(ConstraintSystem {
        n,
        space,
        indices,
        columns,
        matrix,
        rhs: space.uniform(),
    })
}

/// A polytope vertex with its classification flags.
#[derive(Clone, Debug)]
pub struct VertexInfo<P> {
    pub point: P,
    pub is_monge: bool,
    pub exposing_cost: Option<Vec<Rational>>,
}

/// Canonical, deduplicated, ordered vertex list.
#[derive(Clone, Debug)]
pub struct VertexSet<P> {
    pub points: Vec<VertexInfo<P>>,
}

impl<P> VertexSet<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexInfo<P>> {
        self.points.iter()
    }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

/// Sparse basic solution: strictly positive entries by column position.
type SparseVertex = Vec<(u32, Rational)>;

/// Per-row denominator-cleared integer copy of the constraint system, used
/// by the i128 fast path for basis solving.
struct IntSystem {
    rows: usize,
    entries: Vec<i128>, // rows x cols
    rhs: Vec<i128>,
    fits: bool,
}

fn integer_system(matrix: &RatMatrix, rhs: &[Rational]) -> IntSystem {
    let rows = matrix.rows();
    let cols = matrix.cols();
    let mut entries = vec![0i128; rows * cols];
    let mut irhs = vec![0i128; rows];
    let mut fits = true;
    'outer: for r in 0..rows {
        let mut lcm = BigInt::one();
        for v in matrix.row(r).iter().chain(std::iter::once(&rhs[r])) {
            lcm = lcm.lcm(v.denom());
        }
        for (c, v) in matrix.row(r).iter().enumerate() {
            let scaled = v.numer() * (&lcm / v.denom());
            match scaled.to_i128() {
                Some(x) if x.abs() < (1i128 << 96) => entries[r * cols + c] = x,
                _ => {
                    fits = false;
                    break 'outer;
                }
            }
        }
        let scaled = rhs[r].numer() * (&lcm / rhs[r].denom());
        match scaled.to_i128() {
            Some(x) if x.abs() < (1i128 << 96) => irhs[r] = x,
            _ => {
                fits = false;
                break 'outer;
            }
        }
    }
    IntSystem {
        rows,
        entries,
        rhs: irhs,
        fits,
    }
}

/// Enumerates the vertices of `{alpha : A alpha = rhs, alpha >= 0}` by
/// solving every rank-sized column-subset system, keeping the nonnegative
/// solutions and deduplicating. Output is sorted lexicographically by dense
/// coordinates.
pub fn enumerate_vertices(sys: &ConstraintSystem, budget: Budget) -> Result<VertexSet<CoeffVector>> {
    let sparse = enumerate_vertices_sparse(sys, budget)?;
    let points: Vec<CoeffVector> = sparse
        .into_iter()
        .map(|sv| sparse_to_coeff(sys, &sv))
        .collect::<Result<_>>()?;
    let mut infos: Vec<VertexInfo<CoeffVector>> = points
        .into_iter()
        .map(|p| {
            let is_monge = crate::monge::is_monge(&p);
            VertexInfo {
                point: p,
                is_monge,
                exposing_cost: None,
            }
        })
        .collect();
    infos.sort_by(|a, b| a.point.cmp_dense_lex(&b.point));
    Ok(VertexSet { points: infos })
}

fn sparse_to_coeff(sys: &ConstraintSystem, sv: &SparseVertex) -> Result<CoeffVector> {
    let mut coeffs = BTreeMap::new();
    for (pos, v) in sv {
        coeffs.insert(sys.indices[*pos as usize].clone(), v.clone());
    }
    CoeffVector::new(sys.n, sys.space.ell(), coeffs)
}

fn enumerate_vertices_sparse(sys: &ConstraintSystem, budget: Budget) -> Result<BTreeSet<SparseVertex>> {
    let matrix = &sys.matrix;
    let cols = matrix.cols();
    let rank = exact::rank(matrix);
    let row_sel = exact::independent_rows(matrix);
    debug_assert_eq!(row_sel.len(), rank);

    let candidates = binomial_u128(cols, rank);
    if candidates > budget.basis_candidates as u128 {
        return Err(Error::Budget {
            what: "basis candidates",
            candidates,
            cap: budget.basis_candidates,
        });
    }

    // independent-row subsystem, denominator-cleared for the i128 path
    let sub_rows: Vec<Vec<Rational>> = row_sel.iter().map(|&r| matrix.row(r).to_vec()).collect();
    let sub = RatMatrix::from_rows(&sub_rows);
    let sub_rhs: Vec<Rational> = row_sel.iter().map(|&r| sys.rhs[r].clone()).collect();
    let ints = integer_system(&sub, &sub_rhs);
    let full_check = rank < matrix.rows();

    let mut seen: BTreeSet<SparseVertex> = BTreeSet::new();
    let mut combo: Vec<usize> = (0..rank).collect();
    let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(CHUNK);
    let mut done = cols < rank || rank == 0;
    if rank == 0 {
        // only the origin is feasible, and only when rhs = 0
        if sys.rhs.iter().all(|v| v.is_zero()) {
            seen.insert(Vec::new());
        }
        return Ok(seen);
    }
    while !done {
        chunk.clear();
        while chunk.len() < CHUNK {
            chunk.push(combo.clone());
            if !advance_combination(&mut combo, cols) {
                done = true;
                break;
            }
        }
        let found: Vec<Option<SparseVertex>> = chunk
            .par_iter()
            .map(|sel| try_basis(sys, &sub, &sub_rhs, &ints, sel, full_check))
            .collect();
        for sv in found.into_iter().flatten() {
            seen.insert(sv);
        }
    }
    Ok(seen)
}

const CHUNK: usize = 1 << 16;

fn advance_combination(combo: &mut [usize], cols: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < cols - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn try_basis(
    sys: &ConstraintSystem,
    sub: &RatMatrix,
    sub_rhs: &[Rational],
    ints: &IntSystem,
    sel: &[usize],
    full_check: bool,
) -> Option<SparseVertex> {
    let rank = sel.len();
    let solution = if ints.fits {
        let cols = sys.matrix.cols();
        let mut m = vec![0i128; rank * rank];
        for r in 0..rank {
            for (c, &col) in sel.iter().enumerate() {
                m[r * rank + c] = ints.entries[r * cols + col];
            }
        }
        exact::solve_square_i128(&m, rank, &ints.rhs[..ints.rows])
    } else {
        None
    };
    let solution = match solution {
        Some(outcome) => outcome,
        None => {
            let m = sub.select_columns(sel);
            exact::solve_square(&m, sub_rhs)
        }
    };
    let x = match solution {
        SolveOutcome::Solution(x) => x,
        SolveOutcome::Singular => return None,
    };
    if x.iter().any(|v| v.is_negative()) {
        return None;
    }
    let mut sv: SparseVertex = sel
        .iter()
        .zip(&x)
        .filter(|(_, v)| !v.is_zero())
        .map(|(&c, v)| (c as u32, v.clone()))
        .collect();
    sv.sort_by_key(|(c, _)| *c);
    if full_check {
        // dependent rows were dropped while solving; verify them exactly
        let mut residual: Vec<Rational> = sys.rhs.to_vec();
        for (c, v) in &sv {
            for r in 0..sys.matrix.rows() {
                let t = sys.matrix.get(r, *c as usize) * v;
                residual[r] -= t;
            }
        }
        if residual.iter().any(|v| !v.is_zero()) {
            return None;
        }
    }
    Some(sv)
}

/// Builds the membership LP for `p in conv(others)`.
fn membership_problem(p: &[Rational], others: &[Vec<Rational>]) -> LpProblem {
    let d = p.len();
    let cols = others.len();
    let mut data = Vec::with_capacity((d + 1) * cols);
    for r in 0..d {
        for o in others {
            data.push(o[r].clone());
        }
    }
    data.extend(std::iter::repeat_n(Rational::one(), cols));
    let matrix = RatMatrix::new(d + 1, cols, data);
    let mut rhs: Vec<Rational> = p.to_vec();
    rhs.push(Rational::one());
    LpProblem::feasibility(matrix, rhs)
}

/// True iff `p` is not a convex combination of `others` (exact LP test).
pub fn is_extreme_among(p: &[Rational], others: &[Vec<Rational>]) -> Result<bool> {
    if others.is_empty() {
        return Ok(true);
    }
    let problem = membership_problem(p, others);
    match lp_feasible(&problem)? {
        Feasibility::Feasible { .. } => Ok(false),
        Feasibility::Infeasible { .. } => Ok(true),
    }
}

/// Convex-combination witness returned when a point is not extreme.
#[derive(Clone, Debug)]
pub struct ConvexWitness {
    /// indices into `others` with their weights; weights sum to 1
    pub combination: Vec<(usize, Rational)>,
}

/// A strictly separating linear functional `c` with `c.v < c.w` for every
/// `w` in `others`, read off the Farkas certificate of the infeasible
/// membership LP. Fails with a convex-combination witness when `v` is not
/// extreme.
pub fn exposing_cost(
    v: &[Rational],
    others: &[Vec<Rational>],
) -> Result<std::result::Result<Vec<Rational>, ConvexWitness>> {
    if others.is_empty() {
        return Ok(Ok(vec![Rational::zero(); v.len()]));
    }
    let problem = membership_problem(v, others);
    match lp_feasible(&problem)? {
        Feasibility::Feasible { point } => {
            let combination: Vec<(usize, Rational)> = point
                .iter()
                .enumerate()
                .filter(|(_, t)| !t.is_zero())
                .map(|(i, t)| (i, t.clone()))
                .collect();
            Ok(Err(ConvexWitness { combination }))
        }
        Feasibility::Infeasible { farkas } => {
            let d = v.len();
            let cost: Vec<Rational> = farkas[..d].iter().map(|y| -y).collect();
            // the Farkas inequalities guarantee strictness; verify exactly
            let at_v = dot(&cost, v);
            for w in others {
                if dot(&cost, w) <= at_v {
                    return Err(Error::Defect(
                        "separating functional failed exact strictness check".into(),
                    ));
                }
            }
            Ok(Ok(cost))
        }
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_i64;

    fn space(ell: usize) -> StateSpace {
        StateSpace::new(ell).unwrap()
    }

    fn dense_points(vs: &VertexSet<CoeffVector>, sys: &ConstraintSystem) -> Vec<Vec<Rational>> {
        vs.iter()
            .map(|v| v.point.to_dense(sys.indices()))
            .collect()
    }

    #[test]
    fn system_two_two() {
        let sys = build_system(2, space(2), Budget::default()).unwrap();
        let expect = RatMatrix::from_rows(&[
            vec![rat_i64(1), rat(1, 2), rat_i64(0)],
            vec![rat_i64(0), rat(1, 2), rat_i64(1)],
        ]);
        assert_eq!(sys.matrix(), &expect);
        assert_eq!(sys.rhs(), &[rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn system_three_three_rank() {
        let sys = build_system(3, space(3), Budget::default()).unwrap();
        assert_eq!(sys.matrix().rows(), 3);
        assert_eq!(sys.matrix().cols(), 10);
        assert_eq!(exact::rank(sys.matrix()), 3);
    }

    #[test]
    fn system_identity_for_one_marginal() {
        let sys = build_system(1, space(3), Budget::default()).unwrap();
        assert_eq!(sys.matrix(), &RatMatrix::identity(3));
    }

    #[test]
    fn vertices_two_two() {
        let sys = build_system(2, space(2), Budget::default()).unwrap();
        let vs = enumerate_vertices(&sys, Budget::default()).unwrap();
        let dense = dense_points(&vs, &sys);
        assert_eq!(
            dense,
            vec![
                vec![rat_i64(0), rat_i64(1), rat_i64(0)],
                vec![rat(1, 2), rat_i64(0), rat(1, 2)],
            ]
        );
    }

    #[test]
    fn vertices_three_three_count() {
        let sys = build_system(3, space(3), Budget::default()).unwrap();
        let vs = enumerate_vertices(&sys, Budget::default()).unwrap();
        assert_eq!(vs.len(), 22);
        // each vertex feasible with at most ell nonzeros
        for v in vs.iter() {
            assert!(v.point.support_size() <= 3);
            let dense = v.point.to_dense(sys.indices());
            assert_eq!(sys.matrix().mul_vec(&dense), sys.rhs());
        }
    }

    #[test]
    fn vertices_one_marginal() {
        let sys = build_system(1, space(4), Budget::default()).unwrap();
        let vs = enumerate_vertices(&sys, Budget::default()).unwrap();
        assert_eq!(vs.len(), 1);
        let dense = dense_points(&vs, &sys);
        assert_eq!(dense[0], vec![rat(1, 4); 4]);
    }

    #[test]
    fn vertices_budget_error() {
        let sys = build_system(3, space(3), Budget::default()).unwrap();
        let err = enumerate_vertices(&sys, Budget::uniform(10)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn extreme_among_examples() {
        let origin = vec![rat_i64(0), rat_i64(0)];
        let e1 = vec![rat_i64(1), rat_i64(0)];
        let e2 = vec![rat_i64(0), rat_i64(1)];
        assert!(is_extreme_among(&origin, &[e1.clone(), e2.clone()]).unwrap());
        let mid = vec![rat(1, 2), rat(1, 2)];
        assert!(!is_extreme_among(&mid, &[e1, e2]).unwrap());
    }

    #[test]
    fn exposing_cost_separates() {
        let v = vec![rat_i64(1), rat_i64(0)];
        let others = vec![vec![rat_i64(0), rat_i64(1)]];
        let cost = exposing_cost(&v, &others).unwrap().unwrap();
        assert!(dot(&cost, &v) < dot(&cost, &others[0]));
    }

    #[test]
    fn exposing_cost_rejects_interior() {
        let mid = vec![rat(1, 2), rat(1, 2)];
        let others = vec![
            vec![rat_i64(1), rat_i64(0)],
            vec![rat_i64(0), rat_i64(1)],
        ];
        let witness = exposing_cost(&mid, &others).unwrap().unwrap_err();
        let mut total = Rational::zero();
        let mut recon = vec![Rational::zero(); 2];
        for (i, w) in &witness.combination {
            total += w;
            for (r, val) in recon.iter_mut().zip(&others[*i]) {
                *r += w * val;
            }
        }
        assert_eq!(total, rat_i64(1));
        assert_eq!(recon, mid);
    }

    #[test]
    fn vertex_order_is_dense_lex() {
        let sys = build_system(3, space(3), Budget::default()).unwrap();
        let vs = enumerate_vertices(&sys, Budget::default()).unwrap();
        let dense = dense_points(&vs, &sys);
        for w in dense.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
