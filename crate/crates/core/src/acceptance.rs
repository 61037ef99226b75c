//! The verification suite behind the `verify` command and the acceptance
//! integration tests: every text-anchored count, closed form, optimizer,
//! volume and containment claim, checked exactly, with wall-clock limits.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::exact::{lp_solve, rat, rat_i64, LpOutcome, LpProblem, LpSense, RatMatrix, Rational};
use crate::measures::{MultiIndex, StateSpace, TwoPlan};
use crate::monge;
use crate::polytopes::{
    build_system, enumerate_vertices, exposing_cost, is_extreme_among, CoeffVector,
    ConstraintSystem,
};
use crate::report::{figure_data_csv, FigureKind};
use crate::transport::{
    diamond_mesh, limit_points, nbody_cost_value, prominent_vertices, reduced_vertices,
    relabel_plan, solve_reduced, theorem42_oracle, volume_report, PairCost, ReducedVertexSet,
};
use crate::{Budget, Error, Result};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} — {} [{:.2}s / {:.0}s] {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.limit_seconds,
            self.detail
        )
    }
}

const CRITERIA: [(u32, &str, f64); 9] = [
    (1, "Kantorovich vertex count, N=3, L=3", 1.0),
    (2, "reduced polytope vertex classification, N=3, L=3", 5.0),
    (3, "Birkhoff regime for two marginals", 5.0),
    (4, "two-state closed forms", 5.0),
    (5, "prominent reduced vertices on three states", 60.0),
    (6, "transport optimizers and the model-problem oracle", 60.0),
    (7, "geometry suite on three states", 600.0),
    (8, "identity, oracle and exposedness suite", 300.0),
    (9, "figure-data determinism across thread counts", 600.0),
];

/// Runs all criteria in order, sharing intermediate vertex sets.
pub fn run_all(budget: Budget) -> Vec<CriterionResult> {
    let mut suite = Suite::new(budget);
    CRITERIA
        .iter()
        .map(|&(id, name, limit)| {
            let start = Instant::now();
            let outcome = suite.run(id);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match outcome {
                Ok(detail) => (seconds <= limit, detail),
                Err(e) => (false, format!("error: {e}")),
            };
            let detail = if seconds > limit {
                format!("{detail} (exceeded the {limit:.0}s limit)")
            } else {
                detail
            };
            CriterionResult {
                id,
                name,
                passed,
                detail,
                seconds,
                limit_seconds: limit,
            }
        })
        .collect()
}

struct Suite {
    budget: Budget,
    reduced: BTreeMap<(u32, usize), ReducedVertexSet>,
}

impl Suite {
    fn new(budget: Budget) -> Self {
        Suite {
            budget,
            reduced: BTreeMap::new(),
        }
    }

    fn reduced(&mut self, n: u32, ell: usize) -> Result<&ReducedVertexSet> {
        if !self.reduced.contains_key(&(n, ell)) {
            let rv = reduced_vertices(n, StateSpace::new(ell)?, self.budget)?;
            self.reduced.insert((n, ell), rv);
        }
        Ok(&self.reduced[&(n, ell)])
    }

    fn run(&mut self, id: u32) -> Result<String> {
        match id {
            1 => self.criterion_1(),
            2 => self.criterion_2(),
            3 => self.criterion_3(),
            4 => self.criterion_4(),
            5 => self.criterion_5(),
            6 => self.criterion_6(),
            7 => self.criterion_7(),
            8 => self.criterion_8(),
            9 => self.criterion_9(),
            _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
        }
    }

    fn criterion_1(&mut self) -> Result<String> {
        let space = StateSpace::new(3)?;
        let sys = build_system(3, space, self.budget)?;
        let vs = enumerate_vertices(&sys, self.budget)?;
        expect(vs.len() == 22, || {
            format!("expected 22 vertices, found {}", vs.len())
        })?;
        Ok("22 vertices".into())
    }

    fn criterion_2(&mut self) -> Result<String> {
        let rv = self.reduced(3, 3)?;
        expect(rv.len() == 8, || format!("expected 8 vertices, found {}", rv.len()))?;
        let monge_count = rv.vertices.iter().filter(|v| v.is_monge).count();
        expect(monge_count == 5, || {
            format!("expected 5 Monge-type vertices, found {monge_count}")
        })?;
        let non_monge: BTreeSet<TwoPlan> = rv
            .vertices
            .iter()
            .filter(|v| !v.is_monge)
            .map(|v| v.plan.clone())
            .collect();
        let base = {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(MultiIndex::new(vec![1, 1, 2]), rat(1, 2));
            coeffs.insert(MultiIndex::new(vec![2, 3, 3]), rat(1, 2));
            let alpha = CoeffVector::new(3, 3, coeffs)?;
            crate::measures::reduce_coeff(&alpha)?
        };
        let expected: BTreeSet<TwoPlan> = [
            base.clone(),
            relabel_plan(&base, &[1, 0, 2])?,
            relabel_plan(&base, &[0, 2, 1])?,
        ]
        .into_iter()
        .collect();
        expect(non_monge == expected, || {
            "non-Monge vertices differ from the expected matrix and its relabelings".into()
        })?;
        expect(rv.monge_flag_mismatches.is_empty(), || {
            "preimage heuristic disagreed with the exact Monge test".into()
        })?;
        Ok("8 vertices, 5 Monge-type, non-Monge triple matches".into())
    }

    fn criterion_3(&mut self) -> Result<String> {
        let mut non_vertex_state_found = Vec::new();
        for ell in [2usize, 3, 4] {
            let space = StateSpace::new(ell)?;
            let sys = build_system(2, space, self.budget)?;
            let vs = enumerate_vertices(&sys, self.budget)?;
            expect(vs.iter().all(|v| v.is_monge), || {
                format!("a Kantorovich vertex for N=2, L={ell} is not Monge-type")
            })?;
            let vertex_set: BTreeSet<Vec<Rational>> = vs
                .iter()
                .map(|v| v.point.to_dense(sys.indices()))
                .collect();
            let states = monge::enumerate_monge(2, space, self.budget)?;
            let missing = states
                .iter()
                .any(|s| !vertex_set.contains(&s.to_dense(sys.indices())));
            if ell >= 3 && missing {
                non_vertex_state_found.push(ell);
            }
        }
        expect(!non_vertex_state_found.is_empty(), || {
            "every Monge state was a vertex for L in {3, 4}".into()
        })?;
        Ok(format!(
            "all N=2 vertices Monge-type; non-vertex Monge state at L={:?}",
            non_vertex_state_found
        ))
    }

    fn criterion_4(&mut self) -> Result<String> {
        let space = StateSpace::new(2)?;
        for n in 2..=10u32 {
            let rv = reduced_vertices(n, space, self.budget)?;
            expect(rv.len() == 2, || {
                format!("reduced polytope for N={n}, L=2 has {} vertices", rv.len())
            })?;
            expect(rv.vertices.iter().all(|v| v.is_monge), || {
                format!("a reduced vertex for N={n}, L=2 is not Monge-type")
            })?;
            let nn = n as i64;
            let mu1 = TwoPlan::new(
                2,
                vec![rat(1, 2), Rational::zero(), Rational::zero(), rat(1, 2)],
            )?;
            let (diag, off) = if n % 2 == 0 {
                (rat(nn - 2, 4 * (nn - 1)), rat(nn, 4 * (nn - 1)))
            } else {
                (rat(nn - 1, 4 * nn), rat(nn + 1, 4 * nn))
            };
            let mu2 = TwoPlan::new(2, vec![diag.clone(), off.clone(), off, diag])?;
            let got: BTreeSet<TwoPlan> = rv.plans().cloned().collect();
            let want: BTreeSet<TwoPlan> = [mu1, mu2].into_iter().collect();
            expect(got == want, || {
                format!("reduced vertices for N={n}, L=2 differ from the closed form")
            })?;

            // Monge-type Kantorovich vertices: count and coefficient form
            let sys = build_system(n, space, self.budget)?;
            let vs = enumerate_vertices(&sys, self.budget)?;
            let monge_vertices: Vec<&CoeffVector> = vs
                .iter()
                .filter(|v| v.is_monge)
                .map(|v| &v.point)
                .collect();
            let expected_count = (n as usize + 1).div_ceil(2);
            expect(monge_vertices.len() == expected_count, || {
                format!(
                    "N={n}, L=2: {} Monge-type vertices, expected {expected_count}",
                    monge_vertices.len()
                )
            })?;
            let cols = sys.indices().len();
            debug_assert_eq!(cols, n as usize + 1);
            let want: BTreeSet<Vec<Rational>> = (1..=expected_count)
                .map(|j| {
                    let mut dense = vec![Rational::zero(); cols];
                    dense[j - 1] += rat(1, 2);
                    dense[n as usize + 2 - j - 1] += rat(1, 2);
                    dense
                })
                .collect();
            let got: BTreeSet<Vec<Rational>> = monge_vertices
                .iter()
                .map(|v| v.to_dense(sys.indices()))
                .collect();
            expect(got == want, || {
                format!("N={n}, L=2: Monge-type vertices differ from the half-sum form")
            })?;
        }
        Ok("closed forms hold for N=2..10".into())
    }

    fn criterion_5(&mut self) -> Result<String> {
        for n in 2..=10u32 {
            let rv = self.reduced(n, 3)?;
            let plans: BTreeSet<&TwoPlan> = rv.plans().collect();
            let p = prominent_vertices(n)?;
            for (name, plan) in [
                ("EA", &p.ea),
                ("ER", &p.er),
                ("E12", &p.e12),
                ("E13", &p.e13),
                ("E23", &p.e23),
            ] {
                expect(plans.contains(plan), || {
                    format!("{name} is not a reduced vertex for N={n}")
                })?;
            }
        }
        Ok("EA, ER, E12, E13, E23 are vertices for N=2..10".into())
    }

    fn criterion_6(&mut self) -> Result<String> {
        let space = StateSpace::new(3)?;
        let budget = self.budget;
        for n in 2..=10u32 {
            let prominent = prominent_vertices(n)?;
            let report = solve_reduced(n, space, &PairCost::discrete(3), budget)?;
            expect(report.unique, || format!("discrete metric, N={n}: not unique"))?;
            expect(report.minimizers == vec![prominent.ea.clone()], || {
                format!("discrete metric, N={n}: minimizer is not the diagonal plan")
            })?;
            expect(report.optimal_value.is_zero(), || {
                format!("discrete metric, N={n}: nonzero optimum")
            })?;
            self.cross_check_lp(n, space, &PairCost::discrete(3), &report.full_value)?;

            for b in [rat(3, 2), rat_i64(2), rat_i64(10)] {
                let cost = PairCost::repulsive(3, b.clone())?;
                let report = solve_reduced(n, space, &cost, budget)?;
                expect(report.unique, || {
                    format!("repulsive B={b}, N={n}: not unique")
                })?;
                expect(report.minimizers == vec![prominent.er.clone()], || {
                    format!("repulsive B={b}, N={n}: minimizer differs from the closed form")
                })?;
                if b == rat_i64(2) {
                    self.cross_check_lp(n, space, &cost, &report.full_value)?;
                }
            }
        }
        for n in 2..=30u32 {
            theorem42_oracle(n)?;
        }
        Ok("unique optimizers for N=2..10, oracle agrees for N=2..30".into())
    }

    /// Independent route: solve the full coefficient-space LP with the exact
    /// simplex and compare the optimal N-body value.
    fn cross_check_lp(
        &mut self,
        n: u32,
        space: StateSpace,
        cost: &PairCost,
        expected_full_value: &Rational,
    ) -> Result<()> {
        let sys = build_system(n, space, self.budget)?;
        let objective: Vec<Rational> = sys
            .indices()
            .iter()
            .map(|idx| {
                let states = idx.indices();
                let mut c = Rational::zero();
                for j in 0..states.len() {
                    for k in j + 1..states.len() {
                        c += cost.get((states[j] - 1) as usize, (states[k] - 1) as usize);
                    }
                }
                c
            })
            .collect();
        let problem = LpProblem::new(objective, sys.matrix().clone(), sys.rhs().to_vec());
        match lp_solve(&problem, LpSense::Min)? {
            LpOutcome::Optimal(opt) => expect(&opt.value == expected_full_value, || {
                format!(
                    "simplex optimum {} differs from vertex-evaluation optimum {} (N={n})",
                    opt.value, expected_full_value
                )
            }),
            _ => Err(Error::Defect("coefficient LP was not optimal".into())),
        }
    }

    fn criterion_7(&mut self) -> Result<String> {
        let mut ratios = BTreeMap::new();
        for n in 2..=10u32 {
            let report = volume_report(n, self.budget)?;
            expect(report.vol_monge <= report.vol_kantorovich, || {
                format!("Monge volume exceeds Kantorovich volume at N={n}")
            })?;
            ratios.insert(n, report.ratio);
        }
        expect(ratios[&2] == rat_i64(1), || {
            format!("ratio at N=2 is {}, expected 1", ratios[&2])
        })?;
        for n in 3..=10u32 {
            expect(ratios[&n] > rat(9, 10), || {
                format!("ratio at N={n} is {} <= 9/10", ratios[&n])
            })?;
        }
        for n in (4..=10u32).step_by(2) {
            expect(ratios[&n] > ratios[&(n - 1)], || {
                format!("ratio at even N={n} does not exceed N={}", n - 1)
            })?;
            if n + 1 <= 10 {
                expect(ratios[&n] > ratios[&(n + 1)], || {
                    format!("ratio at even N={n} does not exceed N={}", n + 1)
                })?;
            }
        }

        // nesting: each vertex for N+1 marginals lies in the hull for N
        for n in 2..=9u32 {
            let outer: Vec<Vec<Rational>> = self
                .reduced(n, 3)?
                .plans()
                .map(|p| p.off_diagonal())
                .collect();
            let inner: Vec<Vec<Rational>> = self
                .reduced(n + 1, 3)?
                .plans()
                .map(|p| p.off_diagonal())
                .collect();
            for (k, point) in inner.iter().enumerate() {
                expect(!is_extreme_among(point, &outer)?, || {
                    format!("vertex {k} for N={} escapes the hull for N={n}", n + 1)
                })?;
            }
        }

        // the diamond: exact volume and containment in every polytope
        let diamond = diamond_mesh()?;
        expect(diamond.volume == rat(1, 648), || {
            format!("diamond volume is {}, expected 1/648", diamond.volume)
        })?;
        let limits = limit_points();
        for n in 2..=10u32 {
            let hull: Vec<Vec<Rational>> = self
                .reduced(n, 3)?
                .plans()
                .map(|p| p.off_diagonal())
                .collect();
            for (name, plan) in limits.named() {
                expect(!is_extreme_among(&plan.off_diagonal(), &hull)?, || {
                    format!("{name} lies outside the reduced polytope for N={n}")
                })?;
            }
        }
        let shown: Vec<String> = ratios
            .iter()
            .map(|(n, r)| format!("N={n}: {r}"))
            .collect();
        Ok(format!("volumes, nesting and diamond hold; ratios {}", shown.join(", ")))
    }

    fn criterion_8(&mut self) -> Result<String> {
        // the pairwise-cost reduction identity on random data
        let mut rng = ChaCha20Rng::seed_from_u64(0x616c7068);
        for trial in 0..100 {
            let n = rng.random_range(2..=6u32);
            let ell = rng.random_range(2..=4usize);
            let space = StateSpace::new(ell)?;
            let order = crate::measures::canonical_multi_indices(n, space);
            let support = rng.random_range(1..=order.len().min(5));
            let mut picks = BTreeSet::new();
            while picks.len() < support {
                picks.insert(rng.random_range(0..order.len()));
            }
            let raw: Vec<Rational> = (0..support)
                .map(|_| rat(rng.random_range(1..=9), rng.random_range(1..=9)))
                .collect();
            let total: Rational = raw.iter().sum();
            let mut coeffs = BTreeMap::new();
            for (pos, w) in picks.iter().zip(&raw) {
                let old = coeffs
                    .insert(order[*pos].clone(), w / &total)
                    .is_some();
                debug_assert!(!old);
            }
            let alpha = CoeffVector::new(n, ell, coeffs)?;
            let mut v = vec![Rational::zero(); ell * ell];
            for i in 0..ell {
                for j in i..ell {
                    let val = rat(rng.random_range(-9..=9), rng.random_range(1..=9));
                    v[i * ell + j] = val.clone();
                    v[j * ell + i] = val;
                }
            }
            let cost = PairCost::from_matrix(ell, v)?;
            let lhs = nbody_cost_value(&cost, &alpha);
            let pair = cost.pair_value(&crate::measures::reduce_coeff(&alpha)?);
            let rhs = rat_i64(n as i64 * (n as i64 - 1) / 2) * pair;
            expect(lhs == rhs, || {
                format!("reduction identity failed on trial {trial} (N={n}, L={ell})")
            })?;
        }

        // vertex enumeration against the all-subset brute-force oracle
        for (n, ell) in [(2u32, 2usize), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let space = StateSpace::new(ell)?;
            let sys = build_system(n, space, self.budget)?;
            let vs = enumerate_vertices(&sys, self.budget)?;
            let got: BTreeSet<Vec<Rational>> = vs
                .iter()
                .map(|v| v.point.to_dense(sys.indices()))
                .collect();
            let want = oracle_vertices(&sys);
            expect(got == want, || {
                format!("vertex enumeration disagrees with the oracle at N={n}, L={ell}")
            })?;
        }

        // exposedness certificates for every vertex set this suite computes
        let mut certified = 0usize;
        for (n, ell) in [(2u32, 2usize), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let space = StateSpace::new(ell)?;
            let sys = build_system(n, space, self.budget)?;
            let vs = enumerate_vertices(&sys, self.budget)?;
            let dense: Vec<Vec<Rational>> =
                vs.iter().map(|v| v.point.to_dense(sys.indices())).collect();
            certified += certify_all(&dense)?;
        }
        for (n, ell) in [(3u32, 3usize), (2, 4)] {
            let space = StateSpace::new(ell)?;
            let order = crate::measures::canonical_multi_indices(n, space);
            let vs = monge::monge_polytope_vertices(n, space, self.budget)?;
            let dense: Vec<Vec<Rational>> =
                vs.iter().map(|v| v.point.to_dense(&order)).collect();
            certified += certify_all(&dense)?;
        }
        for ell in [2usize, 3] {
            for n in 2..=10u32 {
                let coords: Vec<Vec<Rational>> = self
                    .reduced(n, ell)?
                    .plans()
                    .map(|p| p.off_diagonal())
                    .collect();
                certified += certify_all(&coords)?;
            }
        }
        Ok(format!(
            "identity on 100 samples, oracle on 5 instances, {certified} exposedness certificates"
        ))
    }

    fn criterion_9(&mut self) -> Result<String> {
        let mut outputs: Vec<(usize, String)> = Vec::new();
        for threads in [1usize, 4, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Defect(format!("thread pool: {e}")))?;
            let budget = self.budget;
            let csv = pool.install(|| -> Result<String> {
                let mut combined =
                    figure_data_csv((2, 6), (2, 4), FigureKind::Reduced, budget)?;
                combined.push_str(&figure_data_csv(
                    (2, 6),
                    (2, 4),
                    FigureKind::Kantorovich,
                    budget,
                )?);
                Ok(combined)
            })?;
            outputs.push((threads, csv));
        }
        let (_, reference) = &outputs[0];
        for (threads, csv) in &outputs[1..] {
            expect(csv == reference, || {
                format!("CSV with {threads} threads differs from the single-thread run")
            })?;
        }
        Ok(format!(
            "byte-identical grid CSV ({} bytes) across 1, 4 and 8 threads",
            reference.len()
        ))
    }
}

fn expect<F: FnOnce() -> String>(ok: bool, msg: F) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Defect(msg()))
    }
}

/// Generates and exactly verifies an exposedness certificate for every
/// point of a vertex set.
fn certify_all(dense: &[Vec<Rational>]) -> Result<usize> {
    for (i, point) in dense.iter().enumerate() {
        let others: Vec<Vec<Rational>> = dense
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, d)| d.clone())
            .collect();
        match exposing_cost(point, &others)? {
            Ok(_) => {}
            Err(_) => {
                return Err(Error::Defect(format!(
                    "vertex {i} has no strict exposing cost"
                )))
            }
        }
    }
    Ok(dense.len())
}

/// Independent brute-force oracle: solve every column subset of size
/// 1..=ell by Gaussian elimination on the full overdetermined system, keep
/// consistent nonnegative solutions, deduplicate. Shares no code with the
/// production basis enumeration.
fn oracle_vertices(sys: &ConstraintSystem) -> BTreeSet<Vec<Rational>> {
    let matrix = sys.matrix();
    let cols = matrix.cols();
    let ell = sys.space().ell();
    let mut found = BTreeSet::new();
    for size in 1..=ell {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if let Some(x) = solve_overdetermined(matrix, sys.rhs(), &subset) {
                if x.iter().all(|v| !v.is_negative()) {
                    let mut dense = vec![Rational::zero(); cols];
                    for (&c, v) in subset.iter().zip(&x) {
                        dense[c] = v.clone();
                    }
                    debug_assert_eq!(matrix.mul_vec(&dense), sys.rhs());
                    found.insert(dense);
                }
            }
            // next subset
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if subset[i] < cols - (size - i) {
                    subset[i] += 1;
                    for j in i + 1..size {
                        subset[j] = subset[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    found
}

/// Unique solution of the overdetermined system restricted to `subset`
/// columns, if one exists (full column rank and consistent).
fn solve_overdetermined(
    matrix: &RatMatrix,
    rhs: &[Rational],
    subset: &[usize],
) -> Option<Vec<Rational>> {
    let rows = matrix.rows();
    let k = subset.len();
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = subset
                .iter()
                .map(|&c| matrix.get(r, c).clone())
                .collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..k {
        let p = (pivot_row..rows).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot_row, p);
        let pv = a[pivot_row][col].clone();
        for v in a[pivot_row].iter_mut() {
            *v /= &pv;
        }
        for r in 0..rows {
            if r != pivot_row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=k {
                    let t = &a[pivot_row][c] * &f;
                    a[r][c] -= t;
                }
            }
        }
        pivot_row += 1;
    }
    // consistency of the eliminated rows
    for r in pivot_row..rows {
        if !a[r][k].is_zero() {
            return None;
        }
    }
    Some((0..k).map(|r| a[r][k].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_on_smallest_instance() {
        let sys = build_system(2, StateSpace::new(2).unwrap(), Budget::default()).unwrap();
        let vs = enumerate_vertices(&sys, Budget::default()).unwrap();
        let got: BTreeSet<Vec<Rational>> = vs
            .iter()
            .map(|v| v.point.to_dense(sys.indices()))
            .collect();
        assert_eq!(got, oracle_vertices(&sys));
    }

    #[test]
    fn criterion_one_runs() {
        let mut suite = Suite::new(Budget::default());
        assert!(suite.run(1).is_ok());
    }
}
