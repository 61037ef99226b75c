//! Pairwise costs, the reduced transport solver, the brute-force oracle for
//! the three-state model problem, limit extreme points, the diamond, and
//! exact polytope volumes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::exact::{rat, rat_i64, Rational};
use crate::measures::{
    enumerate_quantized, reduce_coeff, QuantizedMeasure, StateSpace, TwoPlan,
};
use crate::monge::enumerate_monge;
use crate::polytopes::{build_system, enumerate_vertices, extreme_flags, hull3, HullMesh};
use crate::{Budget, Error, Result};

/// Symmetric pair potential on the state space, as an ell x ell matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCost {
    ell: usize,
    v: Vec<Rational>,
}

impl PairCost {
    pub fn from_matrix(ell: usize, v: Vec<Rational>) -> Result<Self> {
        if v.len() != ell * ell {
            return Err(Error::InvalidInput(format!(
                "cost matrix must have {ell}x{ell} entries"
            )));
        }
        for i in 0..ell {
            for j in 0..ell {
                if v[i * ell + j] != v[j * ell + i] {
                    return Err(Error::InvalidInput("cost matrix must be symmetric".into()));
                }
            }
        }
        Ok(PairCost { ell, v })
    }

    /// Discrete metric: 1 off the diagonal, 0 on it.
    pub fn discrete(ell: usize) -> Self {
        let v = (0..ell * ell)
            .map(|k| {
                if k % ell == k / ell {
                    Rational::zero()
                } else {
                    rat_i64(1)
                }
            })
            .collect();
        PairCost { ell, v }
    }

    /// Repulsive cost: 1 off the diagonal, `b` on it; requires b > 1.
    pub fn repulsive(ell: usize, b: Rational) -> Result<Self> {
        if b <= rat_i64(1) {
            return Err(Error::InvalidInput(format!(
                "repulsive diagonal must exceed 1, got {b}"
            )));
        }
        let v = (0..ell * ell)
            .map(|k| if k % ell == k / ell { b.clone() } else { rat_i64(1) })
            .collect();
        Ok(PairCost { ell, v })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.v[i * self.ell + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.v
    }

    /// Pair-scale objective <v, mu>.
    pub fn pair_value(&self, plan: &TwoPlan) -> Rational {
        assert_eq!(plan.ell(), self.ell);
        self.v
            .iter()
            .zip(plan.entries())
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// A reduced-polytope vertex with both Monge classifications: the exact one
/// (the plan is the two-point marginal of some Monge state) and the cheap
/// preimage heuristic (some vertex preimage had Monge coefficients).
#[derive(Clone, Debug)]
pub struct ReducedVertex {
    pub plan: TwoPlan,
    pub is_monge: bool,
    pub monge_preimage: bool,
}

#[derive(Clone, Debug)]
pub struct ReducedVertexSet {
    pub vertices: Vec<ReducedVertex>,
    /// Indices where the preimage heuristic disagrees with the exact test.
    pub monge_flag_mismatches: Vec<usize>,
}

impl ReducedVertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn plans(&self) -> impl Iterator<Item = &TwoPlan> {
        self.vertices.iter().map(|v| &v.plan)
    }
}

/// Distinct two-point marginals of all Monge states, sorted.
pub fn reduced_monge_images(n: u32, space: StateSpace, budget: Budget) -> Result<Vec<TwoPlan>> {
    let states = enumerate_monge(n, space, budget)?;
    let mut images = BTreeSet::new();
    for s in &states {
        images.insert(reduce_coeff(s)?);
    }
    Ok(images.into_iter().collect())
}

/// Exact vertex set of the reduced Kantorovich polytope: images of the
/// coefficient-polytope vertices under the two-point marginal, deduplicated
/// and filtered by extremality. Points are sorted by their dense entries.
pub fn reduced_vertices(n: u32, space: StateSpace, budget: Budget) -> Result<ReducedVertexSet> {
    let t0 = std::time::Instant::now();
    let sys = build_system(n, space, budget)?;
    let kan = enumerate_vertices(&sys, budget)?;
    eprintln!("[t] kan {} vertices {:?}", kan.len(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let mut images: BTreeMap<TwoPlan, bool> = BTreeMap::new();
    for info in kan.iter() {
        let plan = reduce_coeff(&info.point)?;
        let entry = images.entry(plan).or_insert(false);
        *entry = *entry || info.is_monge;
    }
    eprintln!("[t] {} images {:?}", images.len(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let plans: Vec<TwoPlan> = images.keys().cloned().collect();
    let coords: Vec<Vec<Rational>> = plans.iter().map(|p| p.off_diagonal()).collect();
    let flags = extreme_flags(&coords)?;
    eprintln!("[t] filter {:?}", t0.elapsed());

    let monge_images: BTreeSet<TwoPlan> =
        reduced_monge_images(n, space, budget)?.into_iter().collect();

    let mut vertices = Vec::new();
    let mut monge_flag_mismatches = Vec::new();
    for (plan, extreme) in plans.into_iter().zip(&flags) {
        if !extreme {
            continue;
        }
        let monge_preimage = images[&plan];
        let is_monge = monge_images.contains(&plan);
        if is_monge != monge_preimage {
            monge_flag_mismatches.push(vertices.len());
        }
        vertices.push(ReducedVertex {
            plan,
            is_monge,
            monge_preimage,
        });
    }
    Ok(ReducedVertexSet {
        vertices,
        monge_flag_mismatches,
    })
}

/// Vertices of the reduced Monge polytope (the hull of the Monge images).
pub fn reduced_monge_vertices(n: u32, space: StateSpace, budget: Budget) -> Result<Vec<TwoPlan>> {
    let images = reduced_monge_images(n, space, budget)?;
    let coords: Vec<Vec<Rational>> = images.iter().map(|p| p.off_diagonal()).collect();
    let flags = extreme_flags(&coords)?;
    Ok(images
        .into_iter()
        .zip(&flags)
        .filter(|(_, f)| **f)
        .map(|(p, _)| p)
        .collect())
}

/// Result of the reduced transport problem.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// pair-scale optimum <v, mu>
    pub optimal_value: Rational,
    /// full N-body optimum, C(N,2) times the pair value
    pub full_value: Rational,
    /// all vertices attaining the optimum, in canonical order
    pub minimizers: Vec<TwoPlan>,
    pub unique: bool,
    /// some minimizer is of Monge type (exact classification)
    pub monge_attained: bool,
}

fn binom2(n: u32) -> Rational {
    rat_i64(n as i64 * (n as i64 - 1) / 2)
}

/// Minimizes `<v, mu>` over the reduced Kantorovich polytope by exhaustive
/// evaluation on its vertex set; the optimum, all attaining vertices, and
/// the uniqueness and Monge-attainment flags are exact.
pub fn solve_reduced(
    n: u32,
    space: StateSpace,
    cost: &PairCost,
    budget: Budget,
) -> Result<SolveReport> {
    if cost.ell() != space.ell() {
        return Err(Error::InvalidInput(format!(
            "cost is over {} states, polytope over {}",
            cost.ell(),
            space.ell()
        )));
    }
    let rv = reduced_vertices(n, space, budget)?;
    if rv.is_empty() {
        return Err(Error::Defect("reduced polytope has no vertices".into()));
    }
    let values: Vec<Rational> = rv.plans().map(|p| cost.pair_value(p)).collect();
    let best = values.iter().min().expect("nonempty").clone();
    let mut minimizers = Vec::new();
    let mut monge_attained = false;
    for (vertex, value) in rv.vertices.iter().zip(&values) {
        if *value == best {
            minimizers.push(vertex.plan.clone());
            monge_attained = monge_attained || vertex.is_monge;
        }
    }
    let unique = minimizers.len() == 1;
    Ok(SolveReport {
        full_value: binom2(n) * &best,
        optimal_value: best,
        minimizers,
        unique,
        monge_attained,
    })
}

/// Full N-body objective of a coefficient vector: sum over the support of
/// alpha_m times the pairwise cost of the multi-index m.
pub fn nbody_cost_value(pair: &PairCost, alpha: &crate::polytopes::CoeffVector) -> Rational {
    let mut total = Rational::zero();
    for (idx, weight) in alpha.coeffs() {
        let states = idx.indices();
        let mut c = Rational::zero();
        for j in 0..states.len() {
            for k in j + 1..states.len() {
                c += pair.get((states[j] - 1) as usize, (states[k] - 1) as usize);
            }
        }
        total += weight * c;
    }
    total
}

/// Brute-force optimizer set of the quadratic model problem on three
/// states: maximize the sum of pairwise weight products over the quantized
/// measures. The result is checked against the closed-form case split on
/// N mod 3; disagreement is a defect.
pub fn theorem42_oracle(n: u32) -> Result<Vec<QuantizedMeasure>> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 marginals".into()));
    }
    let space = StateSpace::new(3)?;
    let measures = enumerate_quantized(n, space, Budget::default())?;
    let objective = |l: &QuantizedMeasure| -> Rational {
        let w = l.weights();
        &w[0] * &w[1] + &w[0] * &w[2] + &w[1] * &w[2]
    };
    let best = measures
        .iter()
        .map(objective)
        .max()
        .expect("nonempty enumeration");
    let optimal: BTreeSet<QuantizedMeasure> = measures
        .into_iter()
        .filter(|l| objective(l) == best)
        .collect();

    let m = n as i64 / 3;
    let nn = n as i64;
    let expected: BTreeSet<QuantizedMeasure> = match n % 3 {
        0 => {
            let third = rat(m, nn);
            [QuantizedMeasure::new(n, vec![third.clone(), third.clone(), third])?]
                .into_iter()
                .collect()
        }
        1 => permutations_of(n, rat(m, nn), rat(m, nn), rat(m + 1, nn))?,
        _ => permutations_of(n, rat(m, nn), rat(m + 1, nn), rat(m + 1, nn))?,
    };
    if optimal != expected {
        return Err(Error::Defect(format!(
            "model-problem optimizers for N={n} disagree with the closed form"
        )));
    }
    Ok(optimal.into_iter().collect())
}

fn permutations_of(
    n: u32,
    a: Rational,
    b: Rational,
    c: Rational,
) -> Result<BTreeSet<QuantizedMeasure>> {
    let mut out = BTreeSet::new();
    for w in [
        vec![a.clone(), b.clone(), c.clone()],
        vec![a.clone(), c.clone(), b.clone()],
        vec![b.clone(), a.clone(), c.clone()],
        vec![b.clone(), c.clone(), a.clone()],
        vec![c.clone(), a.clone(), b.clone()],
        vec![c, b, a],
    ] {
        out.insert(QuantizedMeasure::new(n, w)?);
    }
    Ok(out)
}

/// The five limit extreme points of the three-state reduced polytopes.
#[derive(Clone, Debug)]
pub struct LimitPoints {
    pub ea: TwoPlan,
    pub er: TwoPlan,
    pub e12: TwoPlan,
    pub e13: TwoPlan,
    pub e23: TwoPlan,
}

impl LimitPoints {
    pub fn named(&self) -> [(&'static str, &TwoPlan); 5] {
        [
            ("EA", &self.ea),
            ("ER", &self.er),
            ("E12", &self.e12),
            ("E13", &self.e13),
            ("E23", &self.e23),
        ]
    }
}

fn plan3(entries: [[Rational; 3]; 3]) -> TwoPlan {
    TwoPlan::new(3, entries.into_iter().flatten().collect()).expect("valid plan")
}

pub fn limit_points() -> LimitPoints {
    let z = Rational::zero;
    let third = || rat(1, 3);
    let sixth = || rat(1, 6);
    let ninth = || rat(1, 9);
    LimitPoints {
        ea: plan3([
            [third(), z(), z()],
            [z(), third(), z()],
            [z(), z(), third()],
        ]),
        er: plan3([
            [ninth(), ninth(), ninth()],
            [ninth(), ninth(), ninth()],
            [ninth(), ninth(), ninth()],
        ]),
        e12: plan3([
            [sixth(), sixth(), z()],
            [sixth(), sixth(), z()],
            [z(), z(), third()],
        ]),
        e13: plan3([
            [sixth(), z(), sixth()],
            [z(), third(), z()],
            [sixth(), z(), sixth()],
        ]),
        e23: plan3([
            [third(), z(), z()],
            [z(), sixth(), sixth()],
            [z(), sixth(), sixth()],
        ]),
    }
}

/// The cheap upper bound on the reduced optimum: the best objective value
/// among the five limit extreme points (all of which lie in every reduced
/// polytope). Returns the bound and the name of the attaining point.
pub fn mean_field_bound(cost: &PairCost) -> Result<(Rational, &'static str)> {
    if cost.ell() != 3 {
        return Err(Error::InvalidInput(
            "the limit extreme points live on 3 states".into(),
        ));
    }
    let limits = limit_points();
    let mut best: Option<(Rational, &'static str)> = None;
    for (name, plan) in limits.named() {
        let value = cost.pair_value(plan);
        match &best {
            Some((b, _)) if *b <= value => {}
            _ => best = Some((value, name)),
        }
    }
    Ok(best.expect("five candidates"))
}

/// Table-form closed expressions for the five prominent reduced vertices on
/// three states, for any N >= 2.
#[derive(Clone, Debug)]
pub struct ProminentVertices {
    pub ea: TwoPlan,
    pub er: TwoPlan,
    pub e12: TwoPlan,
    pub e13: TwoPlan,
    pub e23: TwoPlan,
}

pub fn prominent_vertices(n: u32) -> Result<ProminentVertices> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 marginals".into()));
    }
    let nn = n as i64;
    let ea = plan3({
        let t = || rat(1, 3);
        let z = Rational::zero;
        [[t(), z(), z()], [z(), t(), z()], [z(), z(), t()]]
    });
    let (er_diag, er_off) = if n % 3 == 0 {
        (rat(nn - 3, 9 * (nn - 1)), rat(nn, 9 * (nn - 1)))
    } else {
        (rat(nn - 2, 9 * nn), rat(nn + 1, 9 * nn))
    };
    let er = plan3([
        [er_diag.clone(), er_off.clone(), er_off.clone()],
        [er_off.clone(), er_diag.clone(), er_off.clone()],
        [er_off.clone(), er_off.clone(), er_diag.clone()],
    ]);
    let (b_diag, b_off) = if n % 2 == 0 {
        (rat(nn - 2, 6 * (nn - 1)), rat(nn, 6 * (nn - 1)))
    } else {
        (rat(nn - 1, 6 * nn), rat(nn + 1, 6 * nn))
    };
    let z = Rational::zero;
    let third = || rat(1, 3);
    let e12 = plan3([
        [b_diag.clone(), b_off.clone(), z()],
        [b_off.clone(), b_diag.clone(), z()],
        [z(), z(), third()],
    ]);
    let e13 = plan3([
        [b_diag.clone(), z(), b_off.clone()],
        [z(), third(), z()],
        [b_off.clone(), z(), b_diag.clone()],
    ]);
    let e23 = plan3([
        [third(), z(), z()],
        [z(), b_diag.clone(), b_off.clone()],
        [z(), b_off, b_diag],
    ]);
    Ok(ProminentVertices { ea, er, e12, e13, e23 })
}

/// Exact volumes of the two three-state reduced polytopes in off-diagonal
/// coordinates, with their ratio and the meshes for optional export.
#[derive(Clone, Debug)]
pub struct VolumeReport {
    pub vol_kantorovich: Rational,
    pub vol_monge: Rational,
    pub ratio: Rational,
    pub mesh_kantorovich: HullMesh,
    pub mesh_monge: HullMesh,
}

fn off_diagonal_3d(plan: &TwoPlan) -> [Rational; 3] {
    let off = plan.off_diagonal();
    debug_assert_eq!(off.len(), 3);
    let mut it = off.into_iter();
    [
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ]
}

pub fn volume_report(n: u32, budget: Budget) -> Result<VolumeReport> {
    let space = StateSpace::new(3)?;
    let rv = reduced_vertices(n, space, budget)?;
    let kan_points: Vec<[Rational; 3]> = rv.plans().map(off_diagonal_3d).collect();
    let monge_points: Vec<[Rational; 3]> = reduced_monge_images(n, space, budget)?
        .iter()
        .map(off_diagonal_3d)
        .collect();
    let mesh_kantorovich = hull3(&kan_points)?;
    let mesh_monge = hull3(&monge_points)?;
    if mesh_kantorovich.volume.is_zero() {
        return Err(Error::Defect(format!(
            "reduced polytope for N={n} collapsed to dimension {}",
            mesh_kantorovich.affine_dimension
        )));
    }
    let ratio = &mesh_monge.volume / &mesh_kantorovich.volume;
    Ok(VolumeReport {
        vol_kantorovich: mesh_kantorovich.volume.clone(),
        vol_monge: mesh_monge.volume.clone(),
        ratio,
        mesh_kantorovich,
        mesh_monge,
    })
}

/// Hull of the five limit extreme points in off-diagonal coordinates.
pub fn diamond_mesh() -> Result<HullMesh> {
    let limits = limit_points();
    let points: Vec<[Rational; 3]> = limits
        .named()
        .iter()
        .map(|(_, p)| off_diagonal_3d(p))
        .collect();
    hull3(&points)
}

/// Applies a state relabeling to a plan: entry (i, j) moves to
/// (perm(i), perm(j)).
pub fn relabel_plan(plan: &TwoPlan, perm: &[usize]) -> Result<TwoPlan> {
    let ell = plan.ell();
    assert_eq!(perm.len(), ell);
    let mut entries = vec![Rational::zero(); ell * ell];
    for i in 0..ell {
        for j in 0..ell {
            entries[perm[i] * ell + perm[j]] = plan.get(i, j).clone();
        }
    }
    TwoPlan::new(ell, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(ell: usize) -> StateSpace {
        StateSpace::new(ell).unwrap()
    }

    #[test]
    fn reduced_three_three_counts() {
        let rv = reduced_vertices(3, space(3), Budget::default()).unwrap();
        assert_eq!(rv.len(), 8);
        let monge = rv.vertices.iter().filter(|v| v.is_monge).count();
        assert_eq!(monge, 5);
        assert!(rv.monge_flag_mismatches.is_empty());
    }

    #[test]
    fn reduced_two_states_closed_form() {
        for n in 2..=8u32 {
            let rv = reduced_vertices(n, space(2), Budget::default()).unwrap();
            assert_eq!(rv.len(), 2, "N={n}");
            assert!(rv.vertices.iter().all(|v| v.is_monge));
            let nn = n as i64;
            let (diag, off) = if n % 2 == 0 {
                (rat(nn - 2, 4 * (nn - 1)), rat(nn, 4 * (nn - 1)))
            } else {
                (rat(nn - 1, 4 * nn), rat(nn + 1, 4 * nn))
            };
            let mu1 = TwoPlan::new(
                2,
                vec![rat(1, 2), Rational::zero(), Rational::zero(), rat(1, 2)],
            )
            .unwrap();
            let mu2 =
                TwoPlan::new(2, vec![diag.clone(), off.clone(), off, diag]).unwrap();
            let got: BTreeSet<TwoPlan> = rv.plans().cloned().collect();
            let expect: BTreeSet<TwoPlan> = [mu1, mu2].into_iter().collect();
            assert_eq!(got, expect, "N={n}");
        }
    }

    #[test]
    fn reduced_coincides_with_kantorovich_for_two_marginals() {
        // N=2: the reduction is the identity, so images of the vertices are
        // exactly the vertices
        let sys = build_system(2, space(3), Budget::default()).unwrap();
        let kan = enumerate_vertices(&sys, Budget::default()).unwrap();
        let rv = reduced_vertices(2, space(3), Budget::default()).unwrap();
        assert_eq!(rv.len(), kan.len());
        assert!(rv.vertices.iter().all(|v| v.is_monge));
    }

    #[test]
    fn solve_discrete_metric() {
        let report =
            solve_reduced(3, space(3), &PairCost::discrete(3), Budget::default()).unwrap();
        assert_eq!(report.optimal_value, rat_i64(0));
        assert_eq!(report.full_value, rat_i64(0));
        assert!(report.unique);
        assert!(report.monge_attained);
        let ea = prominent_vertices(3).unwrap().ea;
        assert_eq!(report.minimizers, vec![ea]);
    }

    #[test]
    fn solve_repulsive() {
        let cost = PairCost::repulsive(3, rat_i64(2)).unwrap();
        let report = solve_reduced(3, space(3), &cost, Budget::default()).unwrap();
        assert_eq!(report.optimal_value, rat_i64(1));
        assert_eq!(report.full_value, rat_i64(3));
        assert!(report.unique);
        let er = prominent_vertices(3).unwrap().er;
        assert_eq!(report.minimizers, vec![er]);
    }

    #[test]
    fn solve_zero_cost_everything_optimal() {
        let cost = PairCost::from_matrix(3, vec![Rational::zero(); 9]).unwrap();
        let report = solve_reduced(5, space(3), &cost, Budget::default()).unwrap();
        assert!(!report.unique);
        let rv = reduced_vertices(5, space(3), Budget::default()).unwrap();
        assert_eq!(report.minimizers.len(), rv.len());
    }

    #[test]
    fn repulsive_requires_b_above_one() {
        assert!(PairCost::repulsive(3, rat_i64(1)).is_err());
        assert!(PairCost::repulsive(3, rat(1, 2)).is_err());
        assert!(PairCost::repulsive(3, rat(3, 2)).is_ok());
    }

    #[test]
    fn oracle_small_cases() {
        let sp = space(3);
        let got = theorem42_oracle(3).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].weights(), sp.uniform().as_slice());

        let got = theorem42_oracle(4).unwrap();
        assert_eq!(got.len(), 3);
        for l in &got {
            let mut w = l.weights().to_vec();
            w.sort();
            assert_eq!(w, vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
        }

        let got = theorem42_oracle(2).unwrap();
        assert_eq!(got.len(), 3);
        for l in &got {
            let mut w = l.weights().to_vec();
            w.sort();
            assert_eq!(w, vec![rat_i64(0), rat(1, 2), rat(1, 2)]);
        }
    }

    #[test]
    fn limit_points_are_valid_plans() {
        let l = limit_points();
        for (_, p) in l.named() {
            assert_eq!(p.marginal(), space(3).uniform());
        }
    }

    #[test]
    fn mean_field_examples() {
        let (bound, name) = mean_field_bound(&PairCost::discrete(3)).unwrap();
        assert_eq!(bound, rat_i64(0));
        assert_eq!(name, "EA");

        let cost = PairCost::repulsive(3, rat_i64(2)).unwrap();
        let (bound, name) = mean_field_bound(&cost).unwrap();
        // ER pays 6/9 off-diagonal plus 3/9 * 2 on the diagonal = 4/3;
        // E12 pays 1/3 + (2/3)*2 = 5/3 and EA pays 2
        assert_eq!(bound, rat(4, 3));
        assert_eq!(name, "ER");
    }

    #[test]
    fn nbody_examples() {
        let cost = PairCost::discrete(3);
        let gs = {
            let mut coeffs = BTreeMap::new();
            for s in 1..=3u32 {
                coeffs.insert(
                    crate::measures::MultiIndex::new(vec![s; 4]),
                    rat(1, 3),
                );
            }
            crate::polytopes::CoeffVector::new(4, 3, coeffs).unwrap()
        };
        assert_eq!(nbody_cost_value(&cost, &gs), rat_i64(0));
    }

    #[test]
    fn diamond_volume() {
        let mesh = diamond_mesh().unwrap();
        assert_eq!(mesh.volume, rat(1, 648));
        assert_eq!(mesh.vertices.len(), 5);
    }

    #[test]
    fn volume_ratio_one_for_two_marginals() {
        let report = volume_report(2, Budget::default()).unwrap();
        assert_eq!(report.ratio, rat_i64(1));
        assert_eq!(report.vol_kantorovich, report.vol_monge);
    }
}
