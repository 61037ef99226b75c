use num_traits::{One, Signed, Zero};

use super::matrix::{self, RatMatrix};
use super::rational::Rational;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpSense {
    Min,
    Max,
}

/// Linear program in standard equality form: optimize `objective . x`
/// subject to `eq_matrix x = eq_rhs` and (when `nonneg`) `x >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub eq_matrix: RatMatrix,
    pub eq_rhs: Vec<Rational>,
    pub nonneg: bool,
}

impl LpProblem {
    pub fn new(objective: Vec<Rational>, eq_matrix: RatMatrix, eq_rhs: Vec<Rational>) -> Self {
        assert_eq!(eq_matrix.cols(), objective.len(), "objective length");
        assert_eq!(eq_matrix.rows(), eq_rhs.len(), "rhs length");
        LpProblem {
            objective,
            eq_matrix,
            eq_rhs,
            nonneg: true,
        }
    }

    /// Feasibility-only problem (zero objective).
    pub fn feasibility(eq_matrix: RatMatrix, eq_rhs: Vec<Rational>) -> Self {
        let n = eq_matrix.cols();
        Self::new(vec![Rational::zero(); n], eq_matrix, eq_rhs)
    }
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub value: Rational,
    pub point: Vec<Rational>,
    /// True iff no other feasible point attains `value`. Certified exactly:
    /// strictly positive nonbasic reduced costs, or an auxiliary LP over the
    /// optimal face plus a column-rank check on the support.
    pub unique: bool,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(Optimum),
    /// `farkas` certifies infeasibility: farkas . rhs > 0 while
    /// farkas^T eq_matrix <= 0 componentwise.
    Infeasible { farkas: Vec<Rational> },
    /// `direction` is a feasible ray that improves the objective without
    /// bound: eq_matrix . direction = 0, direction >= 0.
    Unbounded { direction: Vec<Rational> },
}

/// Outcome without the uniqueness certificate (used internally to avoid
/// recursing while certifying uniqueness).
enum RawOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
        /// strictly positive reduced costs on all nonbasic columns
        strict: bool,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded {
        direction: Vec<Rational>,
    },
}

/// Feasibility outcome of `eq_matrix x = rhs, x >= 0`.
#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible { point: Vec<Rational> },
    /// farkas . rhs > 0 while farkas^T eq_matrix <= 0 componentwise
    Infeasible { farkas: Vec<Rational> },
}

/// Pure feasibility check: phase I only, no optimization and no uniqueness
/// certification. Much cheaper than `lp_solve` when only membership in a
/// polytope matters.
pub fn lp_feasible(p: &LpProblem) -> Result<Feasibility> {
    let zero = LpProblem {
        objective: vec![Rational::zero(); p.objective.len()],
        eq_matrix: p.eq_matrix.clone(),
        eq_rhs: p.eq_rhs.clone(),
        nonneg: p.nonneg,
    };
    match solve_raw(&zero, LpSense::Min)? {
        RawOutcome::Optimal { point, .. } => Ok(Feasibility::Feasible { point }),
        RawOutcome::Infeasible { farkas } => Ok(Feasibility::Infeasible { farkas }),
        RawOutcome::Unbounded { .. } => Err(Error::Defect(
            "zero objective reported unbounded".into(),
        )),
    }
}

/// Exact simplex with Bland's anti-cycling rule.
pub fn lp_solve(p: &LpProblem, sense: LpSense) -> Result<LpOutcome> {
    assert!(p.nonneg, "only nonnegative-variable problems are supported");
    match solve_raw(p, sense)? {
        RawOutcome::Infeasible { farkas } => Ok(LpOutcome::Infeasible { farkas }),
        RawOutcome::Unbounded { direction } => Ok(LpOutcome::Unbounded { direction }),
        RawOutcome::Optimal {
            value,
            point,
            strict,
        } => {
            let unique = if strict {
                true
            } else {
                certify_unique(p, sense, &value, &point)?
            };
            Ok(LpOutcome::Optimal(Optimum {
                value,
                point,
                unique,
            }))
        }
    }
}

/// Decides uniqueness of an optimal point that the strict-reduced-cost test
/// could not certify. Let Z be the zero coordinates and P the support of the
/// point. Over the optimal face, maximize the total mass on Z: a positive
/// optimum exhibits a second optimal point. Otherwise every optimal point is
/// supported inside P and solves `A_P x_P = b`, so the point is unique
/// exactly when the columns in P are linearly independent.
fn certify_unique(
    p: &LpProblem,
    sense: LpSense,
    value: &Rational,
    point: &[Rational],
) -> Result<bool> {
    let n = point.len();
    let zero_set: Vec<usize> = (0..n).filter(|&j| point[j].is_zero()).collect();
    let support: Vec<usize> = (0..n).filter(|&j| !point[j].is_zero()).collect();
    if !zero_set.is_empty() {
        let mut rows: Vec<Vec<Rational>> = (0..p.eq_matrix.rows())
            .map(|r| p.eq_matrix.row(r).to_vec())
            .collect();
        rows.push(p.objective.clone());
        let mut rhs = p.eq_rhs.clone();
        rhs.push(value.clone());
        let face_matrix = RatMatrix::from_rows(&rows);
        let mut objective = vec![Rational::zero(); n];
        for &j in &zero_set {
            objective[j] = Rational::one();
        }
        let aux = LpProblem::new(objective, face_matrix, rhs);
        match solve_raw(&aux, LpSense::Max)? {
            RawOutcome::Optimal { value: mass, .. } => {
                if mass.is_positive() {
                    return Ok(false);
                }
            }
            // the optimal face contains a ray carrying mass on Z
            RawOutcome::Unbounded { .. } => return Ok(false),
            RawOutcome::Infeasible { .. } => {
                return Err(Error::Defect(
                    "optimal face reported infeasible while certifying uniqueness".into(),
                ))
            }
        }
    }
    let _ = sense;
    let sub = p.eq_matrix.select_columns(&support);
    Ok(matrix::rank(&sub) == support.len())
}

struct Tableau {
    /// rows x (n + m + 1); artificial columns live at n..n+m, rhs at n+m
    t: Vec<Vec<Rational>>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
    n: usize,
    /// original row index per tableau row (rows can be dropped as redundant)
    orig_rows: Vec<usize>,
    iterations: u64,
    cap: u64,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.t.first().map_or(0, |r| r.len() - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.iterations += 1;
        if self.iterations > self.cap {
            return Err(Error::Defect(format!(
                "simplex exceeded its iteration cap of {} (cycling?)",
                self.cap
            )));
        }
        let pv = self.t[row][col].clone();
        debug_assert!(!pv.is_zero());
        for v in self.t[row].iter_mut() {
            *v /= &pv;
        }
        let pivot_row = self.t[row].clone();
        for (r, trow) in self.t.iter_mut().enumerate() {
            if r == row || trow[col].is_zero() {
                continue;
            }
            let f = trow[col].clone();
            for (v, pr) in trow.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= &f * pr;
                }
            }
            trow[col] = Rational::zero();
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (v, pr) in self.cost.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= &f * pr;
                }
            }
            self.cost[col] = Rational::zero();
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Bland's rule: enter the lowest-index column with negative reduced
    /// cost; leave by minimum ratio, ties broken by lowest basic column.
    fn bland_loop(&mut self, allow_artificial: bool) -> Result<Option<Vec<Rational>>> {
        let rhs = self.rhs_col();
        loop {
            let enterable = (0..rhs).find(|&j| {
                (allow_artificial || j < self.n) && self.cost[j].is_negative()
            });
            let Some(col) = enterable else { return Ok(None) };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                if self.t[r][col].is_positive() {
                    let ratio = &self.t[r][rhs] / &self.t[r][col];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col)?,
                None => {
                    // unbounded along `col`
                    let mut direction = vec![Rational::zero(); self.n];
                    if col < self.n {
                        direction[col] = Rational::one();
                    }
                    for r in 0..self.t.len() {
                        if self.basis[r] < self.n {
                            direction[self.basis[r]] = -self.t[r][col].clone();
                        }
                    }
                    return Ok(Some(direction));
                }
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let rhs = self.rhs_col();
        let mut x = vec![Rational::zero(); self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.t[r][rhs].clone();
            }
        }
        x
    }
}

fn iteration_cap(cols: usize, rank: usize) -> u64 {
    // C(cols, rank) * cols, saturating
    let mut c: u128 = 1;
    for i in 0..rank.min(cols) {
        c = c.saturating_mul((cols - i) as u128) / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c.saturating_mul(cols as u128).min(u64::MAX as u128) as u64
}

fn solve_raw(p: &LpProblem, sense: LpSense) -> Result<RawOutcome> {
    let m = p.eq_matrix.rows();
    let n = p.eq_matrix.cols();
    let minimize: Vec<Rational> = match sense {
        LpSense::Min => p.objective.clone(),
        LpSense::Max => p.objective.iter().map(|c| -c).collect(),
    };
    if m == 0 {
        // no constraints: x = 0 unless some coefficient pays to grow
        if let Some(j) = (0..n).find(|&j| minimize[j].is_negative()) {
            let mut direction = vec![Rational::zero(); n];
            direction[j] = Rational::one();
            return Ok(RawOutcome::Unbounded { direction });
        }
        return Ok(RawOutcome::Optimal {
            value: Rational::zero(),
            point: vec![Rational::zero(); n],
            strict: (0..n).all(|j| minimize[j].is_positive()),
        });
    }

    // sign-normalize rows so the artificial basis is feasible
    let mut row_sign = vec![false; m];
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for r in 0..m {
        let flip = p.eq_rhs[r].is_negative();
        row_sign[r] = flip;
        let mut row: Vec<Rational> = p
            .eq_matrix
            .row(r)
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        row.extend((0..m).map(|k| {
            if k == r {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        row.push(if flip {
            -p.eq_rhs[r].clone()
        } else {
            p.eq_rhs[r].clone()
        });
        t.push(row);
    }

    // phase I: minimize the artificial mass; reduced costs start at the
    // negated column sums
    let width = n + m + 1;
    let mut cost = vec![Rational::zero(); width];
    for j in 0..width {
        if (n..n + m).contains(&j) {
            continue; // artificial columns have reduced cost 1 - 1 = 0
        }
        let mut s = Rational::zero();
        for row in &t {
            s += &row[j];
        }
        cost[j] = -s;
    }
    let mut tab = Tableau {
        t,
        cost,
        basis: (n..n + m).collect(),
        n,
        orig_rows: (0..m).collect(),
        iterations: 0,
        cap: iteration_cap(n + m, m),
    };
    let unbounded = tab.bland_loop(true)?;
    debug_assert!(unbounded.is_none(), "phase I is bounded below by zero");
    let rhs = tab.rhs_col();
    let phase1_value = -tab.cost[rhs].clone();
    if phase1_value.is_positive() {
        // infeasible; read the dual multipliers off the artificial columns
        // and undo the row sign flips
        let mut farkas = vec![Rational::zero(); m];
        for r in 0..tab.t.len() {
            if tab.basis[r] >= n {
                // basic artificial k contributes its row: y = c_B^T B^-1
                for k in 0..m {
                    farkas[k] += &tab.t[r][n + k];
                }
            }
        }
        for (k, flip) in row_sign.iter().enumerate() {
            if *flip {
                farkas[k] = -farkas[k].clone();
            }
        }
        return Ok(RawOutcome::Infeasible { farkas });
    }

    // drive artificials out of the basis; rows with no eligible pivot are
    // redundant and dropped
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j)?,
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                    tab.orig_rows.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase II cost row
    let rhs = tab.rhs_col();
    let mut cost = vec![Rational::zero(); rhs + 1];
    for j in 0..rhs + 1 {
        let mut v = if j < n {
            minimize[j].clone()
        } else {
            Rational::zero()
        };
        for (r, &b) in tab.basis.iter().enumerate() {
            debug_assert!(b < n);
            if !minimize[b].is_zero() {
                v -= &minimize[b] * &tab.t[r][j];
            }
        }
        cost[j] = v;
    }
    tab.cost = cost;
    if let Some(direction) = tab.bland_loop(false)? {
        return Ok(RawOutcome::Unbounded { direction });
    }

    let point = tab.point();
    let mut value = Rational::zero();
    for (c, x) in p.objective.iter().zip(&point) {
        if !x.is_zero() {
            value += c * x;
        }
    }
    let strict = (0..n).all(|j| tab.basis.contains(&j) || tab.cost[j].is_positive());
    Ok(RawOutcome::Optimal {
        value,
        point,
        strict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_i64};

    fn matrix(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&v| rat_i64(v)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn whole_face_optimal_is_not_unique() {
        // min x1 + x2 s.t. x1 + x2 = 1, x >= 0
        let p = LpProblem::new(
            vec![rat_i64(1), rat_i64(1)],
            matrix(&[&[1, 1]]),
            vec![rat_i64(1)],
        );
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(opt.value, rat_i64(1));
        assert!(!opt.unique);
    }

    #[test]
    fn corner_optimum_is_unique() {
        // min x1 s.t. x1 + x2 = 1, x >= 0 -> 0 at (0, 1)
        let p = LpProblem::new(
            vec![rat_i64(1), rat_i64(0)],
            matrix(&[&[1, 1]]),
            vec![rat_i64(1)],
        );
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(opt.value, rat_i64(0));
        assert_eq!(opt.point, vec![rat_i64(0), rat_i64(1)]);
        assert!(opt.unique);
    }

    #[test]
    fn infeasible_with_farkas() {
        // x1 + x2 = -1 has no nonnegative solution
        let p = LpProblem::feasibility(matrix(&[&[1, 1]]), vec![rat_i64(-1)]);
        let LpOutcome::Infeasible { farkas } = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected infeasible")
        };
        // y . b > 0 and y^T A <= 0
        assert!((&farkas[0] * rat_i64(-1)).is_positive());
        assert!(!(&farkas[0] * rat_i64(1)).is_positive());
    }

    #[test]
    fn unbounded_direction() {
        // min -x1 s.t. x1 - x2 = 0: grows along (1,1)
        let p = LpProblem::new(
            vec![rat_i64(-1), rat_i64(0)],
            matrix(&[&[1, -1]]),
            vec![rat_i64(0)],
        );
        let LpOutcome::Unbounded { direction } = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected unbounded")
        };
        let ad = p.eq_matrix.mul_vec(&direction);
        assert!(ad.iter().all(|v| v.is_zero()));
        assert!(direction.iter().all(|v| !v.is_negative()));
        let obj: Rational = direction
            .iter()
            .zip(&p.objective)
            .map(|(d, c)| d * c)
            .sum();
        assert!(obj.is_negative());
    }

    #[test]
    fn degenerate_unique_optimum() {
        // min x2 over the segment {x1 + x2 = 1, x2 = 0 forced by cost}:
        // optimum (1, 0) is unique despite a zero reduced cost pattern when
        // extra redundant structure is added
        let p = LpProblem::new(
            vec![rat_i64(0), rat_i64(1)],
            matrix(&[&[1, 1], &[2, 2]]),
            vec![rat_i64(1), rat_i64(2)],
        );
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(opt.point, vec![rat_i64(1), rat_i64(0)]);
        assert!(opt.unique);
    }

    #[test]
    fn max_sense() {
        // max x1 + 2 x2 s.t. x1 + x2 = 1 -> (0,1) value 2, unique
        let p = LpProblem::new(
            vec![rat_i64(1), rat_i64(2)],
            matrix(&[&[1, 1]]),
            vec![rat_i64(1)],
        );
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Max).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(opt.value, rat_i64(2));
        assert_eq!(opt.point, vec![rat_i64(0), rat_i64(1)]);
        assert!(opt.unique);
    }

    #[test]
    fn fractional_data() {
        // feasibility of A alpha = (1/2, 1/2) for the N=2, l=2 system
        let a = RatMatrix::from_rows(&[
            vec![rat_i64(1), rat(1, 2), rat_i64(0)],
            vec![rat_i64(0), rat(1, 2), rat_i64(1)],
        ]);
        let p = LpProblem::feasibility(a.clone(), vec![rat(1, 2), rat(1, 2)]);
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected feasible")
        };
        assert_eq!(a.mul_vec(&opt.point), vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn residual_is_exact() {
        let a = matrix(&[&[3, 1, 2, 0], &[1, 4, 0, 1]]);
        let rhs = vec![rat(7, 3), rat(11, 5)];
        let p = LpProblem::new(
            vec![rat_i64(1), rat_i64(2), rat_i64(3), rat_i64(4)],
            a.clone(),
            rhs.clone(),
        );
        let LpOutcome::Optimal(opt) = lp_solve(&p, LpSense::Min).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(a.mul_vec(&opt.point), rhs);
    }
}
