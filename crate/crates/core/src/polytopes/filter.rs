//! Batch extremality filter over a finite point cloud. Equivalent to
//! running the membership LP per point against all other points, but
//! output-sensitive: most vertices are certified as strict unique argmins
//! of integer objectives, and the remaining points are resolved against the
//! growing set of certified vertices, whose separating functionals in turn
//! locate new vertices. Every conclusion is backed by exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::exact::{lp_feasible, Feasibility, LpProblem, RatMatrix, Rational};
use crate::Result;

const RNG_SEED: u64 = 0x6b616e;
const RANDOM_ROUNDS_BASE: usize = 128;
const RANDOM_ROUNDS_PER_DIM: usize = 4;
const RANDOM_ROUNDS_MAX: usize = 512;
const OBJECTIVE_RANGE: i64 = 1 << 16;

enum ScanTable {
    Small(Vec<Vec<(u32, i64)>>),
    Big(Vec<Vec<(u32, BigInt)>>),
}

fn build_table(points: &[Vec<Rational>]) -> ScanTable {
    let mut lcm = BigInt::one();
    for p in points {
        for v in p {
            lcm = lcm.lcm(v.denom());
        }
    }
    let scaled: Vec<Vec<(u32, BigInt)>> = points
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.numer() * (&lcm / v.denom())))
                .collect()
        })
        .collect();
    let fits = scaled
        .iter()
        .flatten()
        .all(|(_, v)| v.to_i64().is_some_and(|x| x.abs() < (1 << 40)));
    if fits {
        ScanTable::Small(
            scaled
                .iter()
                .map(|row| row.iter().map(|(i, v)| (*i, v.to_i64().unwrap())).collect())
                .collect(),
        )
    } else {
        ScanTable::Big(scaled)
    }
}

/// Index of the strict unique minimizer of `obj` over the table, if any.
fn unique_argmin(table: &ScanTable, obj: &[i64]) -> Option<usize> {
    match table {
        ScanTable::Small(rows) => {
            let mut best: Option<(i128, usize, bool)> = None;
            for (k, row) in rows.iter().enumerate() {
                let val: i128 = row
                    .iter()
                    .map(|(i, v)| obj[*i as usize] as i128 * *v as i128)
                    .sum();
                best = match best {
                    None => Some((val, k, true)),
                    Some((b, _, _)) if val < b => Some((val, k, true)),
                    Some((b, i, _)) if val == b => Some((b, i, false)),
                    keep => keep,
                };
            }
            best.and_then(|(_, i, unique)| unique.then_some(i))
        }
        ScanTable::Big(rows) => {
            let mut best: Option<(BigInt, usize, bool)> = None;
            for (k, row) in rows.iter().enumerate() {
                let val: BigInt = row
                    .iter()
                    .map(|(i, v)| BigInt::from(obj[*i as usize]) * v)
                    .sum();
                best = match &best {
                    None => Some((val, k, true)),
                    Some((b, _, _)) if val < *b => Some((val, k, true)),
                    Some((b, i, _)) if val == *b => Some((b.clone(), *i, false)),
                    _ => best,
                };
            }
            best.and_then(|(_, i, unique)| unique.then_some(i))
        }
    }
}

fn certification_objectives(dim: usize) -> Vec<Vec<i64>> {
    let mut objectives = Vec::new();
    for i in 0..dim {
        let mut c = vec![0i64; dim];
        c[i] = 1;
        objectives.push(c.clone());
        c[i] = -1;
        objectives.push(c);
    }
    let rounds =
        (RANDOM_ROUNDS_BASE + RANDOM_ROUNDS_PER_DIM * dim).min(RANDOM_ROUNDS_MAX);
    let mut rng = ChaCha20Rng::seed_from_u64(RNG_SEED);
    for _ in 0..rounds {
        let c: Vec<i64> = (0..dim)
            .map(|_| rng.random_range(-OBJECTIVE_RANGE..=OBJECTIVE_RANGE))
            .collect();
        let neg = c.iter().map(|v| -v).collect();
        objectives.push(c);
        objectives.push(neg);
    }
    objectives
}

fn membership(p: &[Rational], hull: &[usize], points: &[Vec<Rational>]) -> LpProblem {
    let d = p.len();
    let cols = hull.len();
    let mut data = Vec::with_capacity((d + 1) * cols);
    for r in 0..d {
        for &h in hull {
            data.push(points[h][r].clone());
        }
    }
    data.extend(std::iter::repeat_n(Rational::one(), cols));
    let matrix = RatMatrix::new(d + 1, cols, data);
    let mut rhs: Vec<Rational> = p.to_vec();
    rhs.push(Rational::one());
    LpProblem::feasibility(matrix, rhs)
}

/// For each point of a pairwise-distinct cloud, whether it is an extreme
/// point of the cloud's convex hull. Deterministic and independent of the
/// rayon thread count.
pub fn extreme_flags(points: &[Vec<Rational>]) -> Result<Vec<bool>> {
    let count = points.len();
    if count <= 2 {
        return Ok(vec![true; count]);
    }
    let dim = points[0].len();
    debug_assert!(points.iter().all(|p| p.len() == dim));

    let table = build_table(points);
    let objectives = certification_objectives(dim);
    let certified_hits: Vec<Option<usize>> = objectives
        .par_iter()
        .map(|obj| unique_argmin(&table, obj))
        .collect();

    let mut flags = vec![false; count];
    let mut resolved = vec![false; count];
    for hit in certified_hits.into_iter().flatten() {
        flags[hit] = true;
        resolved[hit] = true;
    }

    let mut hull: Vec<usize> = (0..count).filter(|&i| resolved[i]).collect();
    if hull.is_empty() {
        // the lexicographically smallest point is always a vertex
        let lexmin = (0..count)
            .min_by(|&a, &b| points[a].cmp(&points[b]))
            .expect("nonempty cloud");
        flags[lexmin] = true;
        resolved[lexmin] = true;
        hull.push(lexmin);
    }

    for p in 0..count {
        if resolved[p] {
            continue;
        }
        loop {
            let problem = membership(&points[p], &hull, points);
            match lp_feasible(&problem)? {
                Feasibility::Feasible { .. } => {
                    resolved[p] = true;
                    break;
                }
                Feasibility::Infeasible { farkas } => {
                    // c separates p strictly below the certified hull; its
                    // argmin face of the full cloud yields a new vertex
                    let c: Vec<Rational> = farkas[..dim].iter().map(|y| -y).collect();
                    let values: Vec<Rational> =
                        points.par_iter().map(|x| super::dot(&c, x)).collect();
                    let min = values.iter().min().expect("nonempty cloud").clone();
                    debug_assert!(min <= values[p]);
                    let q = (0..count)
                        .filter(|&i| values[i] == min)
                        .min_by(|&a, &b| points[a].cmp(&points[b]))
                        .expect("argmin nonempty");
                    flags[q] = true;
                    resolved[q] = true;
                    hull.push(q);
                    if q == p {
                        break;
                    }
                }
            }
        }
    }
    Ok(flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_i64};
    use crate::polytopes::is_extreme_among;

    fn pt(coords: &[i64]) -> Vec<Rational> {
        coords.iter().map(|&v| rat_i64(v)).collect()
    }

    #[test]
    fn square_with_interior_points() {
        let points = vec![
            pt(&[0, 0]),
            pt(&[2, 0]),
            pt(&[0, 2]),
            pt(&[2, 2]),
            pt(&[1, 1]),
            vec![rat(1, 2), rat(1, 2)],
            pt(&[1, 0]), // edge midpoint
        ];
        let flags = extreme_flags(&points).unwrap();
        assert_eq!(flags, vec![true, true, true, true, false, false, false]);
    }

    #[test]
    fn agrees_with_per_point_lp() {
        // a cloud with collinear runs and interior points in 3 dimensions
        let points: Vec<Vec<Rational>> = vec![
            pt(&[0, 0, 0]),
            pt(&[3, 0, 0]),
            pt(&[0, 3, 0]),
            pt(&[0, 0, 3]),
            pt(&[1, 1, 1]),
            pt(&[1, 0, 0]),
            pt(&[2, 0, 0]),
            pt(&[1, 1, 0]),
            pt(&[3, 3, 3]),
        ];
        let flags = extreme_flags(&points).unwrap();
        for (k, p) in points.iter().enumerate() {
            let others: Vec<Vec<Rational>> = points
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, q)| q.clone())
                .collect();
            assert_eq!(
                flags[k],
                is_extreme_among(p, &others).unwrap(),
                "point {k} disagrees"
            );
        }
    }

    #[test]
    fn all_vertices_of_simplex() {
        let points = vec![pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])];
        assert_eq!(extreme_flags(&points).unwrap(), vec![true; 3]);
    }

    #[test]
    fn one_dimensional_cloud() {
        let points = vec![pt(&[5]), pt(&[1]), pt(&[3]), pt(&[2])];
        assert_eq!(
            extreme_flags(&points).unwrap(),
            vec![true, true, false, false]
        );
    }
}
