use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Rational;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        RatMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .fold(Rational::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    /// Columns `sel` gathered into a new matrix, in the given order.
    pub fn select_columns(&self, sel: &[usize]) -> RatMatrix {
        let mut data = Vec::with_capacity(self.rows * sel.len());
        for r in 0..self.rows {
            for &c in sel {
                data.push(self.get(r, c).clone());
            }
        }
        RatMatrix::new(self.rows, sel.len(), data)
    }
}

/// Clears denominators row by row, preserving row space (and hence rank).
fn integer_rows(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| {
            let mut lcm = BigInt::one();
            for v in m.row(r) {
                lcm = lcm.lcm(v.denom());
            }
            m.row(r)
                .iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect()
}

/// Exact rank by fraction-free (Bareiss) Gaussian elimination on the
/// denominator-cleared rows. Division by the previous pivot is exact at
/// every step, which keeps intermediate entries at minor-determinant size.
pub fn rank(m: &RatMatrix) -> usize {
    let mut a = integer_rows(m);
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pivot_row = (r..rows).find(|&i| !a[i][c].is_zero());
        let Some(p) = pivot_row else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = t / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Row indices of a maximal linearly independent set of rows, in order.
pub fn independent_rows(m: &RatMatrix) -> Vec<usize> {
    let mut a = integer_rows(m);
    let rows = m.rows();
    let cols = m.cols();
    let mut order: Vec<usize> = (0..rows).collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut picked = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pivot_row = (r..rows).find(|&i| !a[i][c].is_zero());
        let Some(p) = pivot_row else { continue };
        a.swap(r, p);
        order.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = t / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        picked.push(order[r]);
        r += 1;
    }
    picked.sort_unstable();
    picked
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(Vec<Rational>),
    Singular,
}

/// Exact solution of the square system `M x = b`, or `Singular` when
/// `det M = 0`. Plain rational Gauss–Jordan; the systems this crate solves
/// are small (at most the number of states on a side).
pub fn solve_square(m: &RatMatrix, b: &[Rational]) -> SolveOutcome {
    assert_eq!(m.rows(), m.cols(), "solve_square needs a square matrix");
    assert_eq!(b.len(), m.rows());
    let n = m.rows();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rational> = m.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return SolveOutcome::Singular;
        };
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=n {
                    let t = &a[c][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
    }
    SolveOutcome::Solution(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Solves `M x = b` over i128 via fraction-free elimination after the caller
/// cleared denominators. Returns `None` on overflow (caller falls back to
/// the exact big-rational path) and `Some(Singular)` on a zero determinant.
/// The arithmetic is exact integer arithmetic; this is purely a fast path.
pub fn solve_square_i128(m: &[i128], n: usize, b: &[i128]) -> Option<SolveOutcome> {
    debug_assert_eq!(m.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut a = vec![0i128; n * (n + 1)];
    for r in 0..n {
        a[r * (n + 1)..r * (n + 1) + n].copy_from_slice(&m[r * n..(r + 1) * n]);
        a[r * (n + 1) + n] = b[r];
    }
    let w = n + 1;
    let mut prev: i128 = 1;
    let mut sign = 1i128;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i * w + c] != 0) else {
            return Some(SolveOutcome::Singular);
        };
        if p != c {
            for j in 0..w {
                a.swap(c * w + j, p * w + j);
            }
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..w {
                let t = a[c * w + c].checked_mul(a[i * w + j])?;
                let u = a[i * w + c].checked_mul(a[c * w + j])?;
                let num = t.checked_sub(u)?;
                a[i * w + j] = num / prev; // exact by Bareiss
            }
            a[i * w + c] = 0;
        }
        prev = a[c * w + c];
    }
    // back substitution: after Bareiss, a[c][c] are leading minors; solve
    // the triangular system exactly in rationals built from i128 values.
    let det = a[(n - 1) * w + n - 1];
    debug_assert!(det != 0);
    let _ = sign;
    let mut x = vec![Rational::zero(); n];
    for c in (0..n).rev() {
        let mut num = Rational::from(BigInt::from(a[c * w + n]));
        for j in c + 1..n {
            num -= Rational::from(BigInt::from(a[c * w + j])) * &x[j];
        }
        x[c] = num / Rational::from(BigInt::from(a[c * w + c]));
    }
    Some(SolveOutcome::Solution(x))
}

/// True when every entry of `x` solves `M x = b` exactly.
pub fn verify_solution(m: &RatMatrix, x: &[Rational], b: &[Rational]) -> bool {
    m.mul_vec(x) == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_i64};

    fn m(rows: &[&[(i64, i64)]]) -> RatMatrix {
        RatMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_identity() {
        assert_eq!(rank(&RatMatrix::identity(3)), 3);
    }

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(rank(&RatMatrix::zero(2, 4)), 0);
    }

    #[test]
    fn rank_coupling_matrix_two_two() {
        // [[1, 1/2, 0], [0, 1/2, 1]]
        let a = m(&[&[(1, 1), (1, 2), (0, 1)], &[(0, 1), (1, 2), (1, 1)]]);
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn solve_identity() {
        let sol = solve_square(&RatMatrix::identity(2), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(sol, SolveOutcome::Solution(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn solve_singular() {
        let a = m(&[&[(1, 1), (1, 1)], &[(1, 1), (1, 1)]]);
        assert_eq!(
            solve_square(&a, &[rat_i64(1), rat_i64(0)]),
            SolveOutcome::Singular
        );
    }

    #[test]
    fn solve_back_substitution() {
        // [[1, 1/2], [0, 1/2]] x = (1/2, 1/2) -> (0, 1)
        let a = m(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]);
        assert_eq!(
            solve_square(&a, &[rat(1, 2), rat(1, 2)]),
            SolveOutcome::Solution(vec![rat_i64(0), rat_i64(1)])
        );
    }

    #[test]
    fn i128_path_agrees() {
        // 3x3 integer system solved both ways
        let a = m(&[
            &[(2, 1), (1, 1), (0, 1)],
            &[(1, 1), (3, 1), (1, 1)],
            &[(0, 1), (1, 1), (2, 1)],
        ]);
        let b = [rat_i64(3), rat_i64(5), rat_i64(3)];
        let ai: Vec<i128> = vec![2, 1, 0, 1, 3, 1, 0, 1, 2];
        let bi: Vec<i128> = vec![3, 5, 3];
        let fast = solve_square_i128(&ai, 3, &bi).unwrap();
        let slow = solve_square(&a, &b);
        assert_eq!(fast, slow);
        if let SolveOutcome::Solution(x) = slow {
            assert!(verify_solution(&a, &x, &b));
        }
    }

    #[test]
    fn i128_singular() {
        let ai: Vec<i128> = vec![1, 1, 1, 1];
        assert_eq!(
            solve_square_i128(&ai, 2, &[1, 0]),
            Some(SolveOutcome::Singular)
        );
    }
}
