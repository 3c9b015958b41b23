//! Small exact linear algebra over Z and Q for the polyhedral code.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type IVec = Vec<i64>;

pub fn to_q(v: &[i64]) -> Vec<BigRational> {
    v.iter()
        .map(|&x| BigRational::from_integer(x.into()))
        .collect()
}

pub fn dot_i(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of a list of integer vectors.
pub fn rank(vectors: &[IVec]) -> usize {
    let Some(n) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut rows: Vec<Vec<BigRational>> = vectors.iter().map(|v| to_q(v)).collect();
    let mut r = 0;
    for col in 0..n {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = &row[col] / &pivot_row[col];
                for (x, y) in row[col..n].iter_mut().zip(&pivot_row[col..n]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        k => (0..k)
            .map(|c| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det_i128(&minor)
            })
            .sum(),
    }
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> IVec {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / g).collect()
    }
}

/// Primitive integer vector orthogonal to `n - 1` vectors in Z^n (generalized
/// cross product), or `None` when they are linearly dependent.
pub fn integer_normal(vectors: &[IVec], n: usize) -> Option<IVec> {
    assert_eq!(vectors.len() + 1, n);
    if n == 1 {
        return Some(vec![1]);
    }
    let normal: Vec<i128> = (0..n)
        .map(|i| {
            let minor: Vec<Vec<i128>> = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x as i128)
                        .collect()
                })
                .collect();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            sign * det_i128(&minor)
        })
        .collect();
    if normal.iter().all(|&x| x == 0) {
        return None;
    }
    let g = normal.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    Some(normal.iter().map(|&x| (x / g) as i64).collect())
}

/// Component of `r` orthogonal to the span of `basis` (exact Gram-Schmidt).
pub fn orthogonal_component(basis: &[IVec], r: &[i64]) -> Vec<BigRational> {
    let mut ortho: Vec<Vec<BigRational>> = Vec::new();
    for b in basis {
        let mut u = to_q(b);
        for o in &ortho {
            let c = dot_q(&u, o) / dot_q(o, o);
            for (ui, oi) in u.iter_mut().zip(o) {
                *ui -= &c * oi;
            }
        }
        if u.iter().any(|x| !x.is_zero()) {
            ortho.push(u);
        }
    }
    let mut out = to_q(r);
    for o in &ortho {
        let c = dot_q(&out, o) / dot_q(o, o);
        for (xi, oi) in out.iter_mut().zip(o) {
            *xi -= &c * oi;
        }
    }
    out
}

/// Solves `sum_i lambda_i g_i = x` for linearly independent integer vectors `g_i`.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    gens: Vec<IVec>,
    rows: Vec<usize>,
    inverse: Vec<Vec<BigRational>>,
}

impl SpanSolver {
    /// `None` when the generators are linearly dependent.
    pub fn new(gens: &[IVec]) -> Option<Self> {
        let d = gens.len();
        let n = gens.first().map_or(0, Vec::len);
        // pick d coordinate rows giving an invertible d x d block
        let mut rows = Vec::new();
        for i in 0..n {
            let mut trial = rows.clone();
            trial.push(i);
            let block: Vec<IVec> = trial
                .iter()
                .map(|&r| gens.iter().map(|g| g[r]).collect())
                .collect();
            if rank(&block) == trial.len() {
                rows = trial;
            }
            if rows.len() == d {
                break;
            }
        }
        if rows.len() != d {
            return None;
        }
        // invert the block by Gauss-Jordan; block[r][c] = gens[c][rows[r]]
        let mut a: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|&r| {
                let mut row: Vec<BigRational> = gens
                    .iter()
                    .map(|g| BigRational::from_integer(g[r].into()))
                    .collect();
                row.extend((0..d).map(|_| BigRational::zero()));
                row
            })
            .collect();
        for (i, row) in a.iter_mut().enumerate() {
            row[d + i] = BigRational::from_integer(1.into());
        }
        for col in 0..d {
            let pivot = (col..d).find(|&i| !a[i][col].is_zero())?;
            a.swap(col, pivot);
            let pv = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x = &*x / &pv;
            }
            let pivot_row = a[col].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        let inverse = a.into_iter().map(|row| row[d..].to_vec()).collect();
        Some(SpanSolver {
            gens: gens.to_vec(),
            rows,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    /// Coordinates of `x` read off the chosen rows, ignoring the others.
    pub fn coords_from_rows(&self, sub: &[BigRational]) -> Vec<BigRational> {
        self.inverse.iter().map(|row| dot_q(row, sub)).collect()
    }

    /// Coefficients of `x` in the generators, or `None` when `x` is not in their span.
    pub fn solve(&self, x: &[i64]) -> Option<Vec<BigRational>> {
        let sub: Vec<BigRational> = self
            .rows
            .iter()
            .map(|&r| BigRational::from_integer(x[r].into()))
            .collect();
        let lambda = self.coords_from_rows(&sub);
        let back = self.combine(&lambda);
        let ok = back
            .iter()
            .zip(x)
            .all(|(b, &xi)| *b == BigRational::from_integer(xi.into()));
        ok.then_some(lambda)
    }

    pub fn combine(&self, lambda: &[BigRational]) -> Vec<BigRational> {
        let n = self.gens.first().map_or(0, Vec::len);
        (0..n)
            .map(|j| {
                self.gens
                    .iter()
                    .zip(lambda)
                    .map(|(g, l)| l * BigRational::from_integer(g[j].into()))
                    .sum()
            })
            .collect()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn gens(&self) -> &[IVec] {
        &self.gens
    }
}

/// Lexicographic sign of a sequence: the sign of its first nonzero entry.
pub fn lex_sign(seq: &[BigRational]) -> i8 {
    for x in seq {
        if x.is_positive() {
            return 1;
        }
        if x.is_negative() {
            return -1;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn cross_products() {
        assert_eq!(
            integer_normal(&[vec![1, 0, 0], vec![0, 1, 0]], 3),
            Some(vec![0, 0, 1])
        );
        assert_eq!(integer_normal(&[vec![-2, 2]], 2), Some(vec![1, 1]));
        assert_eq!(integer_normal(&[vec![1, 1],], 2), Some(vec![1, -1]));
        assert_eq!(integer_normal(&[vec![1, 1, 0], vec![2, 2, 0]], 3), None);
        assert_eq!(integer_normal(&[], 1), Some(vec![1]));
    }

    #[test]
    fn span_solver() {
        let s = SpanSolver::new(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let l = s.solve(&[2, 5, 3]).unwrap();
        assert_eq!(l, to_q(&[2, 3]));
        assert!(s.solve(&[1, 0, 0]).is_none());
        assert!(SpanSolver::new(&[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn orthogonal_components() {
        let c = orthogonal_component(&[vec![1, 1]], &[1, 0]);
        assert_eq!(
            c,
            vec![
                BigRational::new(1.into(), 2.into()),
                BigRational::new((-1).into(), 2.into())
            ]
        );
    }
}
