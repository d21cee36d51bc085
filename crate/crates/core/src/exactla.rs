//! Exact rational scalars and dense matrices with rank, nullspace and
//! linear solving via fraction-free (Bareiss) elimination.
//!
//! Rationals are `num_rational::BigRational`, which keeps gcd-reduced
//! numerators and positive denominators, so the `Rat` invariants hold by
//! construction.  Elimination is done on denominator-cleared integer
//! copies; minors stay integers and the pivot rule is deterministic
//! (first nonzero in column order), so identical inputs give identical
//! echelon forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

/// Small rational constructor.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn rat_i(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rat>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = ExactMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ExactMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Put `other` to the right of `self`.
    pub fn hstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Exact rank via fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut e = IntEchelon::new(self);
        e.eliminate(self.cols);
        e.pivots.len()
    }

    /// Basis of the right nullspace; each vector satisfies `M v = 0` exactly.
    ///
    /// Vectors are scaled to coprime integers with positive leading entry.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rat>> {
        let mut e = IntEchelon::new(self);
        e.eliminate(self.cols);
        let pivot_cols: Vec<usize> = e.pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut x = vec![Rat::zero(); self.cols];
            x[f] = Rat::one();
            for &(pr, pc) in e.pivots.iter().rev() {
                let mut acc = Rat::zero();
                for j in (pc + 1)..self.cols {
                    if !e.m[pr][j].is_zero() && !x[j].is_zero() {
                        acc += Rat::from_integer(e.m[pr][j].clone()) * &x[j];
                    }
                }
                x[pc] = -acc / Rat::from_integer(e.m[pr][pc].clone());
            }
            basis.push(normalize_vec(x));
        }
        basis
    }

    /// Solve `self * Z = targets` column by column, exactly.
    ///
    /// `self` must have independent columns.  If a target column is not in
    /// the column span, returns `ImageNotInCodomain` with its index.
    pub fn solve_batch(&self, targets: &ExactMatrix) -> Result<ExactMatrix> {
        assert_eq!(self.rows, targets.rows, "solve_batch shape");
        let aug = self.hstack(targets);
        let mut e = IntEchelon::new(&aug);
        e.eliminate(self.cols);
        if e.pivots.len() < self.cols {
            return Err(Error::SingularMatrix);
        }
        // Consistency: every row below the pivot rows must have a zero
        // right-hand part as well.
        for r in e.pivots.len()..aug.rows {
            for (q, j) in (self.cols..aug.cols).enumerate() {
                if !e.m[r][j].is_zero() {
                    return Err(Error::ImageNotInCodomain {
                        element: q,
                        detail: "residual after elimination".into(),
                    });
                }
            }
        }
        let q = targets.cols;
        let mut out = ExactMatrix::zeros(self.cols, q);
        for t in 0..q {
            let tc = self.cols + t;
            for &(pr, pc) in e.pivots.iter().rev() {
                let mut acc = Rat::from_integer(e.m[pr][tc].clone());
                for j in (pc + 1)..self.cols {
                    if !e.m[pr][j].is_zero() && !out[(j, t)].is_zero() {
                        acc -= Rat::from_integer(e.m[pr][j].clone()) * &out[(j, t)];
                    }
                }
                out[(pc, t)] = acc / Rat::from_integer(e.m[pr][pc].clone());
            }
        }
        Ok(out)
    }

    /// Indices of a maximal independent subset of columns, chosen greedily
    /// in column order (deterministic).
    pub fn independent_columns(&self) -> Vec<usize> {
        let mut e = IntEchelon::new(self);
        e.eliminate(self.cols);
        e.pivots.iter().map(|&(_, c)| c).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

fn normalize_vec(v: Vec<Rat>) -> Vec<Rat> {
    let mut lcm = BigInt::one();
    for x in &v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
    }
    ints.into_iter().map(Rat::from_integer).collect()
}

/// Fraction-free echelon state over cleared-denominator integer rows.
struct IntEchelon {
    m: Vec<Vec<BigInt>>,
    pivots: Vec<(usize, usize)>,
}

impl IntEchelon {
    fn new(a: &ExactMatrix) -> Self {
        let m = (0..a.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for x in a.row(i) {
                    if !x.is_zero() {
                        lcm = lcm.lcm(x.denom());
                    }
                }
                a.row(i)
                    .iter()
                    .map(|x| {
                        if x.is_zero() {
                            BigInt::zero()
                        } else {
                            (x * Rat::from_integer(lcm.clone())).to_integer()
                        }
                    })
                    .collect()
            })
            .collect();
        IntEchelon { m, pivots: Vec::new() }
    }

    /// Bareiss elimination restricted to pivots among the first
    /// `pivot_cols` columns; rows keep their full width.
    fn eliminate(&mut self, pivot_cols: usize) {
        let rows = self.m.len();
        let cols = self.m.first().map_or(0, |r| r.len());
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..pivot_cols.min(cols) {
            if r >= rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.m[i][c].is_zero()) else {
                continue;
            };
            self.m.swap(r, pr);
            let (top, rest) = self.m.split_at_mut(r + 1);
            let prow = &top[r];
            let p = prow[c].clone();
            let prev_ref = &prev;
            let apply = |row: &mut Vec<BigInt>| {
                let factor = std::mem::replace(&mut row[c], BigInt::zero());
                if factor.is_zero() {
                    for x in row.iter_mut().skip(c + 1) {
                        if !x.is_zero() {
                            *x = &(&*x * &p) / prev_ref;
                        }
                    }
                } else {
                    for (x, top_x) in row.iter_mut().zip(prow.iter()).skip(c + 1) {
                        let mut t = &*x * &p;
                        if !top_x.is_zero() {
                            t -= &factor * top_x;
                        }
                        *x = t / prev_ref;
                    }
                }
            };
            if rest.len() >= 8 && cols >= 64 {
                rest.par_iter_mut().for_each(apply);
            } else {
                rest.iter_mut().for_each(apply);
            }
            self.pivots.push((r, c));
            prev = p;
            r += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(ExactMatrix::identity(3).rank(), 3);
        assert_eq!(ExactMatrix::zeros(2, 3).rank(), 0);
    }

    #[test]
    fn nullspace_simple() {
        assert!(ExactMatrix::identity(4).nullspace_basis().is_empty());
        let m = ExactMatrix::from_rows(vec![vec![rat_i(1), rat_i(-1)]]);
        let ns = m.nullspace_basis();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![rat_i(1), rat_i(1)]);
    }

    #[test]
    fn rank_nullity_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..8);
            let m = ExactMatrix::from_fn(rows, cols, |_, _| {
                rat(rng.gen_range(-4..5), rng.gen_range(1..5))
            });
            let r = m.rank();
            let ns = m.nullspace_basis();
            assert_eq!(r + ns.len(), cols);
            for v in &ns {
                assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            // rank invariant under transpose and row scaling
            assert_eq!(m.transpose().rank(), r);
            let scaled = ExactMatrix::from_fn(rows, cols, |i, j| &m[(i, j)] * rat_i(3 + i as i64));
            assert_eq!(scaled.rank(), r);
        }
    }

    #[test]
    fn solve_and_membership() {
        // columns span a 2-dim subspace of R^3
        let c = ExactMatrix::from_columns(&[
            vec![rat_i(1), rat_i(0), rat_i(1)],
            vec![rat_i(0), rat_i(2), rat_i(1)],
        ]);
        let t_in = ExactMatrix::from_columns(&[vec![rat_i(2), rat_i(2), rat_i(3)]]);
        let z = c.solve_batch(&t_in).unwrap();
        assert_eq!(z[(0, 0)], rat_i(2));
        assert_eq!(z[(1, 0)], rat_i(1));
        let t_out = ExactMatrix::from_columns(&[vec![rat_i(1), rat_i(0), rat_i(0)]]);
        assert!(matches!(
            c.solve_batch(&t_out),
            Err(Error::ImageNotInCodomain { element: 0, .. })
        ));
    }

    #[test]
    fn independent_columns_picks_first() {
        let m = ExactMatrix::from_columns(&[
            vec![rat_i(1), rat_i(0)],
            vec![rat_i(2), rat_i(0)],
            vec![rat_i(0), rat_i(1)],
        ]);
        assert_eq!(m.independent_columns(), vec![0, 2]);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-9i64..10, 1i64..8).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..6, 1usize..6)
            .prop_flat_map(|(r, c)| {
                proptest::collection::vec(arb_rat(), r * c).prop_map(move |data| {
                    ExactMatrix::from_fn(r, c, |i, j| data[i * c + j].clone())
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_plus_nullity_is_cols(m in arb_matrix()) {
            let r = m.rank();
            let ns = m.nullspace_basis();
            prop_assert_eq!(r + ns.len(), m.cols);
            for v in &ns {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn rank_invariant_under_transpose_and_scaling(m in arb_matrix(), s in 1i64..5) {
            let r = m.rank();
            prop_assert_eq!(m.transpose().rank(), r);
            let scaled = ExactMatrix::from_fn(m.rows, m.cols, |i, j| &m[(i, j)] * rat_i(s));
            prop_assert_eq!(scaled.rank(), r);
        }

        #[test]
        fn matmul_rank_bound(a in arb_matrix(), b in arb_matrix()) {
            if a.cols == b.rows {
                let p = a.matmul(&b);
                prop_assert!(p.rank() <= a.rank().min(b.rank()));
            }
        }
    }
}
