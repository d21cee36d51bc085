//! Arbitrary-precision floating matrices (MPFR-backed) with LU solving
//! and guaranteed extreme-singular-value bounds.
//!
//! Singular values are located by Householder bidiagonalization followed
//! by Sturm-count bisection on the Golub-Kahan tridiagonal, so
//! `min_max_singular` returns enclosures that are reliable for the huge
//! accept/reject gaps this crate deals in (~1e-70 vs O(1)).

use num_traits::Signed;
use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::{Assign, Float, Integer};

use crate::error::{Error, Result};
use crate::exactla::Rat;

pub type BigF = Float;

/// Zero at the given precision.
pub fn bf0(prec: u32) -> BigF {
    Float::new(prec)
}

pub fn bf(prec: u32, v: f64) -> BigF {
    Float::with_val(prec, v)
}

pub fn bf_i(prec: u32, v: i64) -> BigF {
    Float::with_val(prec, v)
}

fn to_rug_int(x: &num_bigint::BigInt) -> Integer {
    let digits = x.to_u64_digits().1;
    let mut v = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if x.is_negative() {
        v = -v;
    }
    v
}

/// Exact rational rounded once to `prec` bits.
pub fn bf_rat(prec: u32, r: &Rat) -> BigF {
    let q = rug::Rational::from((to_rug_int(r.numer()), to_rug_int(r.denom())));
    Float::with_val(prec, q)
}

pub fn dot(prec: u32, a: &[BigF], b: &[BigF]) -> BigF {
    let mut acc = bf0(prec);
    let mut tmp = bf0(prec);
    for (x, y) in a.iter().zip(b.iter()) {
        tmp.assign(x);
        tmp *= y;
        acc += &tmp;
    }
    acc
}

/// Dense row-major matrix of `prec`-bit floats.
#[derive(Clone, Debug)]
pub struct BigFloatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub prec: u32,
    data: Vec<BigF>,
}

impl BigFloatMatrix {
    pub fn zeros(prec: u32, rows: usize, cols: usize) -> Self {
        BigFloatMatrix {
            rows,
            cols,
            prec,
            data: (0..rows * cols).map(|_| bf0(prec)).collect(),
        }
    }

    pub fn from_fn(prec: u32, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigF) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        BigFloatMatrix { rows, cols, prec, data }
    }

    pub fn identity(prec: u32, n: usize) -> Self {
        let mut m = Self::zeros(prec, n, n);
        for i in 0..n {
            m[(i, i)] = bf_i(prec, 1);
        }
        m
    }

    pub fn row(&self, i: usize) -> &[BigF] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.prec, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let p = self.prec;
        let rows: Vec<Vec<BigF>> = (0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::with_capacity(other.cols);
                let mut tmp = bf0(p);
                for j in 0..other.cols {
                    let mut acc = bf0(p);
                    for k in 0..self.cols {
                        tmp.assign(&self[(i, k)]);
                        tmp *= &other[(k, j)];
                        acc += &tmp;
                    }
                    out.push(acc);
                }
                out
            })
            .collect();
        BigFloatMatrix {
            rows: self.rows,
            cols: other.cols,
            prec: p,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn mul_vec(&self, v: &[BigF]) -> Vec<BigF> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.prec, self.row(i), v)).collect()
    }

    pub fn max_abs(&self) -> BigF {
        let mut m = bf0(self.prec);
        for x in &self.data {
            let a = x.clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// LU with partial pivoting; returns the factorization for repeated solves.
    pub fn lu(&self) -> Result<Lu> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("lu of non-square matrix".into()));
        }
        let n = self.rows;
        let p = self.prec;
        let mut a: Vec<Vec<BigF>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut tmp = bf0(p);
        for k in 0..n {
            let mut best = k;
            let mut best_abs = a[k][k].clone().abs();
            for i in (k + 1)..n {
                let v = a[i][k].clone().abs();
                if v > best_abs {
                    best_abs = v;
                    best = i;
                }
            }
            if best_abs.is_zero() {
                return Err(Error::SingularMatrix);
            }
            a.swap(k, best);
            perm.swap(k, best);
            let (top, rest) = a.split_at_mut(k + 1);
            let pivot_row = &top[k];
            let piv = pivot_row[k].clone();
            if rest.len() > 8 && n > 64 {
                rest.par_iter_mut().for_each(|row| {
                    let mut t = Float::new(p);
                    let mut factor = row[k].clone();
                    factor /= &piv;
                    for (x, px) in row.iter_mut().zip(pivot_row.iter()).skip(k + 1) {
                        t.assign(&factor);
                        t *= px;
                        *x -= &t;
                    }
                    row[k] = factor;
                });
            } else {
                for row in rest.iter_mut() {
                    let mut factor = row[k].clone();
                    factor /= &piv;
                    for (x, px) in row.iter_mut().zip(pivot_row.iter()).skip(k + 1) {
                        tmp.assign(&factor);
                        tmp *= px;
                        *x -= &tmp;
                    }
                    row[k] = factor;
                }
            }
        }
        Ok(Lu { a, perm, prec: p })
    }

    /// Solve `self * X = rhs` via LU.
    pub fn solve_mat(&self, rhs: &BigFloatMatrix) -> Result<BigFloatMatrix> {
        let lu = self.lu()?;
        let cols: Vec<Vec<BigF>> = (0..rhs.cols)
            .into_par_iter()
            .map(|j| {
                let b: Vec<BigF> = (0..rhs.rows).map(|i| rhs[(i, j)].clone()).collect();
                lu.solve(&b)
            })
            .collect();
        let mut out = BigFloatMatrix::zeros(self.prec, self.rows, rhs.cols);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, j)] = col[i].clone();
            }
        }
        Ok(out)
    }

    /// Householder bidiagonalization of the tall form of the matrix;
    /// returns the main diagonal and superdiagonal.
    fn bidiagonalize(&self) -> (Vec<BigF>, Vec<BigF>) {
        let (m, n) = (self.rows.max(self.cols), self.rows.min(self.cols));
        let p = self.prec;
        if n == 0 {
            return (Vec::new(), Vec::new());
        }
        // column-major copy of the tall orientation
        let mut a: Vec<Vec<BigF>> = if self.rows >= self.cols {
            (0..n).map(|j| (0..m).map(|i| self[(i, j)].clone()).collect()).collect()
        } else {
            (0..n).map(|j| (0..m).map(|i| self[(j, i)].clone()).collect()).collect()
        };
        let mut d = Vec::with_capacity(n);
        let mut e = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n {
            // left Householder: zero column k below row k
            let alpha = house_apply_left(p, &mut a, k, m, n);
            d.push(alpha);
            if k + 1 < n {
                // right Householder: zero row k beyond column k+1
                let beta = house_apply_right(p, &mut a, k, m, n);
                e.push(beta);
            }
        }
        (d, e)
    }

    /// Guaranteed enclosing values for the extreme singular values.
    ///
    /// Both returned values carry a relative error of at most 2^(-prec/2).
    pub fn min_max_singular(&self) -> Result<(BigF, BigF)> {
        if !self.all_finite() {
            return Err(Error::NonFinite);
        }
        let p = self.prec;
        if self.rows == 0 || self.cols == 0 {
            return Ok((bf0(p), bf0(p)));
        }
        let (d, e) = self.bidiagonalize();
        let st = Sturm::new(p, &d, &e);
        let smax = st.bisect_max();
        let smin = st.bisect_kth_from_below(1, &smax);
        Ok((smin, smax))
    }

    /// Floating rank with the pinned accept threshold and gap demand.
    ///
    /// Singular values below `eps * max(1, sigma_max)` are rejected; the
    /// decision requires `accepted / rejected >= gap`, otherwise the caller
    /// should escalate precision and this returns `RankGap`.
    pub fn rank_gap(&self, eps: f64, gap: f64) -> Result<usize> {
        if !self.all_finite() {
            return Err(Error::NonFinite);
        }
        let p = self.prec;
        let n = self.rows.min(self.cols);
        if n == 0 {
            return Ok(0);
        }
        let (d, e) = self.bidiagonalize();
        let st = Sturm::new(p, &d, &e);
        let smax = st.bisect_max();
        let mut thresh = bf(p, eps);
        if smax > 1 {
            thresh *= &smax;
        }
        if smax.is_zero() {
            return Ok(0);
        }
        let below = st.count_lt(&thresh);
        let r = n - below;
        if below > 0 && r > 0 {
            let rejected = st.bisect_kth_from_below(below, &thresh);
            let accepted = st.bisect_kth_from_below(below + 1, &smax);
            let mut need = rejected.clone();
            need *= gap;
            if accepted < need {
                return Err(Error::RankGap {
                    accepted: accepted.to_f64(),
                    rejected: rejected.to_f64(),
                });
            }
        }
        Ok(r)
    }

    /// Nullspace basis given an already-decided rank.
    ///
    /// Gauss elimination with full pivoting; basis vectors are scaled to a
    /// unit max entry.  Residuals `‖Mv‖` should be checked by the caller
    /// against its tolerance.
    pub fn nullspace(&self, rank: usize) -> Vec<Vec<BigF>> {
        let p = self.prec;
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<Vec<BigF>> = (0..m).map(|i| self.row(i).to_vec()).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut tmp = bf0(p);
        for k in 0..rank {
            let mut best = (k, k);
            let mut best_abs = bf0(p);
            for i in k..m {
                for j in k..n {
                    let v = a[i][j].clone().abs();
                    if v > best_abs {
                        best_abs = v;
                        best = (i, j);
                    }
                }
            }
            a.swap(k, best.0);
            for row in a.iter_mut() {
                row.swap(k, best.1);
            }
            col_perm.swap(k, best.1);
            let (top, rest) = a.split_at_mut(k + 1);
            let prow = &top[k];
            let piv = prow[k].clone();
            for row in rest.iter_mut() {
                let mut factor = row[k].clone();
                factor /= &piv;
                for (x, px) in row.iter_mut().zip(prow.iter()).skip(k) {
                    tmp.assign(&factor);
                    tmp *= px;
                    *x -= &tmp;
                }
            }
        }
        // back-substitution on the top-left rank x rank triangle
        let mut basis = Vec::new();
        for f in rank..n {
            let mut y = vec![bf0(p); n];
            y[f] = bf_i(p, 1);
            for k in (0..rank).rev() {
                let mut acc = bf0(p);
                for j in (k + 1)..n {
                    if !y[j].is_zero() {
                        tmp.assign(&a[k][j]);
                        tmp *= &y[j];
                        acc += &tmp;
                    }
                }
                acc /= &a[k][k];
                acc = -acc;
                y[k] = acc;
            }
            let mut v = vec![bf0(p); n];
            for (pos, &orig) in col_perm.iter().enumerate() {
                v[orig] = y[pos].clone();
            }
            let mut scale = bf0(p);
            for x in &v {
                let ax = x.clone().abs();
                if ax > scale {
                    scale = ax;
                }
            }
            for x in v.iter_mut() {
                *x /= &scale;
            }
            basis.push(v);
        }
        basis
    }
}

impl BigFloatMatrix {
    /// Scale rows then columns to unit max magnitude (skipping zero
    /// lines).  Returns the equilibrated copy; the rank and the
    /// nonsingularity of square matrices are unchanged.
    pub fn equilibrated(&self) -> BigFloatMatrix {
        let p = self.prec;
        let mut m = self.clone();
        for i in 0..m.rows {
            let mut s = bf0(p);
            for j in 0..m.cols {
                let a = m[(i, j)].clone().abs();
                if a > s {
                    s = a;
                }
            }
            if !s.is_zero() {
                for j in 0..m.cols {
                    m[(i, j)] /= &s;
                }
            }
        }
        for j in 0..m.cols {
            let mut s = bf0(p);
            for i in 0..m.rows {
                let a = m[(i, j)].clone().abs();
                if a > s {
                    s = a;
                }
            }
            if !s.is_zero() {
                for i in 0..m.rows {
                    m[(i, j)] /= &s;
                }
            }
        }
        m
    }
}

impl BigFloatMatrix {
    /// Greedy independent column subset in column order, with the pinned
    /// threshold/gap safeguards.  Accepted columns have elimination
    /// pivots at least `eps * scale`; the decision demands the usual gap
    /// between the smallest accepted and largest rejected pivot.
    pub fn independent_columns_gap(&self, eps: f64, gap: f64) -> Result<Vec<usize>> {
        let p = self.prec;
        let mut work: Vec<Vec<BigF>> = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].clone()).collect())
            .collect();
        let scale = self.max_abs();
        if scale.is_zero() {
            return Ok(Vec::new());
        }
        let mut thresh = bf(p, eps);
        thresh *= &scale;
        let mut pivots: Vec<(usize, usize, BigF)> = Vec::new(); // (col, row, |pivot|)
        let mut rejected_max = bf0(p);
        let mut used_rows: Vec<usize> = Vec::new();
        let mut tmp = bf0(p);
        for j in 0..self.cols {
            // eliminate against previous pivots
            for &(pc, pr, _) in &pivots {
                let factor = {
                    let mut f = work[j][pr].clone();
                    f /= &work[pc][pr];
                    f
                };
                if factor.is_zero() {
                    continue;
                }
                let (left, right) = if pc < j {
                    let (a, b) = work.split_at_mut(j);
                    (&a[pc], &mut b[0])
                } else {
                    unreachable!("pivot columns precede j")
                };
                for i in 0..self.rows {
                    tmp.assign(&factor);
                    tmp *= &left[i];
                    right[i] -= &tmp;
                }
            }
            // best remaining row
            let mut best_row = None;
            let mut best = bf0(p);
            for i in 0..self.rows {
                if used_rows.contains(&i) {
                    continue;
                }
                let a = work[j][i].clone().abs();
                if a > best {
                    best = a;
                    best_row = Some(i);
                }
            }
            match best_row {
                Some(r) if best >= thresh => {
                    used_rows.push(r);
                    pivots.push((j, r, best));
                }
                _ => {
                    if best > rejected_max {
                        rejected_max = best;
                    }
                }
            }
        }
        if !rejected_max.is_zero() {
            let mut smallest = scale.clone();
            for (_, _, b) in &pivots {
                if *b < smallest {
                    smallest = b.clone();
                }
            }
            let mut need = rejected_max.clone();
            need *= gap;
            if smallest < need {
                return Err(Error::RankGap {
                    accepted: smallest.to_f64(),
                    rejected: rejected_max.to_f64(),
                });
            }
        }
        Ok(pivots.into_iter().map(|(c, _, _)| c).collect())
    }
}

impl std::ops::Index<(usize, usize)> for BigFloatMatrix {
    type Output = BigF;
    fn index(&self, (i, j): (usize, usize)) -> &BigF {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for BigFloatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigF {
        &mut self.data[i * self.cols + j]
    }
}

pub struct Lu {
    a: Vec<Vec<BigF>>,
    perm: Vec<usize>,
    prec: u32,
}

impl Lu {
    pub fn solve(&self, b: &[BigF]) -> Vec<BigF> {
        let n = self.a.len();
        let p = self.prec;
        let mut y: Vec<BigF> = self.perm.iter().map(|&i| b[i].clone()).collect();
        let mut tmp = bf0(p);
        for i in 1..n {
            let (done, rest) = y.split_at_mut(i);
            let yi = &mut rest[0];
            for (j, yj) in done.iter().enumerate() {
                tmp.assign(&self.a[i][j]);
                tmp *= yj;
                *yi -= &tmp;
            }
        }
        for i in (0..n).rev() {
            let mut acc = y[i].clone();
            for j in (i + 1)..n {
                tmp.assign(&self.a[i][j]);
                tmp *= &y[j];
                acc -= &tmp;
            }
            acc /= &self.a[i][i];
            y[i] = acc;
        }
        y
    }
}

fn house_apply_left(p: u32, a: &mut [Vec<BigF>], k: usize, m: usize, n: usize) -> BigF {
    // reflect column k (rows k..m) onto +/- alpha * e_k
    let mut norm2 = bf0(p);
    let mut tmp = bf0(p);
    for i in k..m {
        tmp.assign(&a[k][i]);
        tmp.square_mut();
        norm2 += &tmp;
    }
    let norm = norm2.clone().sqrt();
    if norm.is_zero() {
        return bf0(p);
    }
    let alpha = if a[k][k].is_sign_negative() { norm.clone() } else { -norm.clone() };
    // v = x - alpha e_k, beta = 2 / v'v ; v'v = 2(norm^2 - alpha x_k)
    let mut vk = a[k][k].clone();
    vk -= &alpha;
    let mut vtv = bf0(p);
    vtv.assign(&alpha);
    vtv *= &a[k][k];
    vtv = (&norm2 - &vtv).complete(p);
    vtv *= 2u32;
    if vtv.is_zero() {
        return alpha;
    }
    // store v in place of the column (x_k -> vk)
    a[k][k] = vk;
    let vcol: Vec<BigF> = a[k][k..m].to_vec();
    let hi = n.min(a.len());
    let cols = &mut a[k + 1..hi];
    let apply = |col: &mut Vec<BigF>| {
        let mut s = bf0(p);
        let mut t = bf0(p);
        for (vi, ci) in vcol.iter().zip(col[k..m].iter()) {
            t.assign(vi);
            t *= ci;
            s += &t;
        }
        s *= 2u32;
        s /= &vtv;
        for (vi, ci) in vcol.iter().zip(col[k..m].iter_mut()) {
            t.assign(vi);
            t *= &s;
            *ci -= &t;
        }
    };
    if cols.len() > 8 && m > 64 {
        cols.par_iter_mut().for_each(apply);
    } else {
        cols.iter_mut().for_each(apply);
    }
    alpha
}

fn house_apply_right(p: u32, a: &mut [Vec<BigF>], k: usize, m: usize, n: usize) -> BigF {
    // reflect row k (columns k+1..n) onto +/- beta * e_{k+1}
    let mut norm2 = bf0(p);
    let mut tmp = bf0(p);
    for j in (k + 1)..n {
        tmp.assign(&a[j][k]);
        tmp.square_mut();
        norm2 += &tmp;
    }
    let norm = norm2.clone().sqrt();
    if norm.is_zero() {
        return bf0(p);
    }
    let beta = if a[k + 1][k].is_sign_negative() { norm.clone() } else { -norm.clone() };
    let mut v1 = a[k + 1][k].clone();
    v1 -= &beta;
    let mut vtv = bf0(p);
    vtv.assign(&beta);
    vtv *= &a[k + 1][k];
    vtv = (&norm2 - &vtv).complete(p);
    vtv *= 2u32;
    if vtv.is_zero() {
        return beta;
    }
    a[k + 1][k] = v1;
    let v: Vec<BigF> = ((k + 1)..n).map(|j| a[j][k].clone()).collect();
    // apply to rows k+1..m of the columns k+1..n
    let rows: Vec<usize> = ((k + 1)..m).collect();
    let updates: Vec<(usize, Vec<BigF>)> = rows
        .par_iter()
        .map(|&i| {
            let mut s = bf0(p);
            let mut t = bf0(p);
            for (off, j) in ((k + 1)..n).enumerate() {
                t.assign(&v[off]);
                t *= &a[j][i];
                s += &t;
            }
            s *= 2u32;
            s /= &vtv;
            let mut newvals = Vec::with_capacity(n - k - 1);
            for (off, j) in ((k + 1)..n).enumerate() {
                let mut x = a[j][i].clone();
                t.assign(&v[off]);
                t *= &s;
                x -= &t;
                newvals.push(x);
            }
            (i, newvals)
        })
        .collect();
    for (i, newvals) in updates {
        for (off, j) in ((k + 1)..n).enumerate() {
            a[j][i] = newvals[off].clone();
        }
    }
    beta
}

/// Sturm-count machinery on the Golub-Kahan tridiagonal of a bidiagonal
/// matrix: eigenvalues of the tridiagonal are +/- the singular values.
pub struct Sturm {
    prec: u32,
    z: Vec<BigF>,
    n: usize,
    upper: BigF,
}

impl Sturm {
    pub fn new(prec: u32, d: &[BigF], e: &[BigF]) -> Self {
        let n = d.len();
        let mut z = Vec::with_capacity(2 * n - 1);
        for i in 0..n {
            z.push(d[i].clone());
            if i + 1 < n {
                z.push(e[i].clone());
            }
        }
        // Gershgorin bound for the TGK tridiagonal (zero diagonal)
        let mut upper = bf0(prec);
        let len = z.len();
        for i in 0..len {
            let mut s = z[i].clone().abs();
            if i > 0 {
                s += z[i - 1].clone().abs();
            }
            if s > upper {
                upper = s;
            }
        }
        upper += 1u32;
        Sturm { prec, z, n, upper }
    }

    /// Number of singular values strictly below `t` (t > 0).
    pub fn count_lt(&self, t: &BigF) -> usize {
        let p = self.prec;
        let mut neg = 0usize;
        let mut u = bf0(p);
        let mut tiny = self.upper.clone();
        tiny >>= 3 * p;
        let mut tmp = bf0(p);
        u.assign(t);
        u = -u;
        if u.is_sign_negative() {
            neg += 1;
        }
        for zk in &self.z {
            tmp.assign(zk);
            tmp.square_mut();
            tmp /= &u;
            let mut next = t.clone();
            next = -next;
            next -= &tmp;
            if next.is_zero() {
                next.assign(&tiny);
                next = -next;
            }
            u = next;
            if u.is_sign_negative() {
                neg += 1;
            }
        }
        neg - self.n
    }

    /// Upper enclosure of the largest singular value.
    pub fn bisect_max(&self) -> BigF {
        let p = self.prec;
        let mut lo = bf0(p);
        let mut hi = self.upper.clone();
        let max_iter = (2 * p) as usize;
        for _ in 0..max_iter {
            let mut mid = (&lo + &hi).complete(p);
            mid >>= 1;
            if mid == lo || mid == hi {
                break;
            }
            if self.count_lt(&mid) == self.n {
                hi = mid;
            } else {
                lo = mid;
            }
            let gap = (&hi - &lo).complete(p);
            let mut tol = hi.clone();
            tol >>= p / 2 + 4;
            if gap <= tol {
                break;
            }
        }
        hi
    }

    /// Enclosure of the k-th smallest singular value (1-based) searching
    /// below the given upper bound.
    pub fn bisect_kth_from_below(&self, k: usize, hi0: &BigF) -> BigF {
        let p = self.prec;
        let mut lo = bf0(p);
        let mut hi = hi0.clone();
        hi *= 2u32;
        let max_iter = (2 * p) as usize;
        for _ in 0..max_iter {
            let mut mid = (&lo + &hi).complete(p);
            mid >>= 1;
            if mid == lo || mid == hi {
                break;
            }
            if self.count_lt(&mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
            let gap = (&hi - &lo).complete(p);
            let mut tol = hi.clone();
            tol >>= p / 2 + 4;
            if gap <= tol {
                break;
            }
            // the value is (numerically) zero
            let mut floor = self.upper.clone();
            floor >>= 2 * p;
            if hi <= floor {
                break;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn identity_singular_values() {
        let m = BigFloatMatrix::identity(tol::DEFAULT_PREC, 5);
        let (smin, smax) = m.min_max_singular().unwrap();
        assert!((smin.to_f64() - 1.0).abs() < 1e-30);
        assert!((smax.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn diag_singular_values() {
        let p = tol::DEFAULT_PREC;
        let mut m = BigFloatMatrix::zeros(p, 2, 2);
        m[(0, 0)] = bf(p, 2.0);
        m[(1, 1)] = bf(p, 0.5);
        let (smin, smax) = m.min_max_singular().unwrap();
        assert!((smin.to_f64() - 0.5).abs() < 1e-30);
        assert!((smax.to_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn known_rectangular() {
        // singular values of [[1,0,0],[0,1,1]] are 1 and sqrt(2)
        let p = tol::DEFAULT_PREC;
        let mut m = BigFloatMatrix::zeros(p, 2, 3);
        m[(0, 0)] = bf_i(p, 1);
        m[(1, 1)] = bf_i(p, 1);
        m[(1, 2)] = bf_i(p, 1);
        let (smin, smax) = m.min_max_singular().unwrap();
        assert!((smin.to_f64() - 1.0).abs() < 1e-30);
        assert!((smax.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rank_with_gap() {
        let p = tol::DEFAULT_PREC;
        let mut m = BigFloatMatrix::zeros(p, 3, 3);
        m[(0, 0)] = bf_i(p, 3);
        m[(1, 1)] = bf(p, 1e-3);
        // third row exactly dependent -> sigma ~ 0
        m[(2, 0)] = bf_i(p, 3);
        let r = m.rank_gap(tol::RANK_EPS, tol::RANK_GAP).unwrap();
        assert_eq!(r, 2);
        let ns = m.nullspace(r);
        assert_eq!(ns.len(), 1);
        let resid = m.mul_vec(&ns[0]);
        assert!(resid.iter().all(|x| x.clone().abs().to_f64() < 1e-70));
    }

    #[test]
    fn lu_solves() {
        let p = tol::DEFAULT_PREC;
        let mut m = BigFloatMatrix::zeros(p, 3, 3);
        let vals = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = bf(p, vals[i][j]);
            }
        }
        let rhs = BigFloatMatrix::identity(p, 3);
        let inv = m.solve_mat(&rhs).unwrap();
        let prod = m.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)].to_f64() - want).abs() < 1e-70);
            }
        }
    }
}
