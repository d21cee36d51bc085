//! Pointwise matrix algebra on polynomial tensors: symmetric/skew/
//! deviatoric decompositions, the mskw/vskw isomorphism, and the
//! row/column dot and cross products.
//!
//! A vector crossed from the left acts column-wise, from the right
//! row-wise; the transpose rule `b x A = -(A^T x b)^T` then holds and the
//! triple products are associative.

use crate::error::{Error, Result};
use crate::exactla::Rat;
use crate::polyring::{Coeff, Poly};

/// Advisory tensor class; `classify` recomputes the tightest valid tag.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TensorClass {
    Scalar,
    Vector,
    Mat,
    Sym,
    Skw,
    /// Trace-free.
    Dev,
}

/// Dense matrix of polynomials (scalars are 1x1, vectors d x 1).
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMat<C: Coeff> {
    pub rows: usize,
    pub cols: usize,
    pub arity: usize,
    pub ctx: C::Ctx,
    pub entries: Vec<Poly<C>>,
    pub class: TensorClass,
}

pub type PolyMatR = PolyMat<Rat>;

impl<C: Coeff> PolyMat<C> {
    pub fn zeros(arity: usize, ctx: C::Ctx, rows: usize, cols: usize) -> Self {
        let entries = (0..rows * cols).map(|_| Poly::zero(arity, ctx)).collect();
        let mut m = PolyMat {
            rows,
            cols,
            arity,
            ctx,
            entries,
            class: TensorClass::Mat,
        };
        m.class = m.classify();
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly<C>>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let arity = entries[0].arity;
        let ctx = entries[0].ctx;
        assert!(entries.iter().all(|p| p.arity == arity));
        let mut m = PolyMat {
            rows,
            cols,
            arity,
            ctx,
            entries,
            class: TensorClass::Mat,
        };
        m.class = m.classify();
        m
    }

    pub fn from_vec(v: Vec<Poly<C>>) -> Self {
        let n = v.len();
        Self::from_entries(n, 1, v)
    }

    pub fn scalar(p: Poly<C>) -> Self {
        Self::from_entries(1, 1, vec![p])
    }

    /// Constant matrix lifted to polynomials.
    pub fn from_const(arity: usize, rows: usize, cols: usize, vals: Vec<C>) -> Self {
        assert_eq!(vals.len(), rows * cols);
        let entries = vals
            .into_iter()
            .map(|c| Poly::constant(arity, c))
            .collect();
        Self::from_entries(rows, cols, entries)
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Poly<C> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly<C>) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn row_vec(&self, i: usize) -> Vec<Poly<C>> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col_vec(&self, j: usize) -> Vec<Poly<C>> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|p| p.degree()).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries
            .iter()
            .map(|p| p.max_abs_coeff())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.arity, self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out.class = out.classify();
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn neg(&self) -> Self {
        let entries = self.entries.iter().map(|p| p.neg()).collect();
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn scale_coeff(&self, c: &C) -> Self {
        let entries = self.entries.iter().map(|p| p.scale(c)).collect();
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn scale_poly(&self, q: &Poly<C>) -> Self {
        let entries = self.entries.iter().map(|p| p.mul(q)).collect();
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.arity, self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::zero(self.arity, self.ctx);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(o.at(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out.class = out.classify();
        out
    }

    pub fn trace(&self) -> Poly<C> {
        assert!(self.is_square());
        let mut t = Poly::zero(self.arity, self.ctx);
        for i in 0..self.rows {
            t = t.add(self.at(i, i));
        }
        t
    }

    pub fn sym(&self) -> Self {
        assert!(self.is_square());
        let half = C::c_from_rat(coeff_ctx(self), &crate::exactla::rat(1, 2));
        let mut out = self.add(&self.transpose());
        out = out.scale_coeff(&half);
        out.class = out.classify();
        out
    }

    pub fn skw(&self) -> Self {
        assert!(self.is_square());
        let half = C::c_from_rat(coeff_ctx(self), &crate::exactla::rat(1, 2));
        let mut out = self.sub(&self.transpose());
        out = out.scale_coeff(&half);
        out.class = out.classify();
        out
    }

    /// Trace-free part `A - tr(A)/n I`.
    pub fn dev(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let invn = C::c_from_rat(coeff_ctx(self), &crate::exactla::rat(1, n as i64));
        let t = self.trace().scale(&invn);
        let mut out = self.clone();
        for i in 0..n {
            let e = out.at(i, i).sub(&t);
            out.set(i, i, e);
        }
        out.class = out.classify();
        out
    }

    /// Tightest valid class tag, decided by exact entry comparison.
    pub fn classify(&self) -> TensorClass {
        if self.rows == 1 && self.cols == 1 {
            return TensorClass::Scalar;
        }
        if self.cols == 1 || self.rows == 1 {
            return TensorClass::Vector;
        }
        if !self.is_square() {
            return TensorClass::Mat;
        }
        let mut symmetric = true;
        let mut skew = true;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    symmetric = false;
                }
                if !self.at(i, j).add(self.at(j, i)).is_zero() {
                    skew = false;
                }
            }
        }
        for i in 0..self.rows {
            if !self.at(i, i).is_zero() {
                skew = false;
            }
        }
        if skew {
            return TensorClass::Skw;
        }
        if symmetric {
            return TensorClass::Sym;
        }
        if self.trace().is_zero() {
            return TensorClass::Dev;
        }
        TensorClass::Mat
    }

    /// `A . b` (row-wise dot; the usual matrix-vector product).
    pub fn dot_right(&self, b: &[Poly<C>]) -> Vec<Poly<C>> {
        assert_eq!(self.cols, b.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero(self.arity, self.ctx);
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&b[j]));
                }
                acc
            })
            .collect()
    }

    /// `b . A = b^T A` (column-wise dot; result indexed by columns).
    pub fn dot_left(&self, b: &[Poly<C>]) -> Vec<Poly<C>> {
        assert_eq!(self.rows, b.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = Poly::zero(self.arity, self.ctx);
                for i in 0..self.rows {
                    acc = acc.add(&self.at(i, j).mul(&b[i]));
                }
                acc
            })
            .collect()
    }

    /// `A x b` (row-wise cross from the right), 3D only.
    pub fn cross_right(&self, b: &[Poly<C>; 3]) -> Self {
        assert_eq!(self.cols, 3);
        let mut out = Self::zeros(self.arity, self.ctx, self.rows, 3);
        for i in 0..self.rows {
            let r = [
                self.at(i, 0).clone(),
                self.at(i, 1).clone(),
                self.at(i, 2).clone(),
            ];
            let c = cross3(&r, b);
            for j in 0..3 {
                out.set(i, j, c[j].clone());
            }
        }
        out.class = out.classify();
        out
    }

    /// `b x A` (column-wise cross from the left), 3D only.
    pub fn cross_left(&self, b: &[Poly<C>; 3]) -> Self {
        assert_eq!(self.rows, 3);
        let mut out = Self::zeros(self.arity, self.ctx, 3, self.cols);
        for j in 0..self.cols {
            let c = [
                self.at(0, j).clone(),
                self.at(1, j).clone(),
                self.at(2, j).clone(),
            ];
            let r = cross3(b, &c);
            for i in 0..3 {
                out.set(i, j, r[i].clone());
            }
        }
        out.class = out.classify();
        out
    }

    /// `a^T A b`.
    pub fn sandwich(&self, a: &[Poly<C>], b: &[Poly<C>]) -> Poly<C> {
        let ab = self.dot_right(b);
        dot_vec(a, &ab)
    }
}

fn coeff_ctx<C: Coeff>(m: &PolyMat<C>) -> C::Ctx {
    m.ctx
}

pub fn dot_vec<C: Coeff>(a: &[Poly<C>], b: &[Poly<C>]) -> Poly<C> {
    assert_eq!(a.len(), b.len());
    let mut acc = Poly::zero(a[0].arity, a[0].ctx);
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

pub fn cross3<C: Coeff>(a: &[Poly<C>; 3], b: &[Poly<C>; 3]) -> [Poly<C>; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// Tensor (dyadic) product `u v^T`.
pub fn outer<C: Coeff>(u: &[Poly<C>], v: &[Poly<C>]) -> PolyMat<C> {
    let arity = u[0].arity;
    let ctx = u[0].ctx;
    let mut out = PolyMat::zeros(arity, ctx, u.len(), v.len());
    for i in 0..u.len() {
        for j in 0..v.len() {
            out.set(i, j, u[i].mul(&v[j]));
        }
    }
    out.class = out.classify();
    out
}

/// The isomorphism of R^3 with skew matrices.
pub fn mskw<C: Coeff>(w: &[Poly<C>; 3]) -> PolyMat<C> {
    let arity = w[0].arity;
    let ctx = w[0].ctx;
    let z = || Poly::<C>::zero(arity, ctx);
    PolyMat::from_entries(
        3,
        3,
        vec![
            z(),
            w[2].neg(),
            w[1].clone(),
            w[2].clone(),
            z(),
            w[0].neg(),
            w[1].neg(),
            w[0].clone(),
            z(),
        ],
    )
}

/// `vskw = mskw^{-1} . skw`.
pub fn vskw<C: Coeff>(a: &PolyMat<C>) -> Result<[Poly<C>; 3]> {
    if a.rows != 3 || a.cols != 3 {
        return Err(Error::ShapeMismatch("vskw needs a 3x3 matrix".into()));
    }
    let s = a.skw();
    Ok([
        s.at(2, 1).clone(),
        s.at(0, 2).clone(),
        s.at(1, 0).clone(),
    ])
}

/// 2D rotation `x_perp = (x2, -x1)`.
pub fn perp2<C: Coeff>(v: &[Poly<C>]) -> [Poly<C>; 2] {
    assert_eq!(v.len(), 2);
    [v[1].clone(), v[0].neg()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat_i;
    use crate::polyring::PolyR;

    fn x(i: usize) -> PolyR {
        PolyR::var(3, (), i)
    }

    fn konst(v: i64) -> PolyR {
        PolyR::constant(3, rat_i(v))
    }

    fn e(i: usize) -> [PolyR; 3] {
        let mut v = [konst(0), konst(0), konst(0)];
        v[i] = konst(1);
        v
    }

    #[test]
    fn mskw_matches_definition() {
        let m = mskw(&[konst(1), konst(2), konst(3)]);
        let want: Vec<i64> = vec![0, -3, 2, 3, 0, -1, -2, 1, 0];
        for (p, w) in m.entries.iter().zip(want) {
            assert_eq!(p, &PolyR::constant(3, rat_i(w)));
        }
        assert_eq!(m.class, TensorClass::Skw);
    }

    #[test]
    fn vskw_roundtrip_and_sym_kill() {
        let v = [x(0), PolyR::zero(3, ()), x(2)];
        let back = vskw(&mskw(&v)).unwrap();
        assert_eq!(back[0], v[0]);
        assert_eq!(back[1], v[1]);
        assert_eq!(back[2], v[2]);
        // vskw of a symmetric matrix is zero
        let eye = PolyMat::from_const(
            3,
            3,
            3,
            vec![
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat_i(0),
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat_i(0),
                rat_i(1),
            ],
        );
        assert!(vskw(&eye).unwrap().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn decompose_identity_and_dyad() {
        let eye = PolyMat::from_const(
            3,
            3,
            3,
            vec![
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat_i(0),
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat_i(0),
                rat_i(1),
            ],
        );
        assert!(eye.skw().is_zero());
        assert!(eye.dev().is_zero());
        assert_eq!(eye.trace(), konst(3));

        let skw_in = mskw(&[konst(1), konst(2), konst(3)]);
        assert!(skw_in.sym().is_zero());

        let dyad = outer(&e(0), &e(1));
        assert!(dyad.trace().is_zero());
        let s = dyad.sym();
        assert_eq!(s.at(0, 1), &PolyR::constant(3, crate::exactla::rat(1, 2)));
        assert_eq!(s.at(1, 0), &PolyR::constant(3, crate::exactla::rat(1, 2)));
        // sym + skw reassembles, dev + tr/3 I reassembles
        let b = outer(&[x(0), x(1), konst(2)], &e(2));
        assert_eq!(b.sym().add(&b.skw()), b);
        let third = crate::exactla::rat(1, 3);
        let mut tr_part = PolyMat::zeros(3, (), 3, 3);
        let t = b.trace().scale(&third);
        for i in 0..3 {
            tr_part.set(i, i, t.clone());
        }
        assert_eq!(b.dev().add(&tr_part), b);
        assert!(b.dev().trace().is_zero());
    }

    #[test]
    fn cross_product_rules() {
        let xv = [x(0), x(1), x(2)];
        // (u v^T) x w = u (v x w)^T
        let u = e(0);
        let v = e(1);
        let lhs = outer(&u, &v).cross_right(&xv);
        let vxw = cross3(&v, &xv);
        let rhs = outer(&u, &vxw);
        assert_eq!(lhs, rhs);
        // transpose rule b x A = -(A^T x b)^T
        let a = outer(&[x(0), konst(1), x(2)], &[x(1), x(0), konst(3)]);
        let b = [konst(1), x(2), konst(-2)];
        let left = a.cross_left(&b);
        let right = a.transpose().cross_right(&b).transpose().neg();
        assert_eq!(left, right);
        // associativity b x A x c
        let c = [x(0), konst(2), x(1)];
        let p1 = a.cross_left(&b).cross_right(&c);
        let p2 = a.cross_right(&c).cross_left(&b);
        assert_eq!(p1, p2);
        // (tau x x) . x = 0 row-wise
        let contracted = a.cross_right(&xv).dot_right(xv.as_ref());
        assert!(contracted.iter().all(|p| p.is_zero()));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::exactla::rat;
    use crate::polyring::{MultiIndex, PolyR};
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = PolyR> {
        proptest::collection::vec(((0u16..2, 0u16..2, 0u16..2), -4i64..5), 0..5).prop_map(
            |terms| {
                let mut p = PolyR::zero(3, ());
                for ((a, b, c), num) in terms {
                    p = p.add(&PolyR::monomial(3, MultiIndex([a, b, c]), rat(num, 1)));
                }
                p
            },
        )
    }

    fn arb_mat() -> impl Strategy<Value = PolyMatR> {
        proptest::collection::vec(arb_poly(), 9)
            .prop_map(|entries| PolyMat::from_entries(3, 3, entries))
    }

    fn arb_vec3() -> impl Strategy<Value = [PolyR; 3]> {
        (arb_poly(), arb_poly(), arb_poly()).prop_map(|(a, b, c)| [a, b, c])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transpose_rule_for_cross(a in arb_mat(), b in arb_vec3()) {
            let left = a.cross_left(&b);
            let right = a.transpose().cross_right(&b).transpose().neg();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn triple_products_associate(a in arb_mat(), b in arb_vec3(), c in arb_vec3()) {
            prop_assert_eq!(
                a.cross_left(&b).cross_right(&c),
                a.cross_right(&c).cross_left(&b)
            );
        }

        #[test]
        fn decompositions_reassemble(a in arb_mat()) {
            prop_assert_eq!(a.sym().add(&a.skw()), a.clone());
            let third = rat(1, 3);
            let t = a.trace().scale(&third);
            let mut tr_part = PolyMat::zeros(3, (), 3, 3);
            for i in 0..3 {
                tr_part.set(i, i, t.clone());
            }
            prop_assert_eq!(a.dev().add(&tr_part), a.clone());
            prop_assert!(a.dev().trace().is_zero());
            prop_assert!(a.skw().trace().is_zero());
        }

        #[test]
        fn mskw_vskw_roundtrip(v in arb_vec3()) {
            let back = vskw(&mskw(&v)).unwrap();
            prop_assert_eq!(&back[0], &v[0]);
            prop_assert_eq!(&back[1], &v[1]);
            prop_assert_eq!(&back[2], &v[2]);
        }
    }
}
