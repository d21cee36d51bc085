//! Multivariate polynomials in 1/2/3 variables over exact rationals or
//! arbitrary-precision floats.
//!
//! Terms are kept in a BTreeMap under a globally fixed graded-lex order
//! (degree first, then lexicographic with x1 > x2 > x3), so iteration
//! order, operator matrices and reports are bit-reproducible.  Exactly
//! zero coefficients are never stored.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bigfloat::{bf_rat, BigF};
use crate::error::{Error, Result};
use crate::exactla::Rat;

/// Exponent tuple; unused trailing slots stay zero for arity < 3.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct MultiIndex(pub [u16; 3]);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex([0; 3])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0u16; 3];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn deg(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn mul(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.deg()
            .cmp(&other.deg())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient field shared by the exact and floating polynomial layers.
///
/// `Ctx` carries whatever is needed to make fresh constants: nothing for
/// rationals, the precision for floats.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    type Ctx: Copy + PartialEq + Send + Sync + std::fmt::Debug;
    fn ctx(&self) -> Self::Ctx;
    fn c_zero(cx: Self::Ctx) -> Self;
    fn c_one(cx: Self::Ctx) -> Self;
    fn c_from_i64(cx: Self::Ctx, v: i64) -> Self;
    fn c_from_rat(cx: Self::Ctx, r: &Rat) -> Self;
    fn c_is_zero(&self) -> bool;
    fn neg_of(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
    fn mul_u32(&self, n: u32) -> Self;
    fn abs_f64(&self) -> f64;
}

impl Coeff for Rat {
    type Ctx = ();
    fn ctx(&self) {}
    fn c_zero(_: ()) -> Self {
        Rat::zero()
    }
    fn c_one(_: ()) -> Self {
        Rat::one()
    }
    fn c_from_i64(_: (), v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn c_from_rat(_: (), r: &Rat) -> Self {
        r.clone()
    }
    fn c_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg_of(&self) -> Self {
        -self.clone()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn mul_u32(&self, n: u32) -> Self {
        self * Rat::from_integer(BigInt::from(n))
    }
    fn abs_f64(&self) -> f64 {
        let n = self.numer();
        let d = self.denom();
        let nf: f64 = n.to_string().parse().unwrap_or(f64::MAX);
        let df: f64 = d.to_string().parse().unwrap_or(1.0);
        (nf / df).abs()
    }
}

impl Coeff for BigF {
    type Ctx = u32;
    fn ctx(&self) -> u32 {
        self.prec()
    }
    fn c_zero(cx: u32) -> Self {
        BigF::new(cx)
    }
    fn c_one(cx: u32) -> Self {
        BigF::with_val(cx, 1)
    }
    fn c_from_i64(cx: u32, v: i64) -> Self {
        BigF::with_val(cx, v)
    }
    fn c_from_rat(cx: u32, r: &Rat) -> Self {
        bf_rat(cx, r)
    }
    fn c_is_zero(&self) -> bool {
        BigF::is_zero(self)
    }
    fn neg_of(&self) -> Self {
        -self.clone()
    }
    fn add_ref(&self, o: &Self) -> Self {
        let mut x = self.clone();
        x += o;
        x
    }
    fn sub_ref(&self, o: &Self) -> Self {
        let mut x = self.clone();
        x -= o;
        x
    }
    fn mul_ref(&self, o: &Self) -> Self {
        let mut x = self.clone();
        x *= o;
        x
    }
    fn div_ref(&self, o: &Self) -> Self {
        let mut x = self.clone();
        x /= o;
        x
    }
    fn mul_u32(&self, n: u32) -> Self {
        let mut x = self.clone();
        x *= n;
        x
    }
    fn abs_f64(&self) -> f64 {
        self.clone().abs().to_f64()
    }
}

/// Sparse multivariate polynomial.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Coeff> {
    pub arity: usize,
    pub ctx: C::Ctx,
    pub terms: BTreeMap<MultiIndex, C>,
}

pub type PolyR = Poly<Rat>;
pub type PolyF = Poly<BigF>;

impl<C: Coeff> Poly<C> {
    pub fn zero(arity: usize, ctx: C::Ctx) -> Self {
        Poly {
            arity,
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: C) -> Self {
        let ctx = c.ctx();
        let mut p = Self::zero(arity, ctx);
        if !c.c_is_zero() {
            p.terms.insert(MultiIndex::zero(), c);
        }
        p
    }

    pub fn var(arity: usize, ctx: C::Ctx, i: usize) -> Self {
        assert!(i < arity);
        Self::monomial(arity, MultiIndex::var(i), C::c_one(ctx))
    }

    pub fn monomial(arity: usize, m: MultiIndex, c: C) -> Self {
        let ctx = c.ctx();
        let mut p = Self::zero(arity, ctx);
        if !c.c_is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg()).max()
    }

    fn insert_add(&mut self, m: MultiIndex, c: C) {
        if c.c_is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add_ref(&c);
                if s.c_is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity, "poly arity");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity, "poly arity");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(*m, c.neg_of());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg_of();
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity, "poly arity");
        let mut out = Self::zero(self.arity, self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.insert_add(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.c_is_zero() {
            return Self::zero(self.arity, self.ctx);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul_ref(c);
        }
        out.terms.retain(|_, v| !v.c_is_zero());
        out
    }

    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < self.arity);
        let mut out = Self::zero(self.arity, self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut idx = *m;
            idx.0[axis] -= 1;
            out.insert_add(idx, c.mul_u32(e as u32));
        }
        out
    }

    /// Directional derivative with constant direction coefficients.
    pub fn dir_derivative(&self, dir: &[C]) -> Self {
        assert_eq!(dir.len(), self.arity);
        let mut out = Self::zero(self.arity, self.ctx);
        for (axis, d) in dir.iter().enumerate() {
            if d.c_is_zero() {
                continue;
            }
            out = out.add(&self.derivative(axis).scale(d));
        }
        out
    }

    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.arity);
        let mut acc = C::c_zero(self.ctx);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, p) in point.iter().enumerate() {
                for _ in 0..m.0[i] {
                    t = t.mul_ref(p);
                }
            }
            acc = acc.add_ref(&t);
        }
        acc
    }

    /// Composition `p(e_1(u), ..., e_arity(u))`.
    pub fn subst(&self, exprs: &[Self]) -> Self {
        assert_eq!(exprs.len(), self.arity);
        let target_arity = exprs.first().map_or(self.arity, |e| e.arity);
        let mut maxe = [0u16; 3];
        for m in self.terms.keys() {
            for i in 0..3 {
                maxe[i] = maxe[i].max(m.0[i]);
            }
        }
        // power tables per variable
        let one = Self::constant(target_arity, C::c_one(self.ctx));
        let mut pows: Vec<Vec<Self>> = Vec::with_capacity(self.arity);
        for (i, e) in exprs.iter().enumerate() {
            let mut table = vec![one.clone()];
            for k in 1..=maxe[i] {
                let next = table[(k - 1) as usize].mul(e);
                table.push(next);
            }
            pows.push(table);
        }
        let mut out = Self::zero(target_arity, self.ctx);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target_arity, c.clone());
            for i in 0..self.arity {
                if m.0[i] > 0 {
                    t = t.mul(&pows[i][m.0[i] as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Terms of exact total degree `m`.
    pub fn homogeneous_component(&self, m: u32) -> Self {
        let mut out = Self::zero(self.arity, self.ctx);
        for (idx, c) in &self.terms {
            if idx.deg() == m {
                out.terms.insert(*idx, c.clone());
            }
        }
        out
    }

    /// Largest coefficient magnitude (for scale-free residual reporting).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Exact integral over the reference simplex of dimension `arity`
    /// (unit simplex `u_i >= 0, sum u_i <= 1`).
    pub fn integrate_ref_simplex(&self) -> C {
        let d = self.arity as u32;
        let mut acc = C::c_zero(self.ctx);
        for (m, c) in &self.terms {
            let w = C::c_from_rat(self.ctx, &ref_simplex_moment(m, d));
            acc = acc.add_ref(&c.mul_ref(&w));
        }
        acc
    }
}

impl Poly<Rat> {
    pub fn to_float(&self, prec: u32) -> PolyF {
        let mut out = PolyF::zero(self.arity, prec);
        for (m, c) in &self.terms {
            out.terms.insert(*m, bf_rat(prec, c));
        }
        out
    }
}

/// `∫ u^m du` over the reference simplex of dimension `d`:
/// `(prod m_i!) / (|m| + d)!`.
pub fn ref_simplex_moment(m: &MultiIndex, d: u32) -> Rat {
    let mut num = BigInt::one();
    for &e in &m.0 {
        num *= factorial(e as u32);
    }
    Rat::new(num, factorial(m.deg() + d))
}

pub fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= BigInt::from(i);
    }
    f
}

/// Monomial exponent tuples of total degree at most `k`, graded-lex sorted.
pub fn monomial_basis(arity: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let k = k as i64;
    match arity {
        1 => {
            for a in 0..=k {
                out.push(MultiIndex([a as u16, 0, 0]));
            }
        }
        2 => {
            for a in 0..=k {
                for b in 0..=(k - a) {
                    out.push(MultiIndex([a as u16, b as u16, 0]));
                }
            }
        }
        3 => {
            for a in 0..=k {
                for b in 0..=(k - a) {
                    for c in 0..=(k - a - b) {
                        out.push(MultiIndex([a as u16, b as u16, c as u16]));
                    }
                }
            }
        }
        _ => panic!("unsupported arity {arity}"),
    }
    out.sort();
    out
}

/// Monomials of exact degree `k`.
pub fn homogeneous_monomials(arity: usize, k: u32) -> Vec<MultiIndex> {
    monomial_basis(arity, k)
        .into_iter()
        .filter(|m| m.deg() == k)
        .collect()
}

/// Exact integral of `p` over the simplex spanned by `verts`
/// (`verts.len() - 1`-dimensional, embedded in `R^{arity}`).
///
/// For full-dimensional simplices the measure is `|det J| / d!` and the
/// result is exact.  For embedded simplices the Gram determinant must be a
/// rational square, otherwise the measure is irrational and the exact path
/// refuses (the floating DOF path handles that case).
pub fn integrate_simplex(p: &PolyR, verts: &[Vec<Rat>]) -> Result<Rat> {
    let d = p.arity;
    let k = verts.len() - 1;
    if verts.iter().any(|v| v.len() != d) {
        return Err(Error::ShapeMismatch("vertex dimension vs poly arity".into()));
    }
    if k == 0 {
        return Ok(p.eval(&verts[0]));
    }
    // chart x_i = v0_i + sum_j u_j (vj_i - v0_i)
    let charts: Vec<PolyR> = (0..d)
        .map(|i| {
            let mut c = PolyR::constant(k, verts[0][i].clone());
            for j in 0..k {
                let coef = &verts[j + 1][i] - &verts[0][i];
                c = c.add(&PolyR::monomial(k, MultiIndex::var(j), coef));
            }
            c
        })
        .collect();
    let pulled = p.subst(&charts);
    let raw = pulled.integrate_ref_simplex();
    // Jacobian columns v_j - v_0
    let jac: Vec<Vec<Rat>> = (0..k)
        .map(|j| (0..d).map(|i| &verts[j + 1][i] - &verts[0][i]).collect())
        .collect();
    let factor = if k == d {
        let det = det_small(&jac, d);
        if Zero::is_zero(&det) {
            return Err(Error::DegenerateSimplex);
        }
        det.abs()
    } else {
        // Gram determinant of the embedded chart
        let mut g = vec![vec![Rat::zero(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let mut s = Rat::zero();
                for i in 0..d {
                    s += &jac[a][i] * &jac[b][i];
                }
                g[a][b] = s;
            }
        }
        let det = det_small(&g, k);
        if Zero::is_zero(&det) {
            return Err(Error::DegenerateSimplex);
        }
        rational_sqrt(&det).ok_or_else(|| {
            Error::Internal("embedded simplex has irrational measure; use the floating path".into())
        })?
    };
    Ok(raw * factor)
}

fn det_small(m: &[Vec<Rat>], n: usize) -> Rat {
    match n {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => {
            let a = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
            let b = &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
            let c = &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
            a - b + c
        }
        _ => panic!("det_small only up to 3x3"),
    }
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, rat_i};

    fn x(i: usize) -> PolyR {
        PolyR::var(3, (), i)
    }

    #[test]
    fn graded_lex_order() {
        let b = monomial_basis(3, 2);
        assert_eq!(b.len(), 10);
        assert_eq!(b[0], MultiIndex([0, 0, 0]));
        assert_eq!(b[1], MultiIndex([1, 0, 0]));
        assert_eq!(b[2], MultiIndex([0, 1, 0]));
        assert_eq!(b[3], MultiIndex([0, 0, 1]));
        assert_eq!(b[4], MultiIndex([2, 0, 0]));
        assert_eq!(b[5], MultiIndex([1, 1, 0]));
    }

    #[test]
    fn basis_counts() {
        assert_eq!(monomial_basis(3, 3).len(), 20);
        assert_eq!(monomial_basis(2, 3).len(), 10);
        assert_eq!(monomial_basis(3, 0).len(), 1);
    }

    #[test]
    fn arithmetic_and_derivative() {
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let p = x(0).mul(&x(0)).mul(&x(1));
        let d = p.derivative(0);
        let want = x(0).mul(&x(1)).scale(&rat_i(2));
        assert_eq!(d, want);
        // (x1+x2)(x1-x2) = x1^2 - x2^2
        let s = x(0).add(&x(1)).mul(&x(0).sub(&x(1)));
        let want = x(0).mul(&x(0)).sub(&x(1).mul(&x(1)));
        assert_eq!(s, want);
    }

    #[test]
    fn euler_identity() {
        // (x . grad) q = k q for homogeneous q of degree k
        let q = x(0).mul(&x(0)).mul(&x(1)).mul(&x(2)); // degree 4
        let mut xdotgrad = PolyR::zero(3, ());
        for i in 0..3 {
            xdotgrad = xdotgrad.add(&x(i).mul(&q.derivative(i)));
        }
        assert_eq!(xdotgrad, q.scale(&rat_i(4)));
    }

    #[test]
    fn homogeneous_components() {
        let p = PolyR::constant(3, rat_i(1))
            .add(&x(0))
            .add(&x(0).mul(&x(1)));
        assert_eq!(p.homogeneous_component(1), x(0));
        assert!(p.homogeneous_component(5).is_zero());
        let back = p
            .homogeneous_component(0)
            .add(&p.homogeneous_component(1))
            .add(&p.homogeneous_component(2));
        assert_eq!(back, p);
    }

    #[test]
    fn integrate_reference_tet() {
        let verts = vec![
            vec![rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
            vec![rat_i(0), rat_i(0), rat_i(1)],
        ];
        let one = PolyR::constant(3, rat_i(1));
        assert_eq!(integrate_simplex(&one, &verts).unwrap(), rat(1, 6));
        assert_eq!(integrate_simplex(&x(0), &verts).unwrap(), rat(1, 24));
    }

    #[test]
    fn integrate_axis_segment() {
        let verts = vec![
            vec![rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(1), rat_i(0), rat_i(0)],
        ];
        assert_eq!(integrate_simplex(&x(0), &verts).unwrap(), rat(1, 2));
    }

    #[test]
    fn restrict_via_subst() {
        // x3 restricted to the plane x3 = 0 (chart (u,v) -> (u,v,0))
        let chart = vec![
            PolyR::var(2, (), 0),
            PolyR::var(2, (), 1),
            PolyR::zero(2, ()),
        ];
        assert!(x(2).subst(&chart).is_zero());
        // x1 on the edge (t,t,0)
        let edge = vec![
            PolyR::var(1, (), 0),
            PolyR::var(1, (), 0),
            PolyR::zero(1, ()),
        ];
        assert_eq!(x(0).subst(&edge), PolyR::var(1, (), 0));
    }

    #[test]
    fn face_then_edge_restriction_composes() {
        // restricting to a face chart and then to an edge of that chart
        // equals the direct edge restriction
        let t = crate::simplexgeo::Tet::random(9);
        let p = x(0).mul(&x(1)).mul(&x(2)).add(&x(2).mul(&x(2)));
        for f in 0..4 {
            let fc = t.face_chart(f);
            let on_face = p.subst(fc.as_ref());
            let s = t.face_verts_sorted(f);
            // edges of the sorted triple in chart coordinates
            let tpar = PolyR::var(1, (), 0);
            let zero = PolyR::zero(1, ());
            let one = PolyR::constant(1, rat_i(1));
            let cases = [
                ([s[0], s[1]], vec![tpar.clone(), zero.clone()]),
                ([s[0], s[2]], vec![zero.clone(), tpar.clone()]),
                ([s[1], s[2]], vec![one.sub(&tpar), tpar.clone()]),
            ];
            for (pair, chart2) in cases {
                let via_face = on_face.subst(&chart2);
                let e = (0..6)
                    .find(|&e| {
                        let (a, b) = t.edge_verts(e);
                        [a, b] == pair
                    })
                    .unwrap();
                let direct = p.subst(t.edge_chart(e).as_ref());
                assert_eq!(via_face, direct);
            }
        }
    }

    #[test]
    fn affine_invariance_of_integral() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // integral over a scaled/translated tet picks up |det J|
        let refv = vec![
            vec![rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
            vec![rat_i(0), rat_i(0), rat_i(1)],
        ];
        let mapped = vec![
            vec![rat_i(1), rat_i(1), rat_i(1)],
            vec![rat_i(3), rat_i(1), rat_i(1)],
            vec![rat_i(1), rat_i(3), rat_i(1)],
            vec![rat_i(1), rat_i(1), rat_i(3)],
        ];
        for _ in 0..100 {
            let mut p = PolyR::zero(3, ());
            for m in monomial_basis(3, 3) {
                if rng.gen_bool(0.3) {
                    p = p.add(&PolyR::monomial(3, m, rat(rng.gen_range(-3..4), 1)));
                }
            }
            // pull back through the affine map x -> 1 + 2u
            let chart: Vec<PolyR> = (0..3)
                .map(|i| {
                    PolyR::constant(3, rat_i(1)).add(&PolyR::var(3, (), i).scale(&rat_i(2)))
                })
                .collect();
            let lhs = integrate_simplex(&p, &mapped).unwrap();
            let rhs = integrate_simplex(&p.subst(&chart), &refv).unwrap() * rat_i(8);
            assert_eq!(lhs, rhs);
        }
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::exactla::{rat, rat_i};
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = PolyR> {
        proptest::collection::vec(
            ((0u16..3, 0u16..3, 0u16..3), -6i64..7, 1i64..4),
            0..8,
        )
        .prop_map(|terms| {
            let mut p = PolyR::zero(3, ());
            for ((a, b, c), num, den) in terms {
                p = p.add(&PolyR::monomial(3, MultiIndex([a, b, c]), rat(num, den)));
            }
            p
        })
    }

    fn ref_tet() -> Vec<Vec<Rat>> {
        let mut v = vec![vec![rat_i(0), rat_i(0), rat_i(0)]];
        for i in 0..3 {
            let mut e = vec![rat_i(0), rat_i(0), rat_i(0)];
            e[i] = rat_i(1);
            v.push(e);
        }
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn integration_is_linear(p in arb_poly(), q in arb_poly(), a in -4i64..5, b in -4i64..5) {
            let tet = ref_tet();
            let combo = p.scale(&rat_i(a)).add(&q.scale(&rat_i(b)));
            let lhs = integrate_simplex(&combo, &tet).unwrap();
            let rhs = integrate_simplex(&p, &tet).unwrap() * rat_i(a)
                + integrate_simplex(&q, &tet).unwrap() * rat_i(b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivative_product_rule(p in arb_poly(), q in arb_poly(), axis in 0usize..3) {
            let lhs = p.mul(&q).derivative(axis);
            let rhs = p.derivative(axis).mul(&q).add(&p.mul(&q.derivative(axis)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn homogeneous_parts_rebuild_and_obey_euler(p in arb_poly()) {
            let deg = p.degree().unwrap_or(0);
            let mut sum = PolyR::zero(3, ());
            let mut euler = PolyR::zero(3, ());
            for m in 0..=deg {
                let h = p.homogeneous_component(m);
                sum = sum.add(&h);
                euler = euler.add(&h.scale(&rat_i(m as i64)));
            }
            prop_assert_eq!(&sum, &p);
            // x . grad p = sum_m m * p_m
            let mut xg = PolyR::zero(3, ());
            for i in 0..3 {
                xg = xg.add(&PolyR::var(3, (), i).mul(&p.derivative(i)));
            }
            prop_assert_eq!(xg, euler);
        }

        #[test]
        fn substitution_composes(p in arb_poly()) {
            // p(x) restricted to a face chart, then to an edge of the chart,
            // equals the direct edge restriction
            let face = vec![
                PolyR::var(2, (), 0),
                PolyR::var(2, (), 1),
                PolyR::zero(2, ()),
            ];
            let edge_in_face = vec![PolyR::var(1, (), 0), PolyR::zero(1, ())];
            let direct = vec![
                PolyR::var(1, (), 0),
                PolyR::zero(1, ()),
                PolyR::zero(1, ()),
            ];
            let via = p.subst(&face).subst(&edge_in_face);
            prop_assert_eq!(via, p.subst(&direct));
        }
    }
}
