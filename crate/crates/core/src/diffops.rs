//! Differential operators, Koszul operators and surface operators on
//! polynomial tensors, plus their realization as exact matrices between
//! space bases.
//!
//! Conventions: `grad u = (d_j u_i)`, `curl A` and `div A` act row-wise,
//! `div div A = sum_ij d_i d_j A_ij`.  Koszul operators multiply from the
//! right and depend on an explicit origin.  The 2D rotation is
//! `x_perp = (x2, -x1)` and the intrinsic 2D surface operators take the
//! plane normal to be the third axis, so `curl_F q = (-d2 q, d1 q)`.

use crate::error::{Error, Result};
use crate::exactla::{rat, ExactMatrix, Rat};
use crate::polyring::{Coeff, Poly};
use crate::polyspaces::SpaceBasis;
use crate::tensorops::{cross3, dot_vec, outer, PolyMat, TensorClass};

// ---------------------------------------------------------------------
// basic differential operators
// ---------------------------------------------------------------------

pub fn grad_scalar<C: Coeff>(p: &Poly<C>) -> Vec<Poly<C>> {
    (0..p.arity).map(|i| p.derivative(i)).collect()
}

/// `grad u = (d_j u_i)`: row i is the gradient of `u_i`.
pub fn grad_vec<C: Coeff>(v: &[Poly<C>]) -> PolyMat<C> {
    let arity = v[0].arity;
    let entries = v
        .iter()
        .flat_map(|ui| (0..arity).map(move |j| ui.derivative(j)))
        .collect();
    PolyMat::from_entries(v.len(), arity, entries)
}

pub fn div_vec<C: Coeff>(v: &[Poly<C>]) -> Poly<C> {
    let mut acc = Poly::zero(v[0].arity, v[0].ctx);
    for (i, vi) in v.iter().enumerate() {
        acc = acc.add(&vi.derivative(i));
    }
    acc
}

pub fn curl_vec3<C: Coeff>(v: &[Poly<C>]) -> [Poly<C>; 3] {
    assert_eq!(v.len(), 3);
    [
        v[2].derivative(1).sub(&v[1].derivative(2)),
        v[0].derivative(2).sub(&v[2].derivative(0)),
        v[1].derivative(0).sub(&v[0].derivative(1)),
    ]
}

pub fn hess_scalar<C: Coeff>(p: &Poly<C>) -> PolyMat<C> {
    let d = p.arity;
    let g = grad_scalar(p);
    let entries = (0..d)
        .flat_map(|i| {
            let gi = g[i].clone();
            (0..d).map(move |j| gi.derivative(j))
        })
        .collect();
    PolyMat::from_entries(d, d, entries)
}

/// Row-wise curl of a 3x3 tensor.
pub fn curl_mat3<C: Coeff>(a: &PolyMat<C>) -> PolyMat<C> {
    assert_eq!((a.rows, a.cols), (3, 3));
    let mut out = PolyMat::zeros(a.arity, a.ctx, 3, 3);
    for i in 0..3 {
        let row = [a.at(i, 0).clone(), a.at(i, 1).clone(), a.at(i, 2).clone()];
        let c = curl_vec3(&row);
        for j in 0..3 {
            out.set(i, j, c[j].clone());
        }
    }
    out.class = out.classify();
    out
}

/// Row-wise divergence (any width).
pub fn div_mat<C: Coeff>(a: &PolyMat<C>) -> Vec<Poly<C>> {
    (0..a.rows)
        .map(|i| {
            let mut acc = Poly::zero(a.arity, a.ctx);
            for j in 0..a.cols {
                acc = acc.add(&a.at(i, j).derivative(j));
            }
            acc
        })
        .collect()
}

pub fn div_div<C: Coeff>(a: &PolyMat<C>) -> Poly<C> {
    div_vec(&div_mat(a))
}

pub fn dev_grad<C: Coeff>(v: &[Poly<C>]) -> PolyMat<C> {
    grad_vec(v).dev()
}

pub fn sym_curl<C: Coeff>(a: &PolyMat<C>) -> PolyMat<C> {
    curl_mat3(a).sym()
}

// ---------------------------------------------------------------------
// intrinsic 2D surface operators (plane normal = third axis)
// ---------------------------------------------------------------------

/// `curl_F q = (-d2 q, d1 q)` for a scalar on a 2D domain.
pub fn curl_f_scalar<C: Coeff>(q: &Poly<C>) -> [Poly<C>; 2] {
    [q.derivative(1).neg(), q.derivative(0)]
}

/// Row-wise `curl_F` of a 2D vector field: a 2x2 tensor.
pub fn curl_f_vec2<C: Coeff>(v: &[Poly<C>]) -> PolyMat<C> {
    assert_eq!(v.len(), 2);
    let mut entries = Vec::with_capacity(4);
    for vi in v {
        let c = curl_f_scalar(vi);
        entries.push(c[0].clone());
        entries.push(c[1].clone());
    }
    PolyMat::from_entries(2, 2, entries)
}

pub fn sym_curl_f<C: Coeff>(v: &[Poly<C>]) -> PolyMat<C> {
    curl_f_vec2(v).sym()
}

/// `rot_F v = d1 v2 - d2 v1`.
pub fn rot_f_vec2<C: Coeff>(v: &[Poly<C>]) -> Poly<C> {
    v[1].derivative(0).sub(&v[0].derivative(1))
}

/// Row-wise `rot_F` of a 2D tensor.
pub fn rot_f_mat2<C: Coeff>(a: &PolyMat<C>) -> Vec<Poly<C>> {
    (0..a.rows)
        .map(|i| a.at(i, 1).derivative(0).sub(&a.at(i, 0).derivative(1)))
        .collect()
}

// ---------------------------------------------------------------------
// Koszul operators (about an explicit origin)
// ---------------------------------------------------------------------

/// The shifted coordinate vector `x - origin`.
pub fn xbar<C: Coeff>(arity: usize, ctx: C::Ctx, origin: &[Rat]) -> Vec<Poly<C>> {
    assert_eq!(origin.len(), arity);
    (0..arity)
        .map(|i| {
            let c = C::c_from_rat(ctx, &(-origin[i].clone()));
            Poly::var(arity, ctx, i).add(&Poly::constant(arity, c))
        })
        .collect()
}

fn xbar3<C: Coeff>(ctx: C::Ctx, origin: &[Rat]) -> [Poly<C>; 3] {
    let v = xbar(3, ctx, origin);
    [v[0].clone(), v[1].clone(), v[2].clone()]
}

fn rat_point<C: Coeff>(ctx: C::Ctx, origin: &[Rat]) -> Vec<C> {
    origin.iter().map(|r| C::c_from_rat(ctx, r)).collect()
}

/// `pi_RT v = v(o) + (div v)(o)/d * (x - o)`, the lowest-order
/// Raviart-Thomas projector (d = 3 or 2).
pub fn pi_rt<C: Coeff>(v: &[Poly<C>], origin: &[Rat]) -> Vec<Poly<C>> {
    let arity = v[0].arity;
    let ctx = v[0].ctx;
    let o = rat_point::<C>(ctx, origin);
    let a = div_vec(v).eval(&o);
    let a = a.mul_ref(&C::c_from_rat(ctx, &rat(1, arity as i64)));
    let xb = xbar::<C>(arity, ctx, origin);
    v.iter()
        .enumerate()
        .map(|(i, vi)| {
            let val = vi.eval(&o);
            Poly::constant(arity, val).add(&xb[i].scale(&a))
        })
        .collect()
}

/// `pi_1 p = p(o) + (x - o) . (grad p)(o)`.
pub fn pi_1<C: Coeff>(p: &Poly<C>, origin: &[Rat]) -> Poly<C> {
    let arity = p.arity;
    let ctx = p.ctx;
    let o = rat_point::<C>(ctx, origin);
    let xb = xbar::<C>(arity, ctx, origin);
    let mut out = Poly::constant(arity, p.eval(&o));
    for i in 0..arity {
        let gi = p.derivative(i).eval(&o);
        out = out.add(&xb[i].scale(&gi));
    }
    out
}

// ---------------------------------------------------------------------
// embedded surface operators with a constant (typically floating) frame
// ---------------------------------------------------------------------

pub fn const_vec<C: Coeff>(arity: usize, vals: &[C]) -> Vec<Poly<C>> {
    vals.iter()
        .map(|c| Poly::constant(arity, c.clone()))
        .collect()
}

/// Normal derivative `d_n s = n . grad s` for a constant direction `n`.
pub fn ddn<C: Coeff>(s: &Poly<C>, n: &[C]) -> Poly<C> {
    s.dir_derivative(n)
}

/// Tangential gradient `grad_F s = grad s - n (n . grad s)` (unit `n`).
pub fn grad_f<C: Coeff>(s: &Poly<C>, n: &[C]) -> Vec<Poly<C>> {
    let g = grad_scalar(s);
    let dn = ddn(s, n);
    g.iter()
        .zip(n.iter())
        .map(|(gi, ni)| gi.sub(&dn.scale(ni)))
        .collect()
}

/// Surface divergence of a vector field (unit `n`).
pub fn div_f<C: Coeff>(w: &[Poly<C>], n: &[C]) -> Poly<C> {
    // div w - n^T (d_n w)
    let mut acc = div_vec(w);
    for (wi, ni) in w.iter().zip(n.iter()) {
        acc = acc.sub(&ddn(wi, n).scale(ni));
    }
    acc
}

/// Surface rot `rot_F w = n . (curl w)` (3D field, unit `n`).
pub fn rot_f_emb<C: Coeff>(w: &[Poly<C>], n: &[C]) -> Poly<C> {
    let c = curl_vec3(w);
    let nv = const_vec(w[0].arity, n);
    dot_vec(&nv, &c)
}

/// `nabla_F_perp s = n x grad s`.
pub fn nabla_f_perp<C: Coeff>(s: &Poly<C>, n: &[C]) -> [Poly<C>; 3] {
    let g = grad_scalar(s);
    let nv = const_vec(s.arity, n);
    cross3(
        &[nv[0].clone(), nv[1].clone(), nv[2].clone()],
        &[g[0].clone(), g[1].clone(), g[2].clone()],
    )
}

/// Tangential projection `Pi_F v = (n x v) x n` (unit `n`).
pub fn pi_f_vec<C: Coeff>(v: &[Poly<C>], n: &[C]) -> Vec<Poly<C>> {
    let arity = v[0].arity;
    let nv = const_vec(arity, n);
    let narr = [nv[0].clone(), nv[1].clone(), nv[2].clone()];
    let varr = [v[0].clone(), v[1].clone(), v[2].clone()];
    let nxv = cross3(&narr, &varr);
    cross3(&nxv, &narr).to_vec()
}

/// Row-wise surface divergence of a tensor (unit `n`).
pub fn div_f_mat<C: Coeff>(a: &PolyMat<C>, n: &[C]) -> Vec<Poly<C>> {
    (0..a.rows).map(|i| div_f(&a.row_vec(i), n)).collect()
}

// ---------------------------------------------------------------------
// operator specifications and exact matrices
// ---------------------------------------------------------------------

/// Named linear operator between polynomial tensor spaces.
///
/// Koszul-type operators carry their origin; surface operators here are
/// the intrinsic 2D ones (embedded traces live in `tracesgreen`).
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Inclusion,
    Grad,
    Curl,
    Div,
    Hess,
    DevGrad,
    SymCurl,
    DivDiv,
    SymCurlF,
    RotF,
    KoszulX(Vec<Rat>),
    CrossX(Vec<Rat>),
    DotX(Vec<Rat>),
    XxT(Vec<Rat>),
    DevVxT(Vec<Rat>),
    SymCrossX(Vec<Rat>),
    XtTauX(Vec<Rat>),
    PiRT(Vec<Rat>),
    Pi1(Vec<Rat>),
    DotXPerp(Vec<Rat>),
    SymXPerpV(Vec<Rat>),
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Inclusion => "inclusion",
            Op::Grad => "grad",
            Op::Curl => "curl",
            Op::Div => "div",
            Op::Hess => "hess",
            Op::DevGrad => "dev grad",
            Op::SymCurl => "sym curl",
            Op::DivDiv => "div div",
            Op::SymCurlF => "sym curl_F",
            Op::RotF => "rot_F",
            Op::KoszulX(_) => "x",
            Op::CrossX(_) => "cross x",
            Op::DotX(_) => "dot x",
            Op::XxT(_) => "x x^T",
            Op::DevVxT(_) => "dev(v x^T)",
            Op::SymCrossX(_) => "sym(tau cross x)",
            Op::XtTauX(_) => "x^T tau x",
            Op::PiRT(_) => "pi_RT",
            Op::Pi1(_) => "pi_1",
            Op::DotXPerp(_) => "dot x_perp",
            Op::SymXPerpV(_) => "sym(x_perp v^T)",
        }
    }

    /// Apply the operator to a polynomial tensor (scalars 1x1, vectors d x 1).
    pub fn apply<C: Coeff>(&self, m: &PolyMat<C>) -> Result<PolyMat<C>> {
        let arity = m.arity;
        let ctx = m.ctx;
        let vec_in = |m: &PolyMat<C>| -> Vec<Poly<C>> { m.col_vec(0) };
        let as_vec = |v: Vec<Poly<C>>| PolyMat::from_vec(v);
        match self {
            Op::Inclusion => Ok(m.clone()),
            Op::Grad => {
                if m.rows == 1 && m.cols == 1 {
                    Ok(as_vec(grad_scalar(m.at(0, 0))))
                } else {
                    Err(Error::ShapeMismatch("grad expects a scalar".into()))
                }
            }
            Op::Curl => {
                if m.cols == 1 && m.rows == 3 {
                    Ok(as_vec(curl_vec3(&vec_in(m)).to_vec()))
                } else if m.rows == 3 && m.cols == 3 {
                    Ok(curl_mat3(m))
                } else {
                    Err(Error::ShapeMismatch("curl expects a 3-vector or 3x3".into()))
                }
            }
            Op::Div => {
                if m.cols == 1 {
                    Ok(PolyMat::scalar(div_vec(&vec_in(m))))
                } else {
                    Ok(as_vec(div_mat(m)))
                }
            }
            Op::Hess => {
                if m.rows == 1 && m.cols == 1 {
                    Ok(hess_scalar(m.at(0, 0)))
                } else {
                    Err(Error::ShapeMismatch("hess expects a scalar".into()))
                }
            }
            Op::DevGrad => {
                if m.cols == 1 && m.rows == arity {
                    Ok(dev_grad(&vec_in(m)))
                } else {
                    Err(Error::ShapeMismatch("dev grad expects a vector".into()))
                }
            }
            Op::SymCurl => {
                if m.rows == 3 && m.cols == 3 {
                    Ok(sym_curl(m))
                } else {
                    Err(Error::ShapeMismatch("sym curl expects 3x3".into()))
                }
            }
            Op::DivDiv => {
                if m.is_square() && m.rows == arity {
                    Ok(PolyMat::scalar(div_div(m)))
                } else {
                    Err(Error::ShapeMismatch("div div expects a square tensor".into()))
                }
            }
            Op::SymCurlF => {
                if m.cols == 1 && m.rows == 2 {
                    Ok(sym_curl_f(&vec_in(m)))
                } else {
                    Err(Error::ShapeMismatch("sym curl_F expects a 2-vector".into()))
                }
            }
            Op::RotF => {
                if m.cols == 1 && m.rows == 2 {
                    Ok(PolyMat::scalar(rot_f_vec2(&vec_in(m))))
                } else if m.rows == 2 && m.cols == 2 {
                    Ok(as_vec(rot_f_mat2(m)))
                } else {
                    Err(Error::ShapeMismatch("rot_F expects a 2-vector or 2x2".into()))
                }
            }
            Op::KoszulX(o) => {
                if m.rows == 1 && m.cols == 1 {
                    let xb = xbar::<C>(arity, ctx, o);
                    Ok(as_vec(xb.iter().map(|xi| xi.mul(m.at(0, 0))).collect()))
                } else {
                    Err(Error::ShapeMismatch("koszul x expects a scalar".into()))
                }
            }
            Op::CrossX(o) => {
                let xb = xbar3::<C>(ctx, o);
                if m.rows == 3 && m.cols == 3 {
                    Ok(m.cross_right(&xb))
                } else if m.cols == 1 && m.rows == 3 {
                    let v = vec_in(m);
                    Ok(as_vec(
                        cross3(&[v[0].clone(), v[1].clone(), v[2].clone()], &xb).to_vec(),
                    ))
                } else {
                    Err(Error::ShapeMismatch("cross x expects 3x3 or 3-vector".into()))
                }
            }
            Op::DotX(o) => {
                if m.is_square() && m.rows == arity {
                    let xb = xbar::<C>(arity, ctx, o);
                    Ok(as_vec(m.dot_right(&xb)))
                } else {
                    Err(Error::ShapeMismatch("dot x expects a square tensor".into()))
                }
            }
            Op::XxT(o) => {
                if m.rows == 1 && m.cols == 1 {
                    let xb = xbar::<C>(arity, ctx, o);
                    let mut out = outer(&xb, &xb);
                    out = out.scale_poly(m.at(0, 0));
                    out.class = out.classify();
                    Ok(out)
                } else {
                    Err(Error::ShapeMismatch("x x^T expects a scalar".into()))
                }
            }
            Op::DevVxT(o) => {
                if m.cols == 1 && m.rows == 3 {
                    let xb = xbar::<C>(3, ctx, o);
                    Ok(outer(&vec_in(m), &xb).dev())
                } else {
                    Err(Error::ShapeMismatch("dev(v x^T) expects a 3-vector".into()))
                }
            }
            Op::SymCrossX(o) => {
                if m.rows == 3 && m.cols == 3 {
                    let xb = xbar3::<C>(ctx, o);
                    Ok(m.cross_right(&xb).sym())
                } else {
                    Err(Error::ShapeMismatch("sym(tau cross x) expects 3x3".into()))
                }
            }
            Op::XtTauX(o) => {
                if m.is_square() && m.rows == arity {
                    let xb = xbar::<C>(arity, ctx, o);
                    Ok(PolyMat::scalar(m.sandwich(&xb, &xb)))
                } else {
                    Err(Error::ShapeMismatch("x^T tau x expects a square tensor".into()))
                }
            }
            Op::PiRT(o) => {
                if m.cols == 1 && m.rows == arity {
                    Ok(as_vec(pi_rt(&vec_in(m), o)))
                } else {
                    Err(Error::ShapeMismatch("pi_RT expects a vector".into()))
                }
            }
            Op::Pi1(o) => {
                if m.rows == 1 && m.cols == 1 {
                    Ok(PolyMat::scalar(pi_1(m.at(0, 0), o)))
                } else {
                    Err(Error::ShapeMismatch("pi_1 expects a scalar".into()))
                }
            }
            Op::DotXPerp(o) => {
                if m.rows == 2 && m.cols == 2 {
                    let xb = xbar::<C>(2, ctx, o);
                    let xp = crate::tensorops::perp2(&xb);
                    Ok(as_vec(m.dot_right(xp.as_ref())))
                } else {
                    Err(Error::ShapeMismatch("dot x_perp expects 2x2".into()))
                }
            }
            Op::SymXPerpV(o) => {
                if m.cols == 1 && m.rows == 2 {
                    let xb = xbar::<C>(2, ctx, o);
                    let xp = crate::tensorops::perp2(&xb);
                    Ok(outer(&xp, &vec_in(m)).sym())
                } else {
                    Err(Error::ShapeMismatch("sym(x_perp v^T) expects a 2-vector".into()))
                }
            }
        }
    }
}

/// Exact matrix of `op` from `domain` to `codomain`.
///
/// Columns are the coordinates of the image of each domain basis element
/// in the codomain basis.  Image membership is verified; failures report
/// the offending element instead of projecting.
pub fn operator_matrix(op: &Op, domain: &SpaceBasis, codomain: &SpaceBasis) -> Result<ExactMatrix> {
    let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(domain.elements.len());
    for (idx, el) in domain.elements.iter().enumerate() {
        let img = op.apply(el).map_err(|e| Error::ImageNotInCodomain {
            element: idx,
            detail: e.to_string(),
        })?;
        let lin = codomain.linearize(&img).map_err(|e| Error::ImageNotInCodomain {
            element: idx,
            detail: e.to_string(),
        })?;
        cols.push(lin);
    }
    let ambient = ExactMatrix::from_columns(&cols);
    if codomain.is_full {
        Ok(ambient)
    } else {
        let cmat = codomain.coefficient_matrix();
        cmat.solve_batch(&ambient)
    }
}

/// `mskw[div(A^T) - grad(tr A)]`, the right side of the skw-curl identity.
pub fn mskw_of_grad_div_combo<C: Coeff>(a: &PolyMat<C>) -> PolyMat<C> {
    let divat = div_mat(&a.transpose());
    let gtr = grad_scalar(&a.trace());
    let diff: Vec<Poly<C>> = divat.iter().zip(gtr.iter()).map(|(x, y)| x.sub(y)).collect();
    crate::tensorops::mskw(&[diff[0].clone(), diff[1].clone(), diff[2].clone()])
}

pub fn class_of_op_output(op: &Op) -> Option<TensorClass> {
    match op {
        Op::Hess | Op::SymCurl | Op::SymCurlF | Op::XxT(_) | Op::SymCrossX(_) | Op::SymXPerpV(_) => {
            Some(TensorClass::Sym)
        }
        Op::DevGrad | Op::DevVxT(_) => Some(TensorClass::Dev),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat_i;
    use crate::polyring::PolyR;
    use crate::tensorops::mskw;

    fn x(i: usize) -> PolyR {
        PolyR::var(3, (), i)
    }

    fn konst(v: i64) -> PolyR {
        PolyR::constant(3, rat_i(v))
    }

    fn origin0() -> Vec<Rat> {
        vec![rat_i(0), rat_i(0), rat_i(0)]
    }

    #[test]
    fn dev_grad_of_rt_vanishes() {
        // v = a x + b has grad v = a I, dev I = 0
        let v = vec![
            x(0).scale(&rat_i(2)).add(&konst(1)),
            x(1).scale(&rat_i(2)).add(&konst(-3)),
            x(2).scale(&rat_i(2)).add(&konst(5)),
        ];
        assert!(dev_grad(&v).is_zero());
    }

    #[test]
    fn divdiv_of_xxt() {
        // div div (x x^T q) = (x.grad + 3)(x.grad + 4) q ; for q = 1 this is 12
        let one = PolyMat::scalar(konst(1));
        let xxt = Op::XxT(origin0()).apply(&one).unwrap();
        let dd = div_div(&xxt);
        assert_eq!(dd, konst(12));
    }

    #[test]
    fn sym_curl_dev_grad_is_zero() {
        let v = vec![
            x(0).mul(&x(0)).mul(&x(1)),
            x(2).mul(&x(2)).mul(&x(2)),
            x(0).mul(&x(1)).mul(&x(2)),
        ];
        let t = dev_grad(&v);
        assert!(sym_curl(&t).is_zero());
        // and div div of sym curl of any tensor is zero
        let a = outer(&[x(0).mul(&x(1)), x(2), konst(2)], &[x(1), x(0), x(2).mul(&x(2))]);
        assert!(div_div(&sym_curl(&a)).is_zero());
    }

    #[test]
    fn matrix_identities() {
        let u = [x(0).mul(&x(1)), x(2).mul(&x(2)), x(0).add(&x(1))];
        // div mskw u = -curl u
        let lhs = div_mat(&mskw(&u));
        let rhs = curl_vec3(&u);
        for i in 0..3 {
            assert_eq!(lhs[i], rhs[i].neg());
        }
        // curl(u I) = -mskw grad u
        let s = x(0).mul(&x(1)).mul(&x(2));
        let mut si = PolyMat::zeros(3, (), 3, 3);
        for i in 0..3 {
            si.set(i, i, s.clone());
        }
        let g = grad_scalar(&s);
        let want = mskw(&[g[0].clone(), g[1].clone(), g[2].clone()]).neg();
        assert_eq!(curl_mat3(&si), want);
        // skw(curl A) = 1/2 mskw[div(A^T) - grad tr A]
        let a = outer(&[x(0), x(1).mul(&x(1)), x(2)], &[x(2), konst(1), x(0).mul(&x(1))]);
        let lhs = curl_mat3(&a).skw();
        let rhs = mskw_of_grad_div_combo(&a).scale_coeff(&rat(1, 2));
        assert_eq!(lhs, rhs);
        // tr(tau cross x) = -2 x . vskw tau
        let xv = [x(0), x(1), x(2)];
        let tr = a.cross_right(&xv).trace();
        let w = crate::tensorops::vskw(&a).unwrap();
        let want = dot_vec(xv.as_ref(), w.as_ref()).scale(&rat_i(-2));
        assert_eq!(tr, want);
        // div div mskw v = 0
        assert!(div_div(&mskw(&u)).is_zero());
    }

    #[test]
    fn pi_rt_is_projector() {
        let v = vec![
            x(0).mul(&x(0)).add(&x(1)),
            x(1).mul(&x(2)),
            x(2).mul(&x(2)).mul(&x(0)),
        ];
        let o = origin0();
        let p1 = pi_rt(&v, &o);
        let p2 = pi_rt(&p1, &o);
        for i in 0..3 {
            assert_eq!(p1[i], p2[i]);
        }
        // identity on RT
        let rt = vec![
            x(0).scale(&rat_i(7)).add(&konst(1)),
            x(1).scale(&rat_i(7)).add(&konst(2)),
            x(2).scale(&rat_i(7)).add(&konst(3)),
        ];
        let p = pi_rt(&rt, &o);
        for i in 0..3 {
            assert_eq!(p[i], rt[i]);
        }
    }

    #[test]
    fn koszul_compositions_vanish() {
        let o = origin0();
        // (p x x^T) cross x = 0
        let p = PolyMat::scalar(x(0).mul(&x(1)));
        let xxt = Op::XxT(o.clone()).apply(&p).unwrap();
        assert!(Op::CrossX(o.clone()).apply(&xxt).unwrap().is_zero());
        // (tau cross x) . x = 0
        let a = outer(&[x(0), x(1), x(2).mul(&x(2))], &[konst(1), x(0), x(1)]);
        let c = Op::CrossX(o.clone()).apply(&a).unwrap();
        assert!(Op::DotX(o.clone()).apply(&c).unwrap().is_zero());
        // pi_RT(tau . x) = 0 for trace-free tau
        let t = a.dev();
        let tx = Op::DotX(o.clone()).apply(&t).unwrap();
        assert!(Op::PiRT(o).apply(&tx).unwrap().is_zero());
    }

    #[test]
    fn surface_identities_rational_frame() {
        // unit rational normal (1,2,2)/3
        let n = vec![rat(1, 3), rat(2, 3), rat(2, 3)];
        let v = vec![
            x(0).mul(&x(1)).mul(&x(2)),
            x(0).mul(&x(0)).sub(&x(2)),
            x(1).mul(&x(1)).mul(&x(0)),
        ];
        // rot_F v = -div_F (n x v)
        let rot = rot_f_emb(&v, &n);
        let nv = const_vec(3, &n);
        let nxv = cross3(
            &[nv[0].clone(), nv[1].clone(), nv[2].clone()],
            &[v[0].clone(), v[1].clone(), v[2].clone()],
        );
        let df = div_f(nxv.as_ref(), &n);
        assert_eq!(rot, df.neg());
        // div_F v = rot_F (n x v)
        let dv = div_f(&v, &n);
        let rot2 = rot_f_emb(nxv.as_ref(), &n);
        assert_eq!(dv, rot2);
        // n x (curl v) = grad(n.v) - d_n v
        let c = curl_vec3(&v);
        let lhs = cross3(
            &[nv[0].clone(), nv[1].clone(), nv[2].clone()],
            &[c[0].clone(), c[1].clone(), c[2].clone()],
        );
        let ndotv = dot_vec(&nv, &v);
        let g = grad_scalar(&ndotv);
        for i in 0..3 {
            let rhs = g[i].sub(&ddn(&v[i], &n));
            assert_eq!(lhs[i], rhs);
        }
        // div_F curl_F q = 0 and rot_F grad_F q = 0
        let q = x(0).mul(&x(1)).mul(&x(1)).add(&x(2).mul(&x(0)));
        let curlfq = nabla_f_perp(&q, &n);
        assert!(div_f(curlfq.as_ref(), &n).is_zero());
        let gradfq = grad_f(&q, &n);
        assert!(rot_f_emb(&gradfq, &n).is_zero());
    }
}
