//! Bubble spaces of the sym-curl element, the interior (trace-free-DOF)
//! subspace of the symmetric element, and the bubble complexes in 3D
//! (floating certificates) and 2D (fully exact).
//!
//! The 3D bubble space is spanned by `p * b_F * psi_i^F` where the three
//! constant tensors per face are built from the global face frame; the
//! interior block multiplies the cell bubble against the eight
//! `psi_1^F, psi_2^F`, which form a basis of the trace-free matrices.

use num_traits::Zero;
use rayon::prelude::*;

use crate::bigfloat::{bf0, BigF, BigFloatMatrix};
use crate::diffops::{dev_grad, div_div, sym_curl};
use crate::error::{Error, Result};
use crate::exactla::{rat_i, ExactMatrix, Rat};
use crate::femdofs::{boundary_dof_matrix, ElementDef, ElementKind, TetCtx, VolWeight};
use crate::polyring::{homogeneous_monomials, monomial_basis, MultiIndex, Poly, PolyF, PolyR};
use crate::polyspaces::{self, SpaceClass};
use crate::simplexgeo::{Tet, Tri, TET_FACES};
use crate::tensorops::{PolyMat, PolyMatR};
use crate::tol;
use crate::tracesgreen::{
    poly_max_coeff, restrict, to_float_mat, tr1_perp_symcurl, tr2_symcurl,
};

/// Run `f` at the default precision; on an ambiguous rank gap escalate
/// once to the pinned higher precision, then give up.
pub fn with_escalation<T>(prec: u32, f: impl Fn(u32) -> Result<T>) -> Result<T> {
    match f(prec) {
        Err(Error::RankGap { .. }) => f(tol::ESCALATED_PREC),
        other => other,
    }
}

/// The three constant trace-free tensors of a face frame.
pub fn psi_mats(ctx: &TetCtx, f: usize) -> [PolyMat<BigF>; 3] {
    let prec = ctx.prec;
    let fr = &ctx.faces[f].frame;
    let const3 = |v: &[BigF]| -> Vec<PolyF> {
        v.iter().map(|c| Poly::constant(3, c.clone())).collect()
    };
    let t1 = const3(&fr.t1);
    let t2 = const3(&fr.t2);
    let n = const3(&fr.n);
    let psi1 = crate::tensorops::outer(&t1, &n);
    let psi2 = crate::tensorops::outer(&t2, &n);
    let mut psi3 = crate::tensorops::outer(&t1, &t1).add(&crate::tensorops::outer(&t2, &t2));
    let two = BigF::with_val(prec, 2);
    psi3 = psi3.sub(&crate::tensorops::outer(&n, &n).scale_coeff(&two));
    [psi1, psi2, psi3]
}

/// Monomials of `P_deg(F)` in the barycentric coordinates of face `f`,
/// as exact 3D polynomials.
fn face_poly_basis(tet: &Tet, f: usize, deg: i64) -> Vec<PolyR> {
    if deg < 0 {
        return Vec::new();
    }
    let s = {
        let mut v = TET_FACES[f];
        v.sort_by_key(|&i| tet.gids[i]);
        v
    };
    homogeneous_monomials(3, deg as u32)
        .into_iter()
        .map(|m| {
            let mut q = PolyR::constant(3, rat_i(1));
            for (pos, &lv) in s.iter().enumerate() {
                for _ in 0..m.0[pos] {
                    q = q.mul(tet.lambda(lv));
                }
            }
            q
        })
        .collect()
}

/// Monomials of `P_deg(K)` in all four barycentric coordinates.
fn cell_poly_basis(tet: &Tet, deg: i64) -> Vec<PolyR> {
    if deg < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let deg = deg as u16;
    for a in 0..=deg {
        for b in 0..=(deg - a) {
            for c in 0..=(deg - a - b) {
                let d = deg - a - b - c;
                let mut q = PolyR::constant(3, rat_i(1));
                for (lv, &e) in [a, b, c, d].iter().enumerate() {
                    for _ in 0..e {
                        q = q.mul(tet.lambda(lv));
                    }
                }
                out.push(q);
            }
        }
    }
    out
}

pub struct BubbleBasis {
    pub l: u32,
    /// All basis elements; face blocks first (face-major, psi-major), then
    /// the interior block.
    pub elements: Vec<PolyMat<BigF>>,
    pub face_block_len: usize,
}

/// Basis of the sym-curl bubble space `B_{l+1}`:
/// `b_F P_{l-2}(F) {psi_1,psi_2,psi_3}` per face plus
/// `b_K P_{l-3}(K) {psi_1^F, psi_2^F}`.
pub fn bubble_basis(ctx: &TetCtx, l: u32) -> Result<BubbleBasis> {
    if l < 2 {
        return Err(Error::ParamRange("bubble space needs l >= 2".into()));
    }
    let prec = ctx.prec;
    let tet = &ctx.tet;
    let mut elements = Vec::new();
    for f in 0..4 {
        let psis = psi_mats(ctx, f);
        let bf = tet.bubble_face(f);
        for psi in &psis {
            for q in face_poly_basis(tet, f, l as i64 - 2) {
                let scalar = q.mul(&bf).to_float(prec);
                elements.push(psi.scale_poly(&scalar));
            }
        }
    }
    let face_block_len = elements.len();
    let bk = tet.bubble_cell();
    for f in 0..4 {
        let psis = psi_mats(ctx, f);
        for psi in psis.iter().take(2) {
            for q in cell_poly_basis(tet, l as i64 - 3) {
                let scalar = q.mul(&bk).to_float(prec);
                elements.push(psi.scale_poly(&scalar));
            }
        }
    }
    let expected = polyspaces::dim_bubble_symcurl(l as i64) as usize;
    if elements.len() != expected {
        return Err(Error::Internal(format!(
            "bubble basis count {} != formula {expected}",
            elements.len()
        )));
    }
    // independence at working precision
    let m = linearize_dev(prec, &elements, l + 1);
    let r = m.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    if r != elements.len() {
        return Err(Error::Internal(format!(
            "bubble basis rank {r} of {}",
            elements.len()
        )));
    }
    Ok(BubbleBasis {
        l,
        elements,
        face_block_len,
    })
}

/// Coefficient matrix of trace-free tensors over 8 components x monomials.
fn linearize_dev(prec: u32, els: &[PolyMat<BigF>], deg: u32) -> BigFloatMatrix {
    let monos = monomial_basis(3, deg);
    let pos = [
        (0usize, 0usize),
        (1, 1),
        (0, 1),
        (0, 2),
        (1, 0),
        (1, 2),
        (2, 0),
        (2, 1),
    ];
    let mut m = BigFloatMatrix::zeros(prec, 8 * monos.len(), els.len());
    for (j, el) in els.iter().enumerate() {
        for (c, (a, b)) in pos.iter().enumerate() {
            for (idx, coeff) in &el.at(*a, *b).terms {
                let p = monos.binary_search(idx).expect("degree bound");
                m[(c * monos.len() + p, j)] = coeff.clone();
            }
        }
    }
    m
}

/// Coefficient matrix of symmetric tensors over 6 components x monomials.
fn linearize_sym(prec: u32, els: &[PolyMat<BigF>], deg: u32) -> BigFloatMatrix {
    let monos = monomial_basis(3, deg);
    let pos = [(0usize, 0usize), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
    let mut m = BigFloatMatrix::zeros(prec, 6 * monos.len(), els.len());
    for (j, el) in els.iter().enumerate() {
        for (c, (a, b)) in pos.iter().enumerate() {
            for (idx, coeff) in &el.at(*a, *b).terms {
                let p = monos.binary_search(idx).expect("degree bound");
                m[(c * monos.len() + p, j)] = coeff.clone();
            }
        }
    }
    m
}

fn hstack_f(a: &BigFloatMatrix, b: &BigFloatMatrix) -> BigFloatMatrix {
    assert_eq!(a.rows, b.rows);
    BigFloatMatrix::from_fn(a.prec, a.rows, a.cols + b.cols, |i, j| {
        if j < a.cols {
            a[(i, j)].clone()
        } else {
            b[(i, j - a.cols)].clone()
        }
    })
}

/// Volume weights `(phi, q)_K` over the bubble basis (sym-curl DOFs).
pub fn bubble_vol_weights(ctx: &TetCtx, l: u32, phi_deg: u32) -> Result<Vec<VolWeight>> {
    let basis = bubble_basis(ctx, l)?;
    Ok(basis
        .elements
        .par_iter()
        .map(|el| VolWeight::new(ctx, el, phi_deg, "vol-bubble-moment"))
        .collect())
}

/// Volume weights `(phi, varsigma)_K` over an independent basis of
/// `sym curl B_{l+1}` (the symmetric-element alternative interior DOFs).
pub fn symcurl_bubble_weights(ctx: &TetCtx, l: u32, phi_deg: u32) -> Result<Vec<VolWeight>> {
    let basis = bubble_basis(ctx, l)?;
    let imgs: Vec<PolyMat<BigF>> = basis.elements.par_iter().map(sym_curl).collect();
    let m = linearize_sym(ctx.prec, &imgs, l);
    let keep = m.independent_columns_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let expected = polyspaces::dim_ring_ker(l as i64) as usize;
    if keep.len() != expected {
        return Err(Error::Internal(format!(
            "sym curl bubble image rank {} != formula {expected}",
            keep.len()
        )));
    }
    Ok(keep
        .into_par_iter()
        .map(|j| VolWeight::new(ctx, &imgs[j], phi_deg, "vol-symcurl-bubble-moment"))
        .collect())
}

/// Worst max-coefficient of all bubble elements restricted to all edges
/// (they vanish on every edge) relative to their coefficient scale.
pub fn bubble_edge_residual(ctx: &TetCtx, basis: &BubbleBasis) -> BigF {
    let prec = ctx.prec;
    let mut worst = bf0(prec);
    for el in &basis.elements {
        let mut scale = bf0(prec);
        for p in &el.entries {
            let m = poly_max_coeff(p);
            if m > scale {
                scale = m;
            }
        }
        if scale.is_zero() {
            continue;
        }
        for e in 0..6 {
            for p in &el.entries {
                let r = restrict(p, &ctx.edges[e].chart);
                let mut m = poly_max_coeff(&r);
                m /= &scale;
                if m > worst {
                    worst = m;
                }
            }
        }
    }
    worst
}

/// Worst residual of the two sym-curl traces of all bubble elements on
/// all faces (they vanish by construction of the space).
pub fn bubble_trace_residual(ctx: &TetCtx, basis: &BubbleBasis) -> BigF {
    let prec = ctx.prec;
    let worst = basis
        .elements
        .par_iter()
        .map(|el| {
            let mut w = bf0(prec);
            let mut scale = bf0(prec);
            for p in &el.entries {
                let m = poly_max_coeff(p);
                if m > scale {
                    scale = m;
                }
            }
            if scale.is_zero() {
                return w;
            }
            for f in 0..4 {
                let fr = &ctx.faces[f].frame;
                let t1p = tr1_perp_symcurl(el, &fr.n);
                for p in &t1p.entries {
                    let r = restrict(p, &ctx.faces[f].chart);
                    let mut m = poly_max_coeff(&r);
                    m /= &scale;
                    if m > w {
                        w = m;
                    }
                }
                for comp in tr2_symcurl(el, &fr.n) {
                    let r = restrict(&comp, &ctx.faces[f].chart);
                    let mut m = poly_max_coeff(&r);
                    m /= &scale;
                    if m > w {
                        w = m;
                    }
                }
            }
            w
        })
        .reduce(|| bf0(prec), |a, b| if a > b { a } else { b });
    worst
}

/// `n_i^T (sym curl tau) n_j` on the shared edge of faces i and j, for
/// every bubble element: the sym-curl image loses its edge values too.
pub fn bubble_symcurl_edge_residual(ctx: &TetCtx, basis: &BubbleBasis) -> BigF {
    let prec = ctx.prec;
    let mut worst = bf0(prec);
    for el in &basis.elements {
        let sc = sym_curl(el);
        let mut scale = bf0(prec);
        for p in &sc.entries {
            let m = poly_max_coeff(p);
            if m > scale {
                scale = m;
            }
        }
        if scale.is_zero() {
            continue;
        }
        for e in 0..6 {
            // the two faces sharing edge e are those containing both endpoints
            let [a, b] = crate::simplexgeo::TET_EDGES[e];
            let faces: Vec<usize> = (0..4)
                .filter(|&f| TET_FACES[f].contains(&a) && TET_FACES[f].contains(&b))
                .collect();
            let fi = ctx.faces[faces[0]].frame.outward(prec);
            let fj = ctx.faces[faces[1]].frame.outward(prec);
            let s = sandwich_const(&sc, &fi, &fj);
            let r = restrict(&s, &ctx.edges[e].chart);
            let mut m = poly_max_coeff(&r);
            m /= &scale;
            if m > worst {
                worst = m;
            }
        }
    }
    worst
}

fn sandwich_const(m: &PolyMat<BigF>, a: &[BigF], b: &[BigF]) -> PolyF {
    let av = crate::diffops::const_vec(m.arity, a);
    let bv = crate::diffops::const_vec(m.arity, b);
    m.sandwich(&av, &bv)
}

impl crate::simplexgeo::FaceFrame {
    pub fn outward(&self, prec: u32) -> Vec<BigF> {
        let sign = BigF::with_val(prec, self.outward_sign);
        self.n
            .iter()
            .map(|x| {
                let mut y = x.clone();
                y *= &sign;
                y
            })
            .collect()
    }
}

/// Span checks on the constant frame tensors: the eight
/// `psi_1^F, psi_2^F` span the trace-free matrices, and the eight edge
/// tensors built from an edge's two face normals are independent.
pub fn psi_span_ok(ctx: &TetCtx) -> Result<bool> {
    let prec = ctx.prec;
    let mut mats = Vec::new();
    for f in 0..4 {
        let p = psi_mats(ctx, f);
        mats.push(p[0].clone());
        mats.push(p[1].clone());
    }
    let m = linearize_dev(prec, &mats, 0);
    if m.rank_gap(tol::RANK_EPS, tol::RANK_GAP)? != 8 {
        return Ok(false);
    }
    // edge tensors: n1 t^T, n2 t^T, n1 s1^T, n2 s2^T, t n1^T, t n2^T,
    // t t^T - s1 s1^T, t t^T - s2 s2^T
    for e in 0..6 {
        let [a, b] = crate::simplexgeo::TET_EDGES[e];
        let faces: Vec<usize> = (0..4)
            .filter(|&f| TET_FACES[f].contains(&a) && TET_FACES[f].contains(&b))
            .collect();
        let t = &ctx.edges[e].frame.t;
        let n1 = ctx.faces[faces[0]].frame.outward(prec);
        let n2 = ctx.faces[faces[1]].frame.outward(prec);
        let s1 = crate::simplexgeo::cross_f(prec, t, &n1);
        let s2 = crate::simplexgeo::cross_f(prec, t, &n2);
        let cv = |v: &[BigF]| -> Vec<PolyF> {
            v.iter().map(|c| Poly::constant(3, c.clone())).collect()
        };
        let o = |x: &[BigF], y: &[BigF]| crate::tensorops::outer(&cv(x), &cv(y));
        let tensors = [o(&n1, t),
            o(&n2, t),
            o(&n1, &s1),
            o(&n2, &s2),
            o(t, &n1),
            o(t, &n2),
            o(t, t).sub(&o(&s1, &s1)),
            o(t, t).sub(&o(&s2, &s2))];
        // linearize over all 9 entries (these are not trace-free by pairs)
        let monos = monomial_basis(3, 0);
        let mut m = BigFloatMatrix::zeros(prec, 9 * monos.len(), tensors.len());
        for (j, el) in tensors.iter().enumerate() {
            for i in 0..3 {
                for k in 0..3 {
                    if let Some(c) = el.at(i, k).terms.get(&MultiIndex::zero()) {
                        m[(i * 3 + k, j)] = c.clone();
                    }
                }
            }
        }
        if m.rank_gap(tol::RANK_EPS, tol::RANK_GAP)? != 8 {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// interior subspace of the symmetric element
// ---------------------------------------------------------------------

pub struct RingBasis {
    pub dim: usize,
    /// Coefficients over the shape basis of `Sigma_{l,k}`.
    pub coeffs: Vec<Vec<BigF>>,
    pub elements: Vec<PolyMat<BigF>>,
}

/// Shape functions of `Sigma_{l,k}(K)` whose vertex, edge and face DOFs
/// all vanish; computed as a thresholded floating nullspace.
pub fn ring_sigma_basis(l: u32, k: u32, tet: &Tet, prec: u32) -> Result<RingBasis> {
    with_escalation(prec, |p| ring_sigma_basis_at(l, k, tet, p))
}

fn ring_sigma_basis_at(l: u32, k: u32, tet: &Tet, prec: u32) -> Result<RingBasis> {
    let def = ElementDef::new(ElementKind::DivDiv3d, l, k)?;
    let ctx = TetCtx::new(tet, prec, 2 * (l.max(k) + 2));
    let h = crate::femdofs::cell_scale(&ctx.tet.verts);
    let shape = crate::femdofs::shape_basis(&def, &ctx.bary, &h)?;
    let shape_f: Vec<PolyMat<BigF>> = shape
        .elements
        .iter()
        .map(|e| to_float_mat(e, prec))
        .collect();
    let (bmat, nrows) = boundary_dof_matrix(&def, &ctx, &shape_f)?;
    let rank = bmat.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    if rank != nrows {
        return Err(Error::Internal(format!(
            "boundary DOFs dependent: rank {rank} of {nrows}"
        )));
    }
    let coeffs = bmat.nullspace(rank);
    let elements: Vec<PolyMat<BigF>> = coeffs
        .iter()
        .map(|c| {
            let mut acc = PolyMat::zeros(3, prec, 3, 3);
            for (j, w) in c.iter().enumerate() {
                if !w.is_zero() {
                    acc = acc.add(&shape_f[j].scale_coeff(w));
                }
            }
            acc
        })
        .collect();
    Ok(RingBasis {
        dim: coeffs.len(),
        coeffs,
        elements,
    })
}

// ---------------------------------------------------------------------
// bubble complexes
// ---------------------------------------------------------------------

#[derive(Clone, Debug, serde::Serialize)]
pub struct BubbleComplexReport {
    pub l: u32,
    pub k: u32,
    pub dims: Vec<usize>,
    pub rank_devgrad: usize,
    pub rank_symcurl: usize,
    pub rank_divdiv: usize,
    pub inclusions_ok: bool,
    pub compositions_ok: bool,
    pub exact: bool,
    pub max_residual: f64,
}

/// Certify the 3D bubble chain
/// `0 -> B_{l+2}(R3) -> B_{l+1}(sym curl; T) -> ring(Sigma_{l,k}) ->
///  P_{k-2} orth P_1 -> 0` at working precision.
pub fn verify_bubble_complex(l: u32, k: u32, tet: &Tet, prec: u32) -> Result<BubbleComplexReport> {
    with_escalation(prec, |p| verify_bubble_complex_at(l, k, tet, p))
}

fn verify_bubble_complex_at(l: u32, k: u32, tet: &Tet, prec: u32) -> Result<BubbleComplexReport> {
    let ctx = TetCtx::new(tet, prec, 2 * (l.max(k) + 2));
    let bk = tet.bubble_cell();
    // B_{l+2}(R3) = b_K P_{l-2}(K; R3), exact
    let mut bvec: Vec<Vec<PolyR>> = Vec::new();
    for c in 0..3 {
        for m in monomial_basis(3, l.saturating_sub(2)) {
            if (m.deg() as i64) > l as i64 - 2 {
                continue;
            }
            let mut v = vec![PolyR::zero(3, ()); 3];
            v[c] = PolyR::monomial(3, m, rat_i(1)).mul(&bk);
            bvec.push(v);
        }
    }
    let dim_b = bvec.len();
    let bubble = bubble_basis(&ctx, l)?;
    let dim_bubble = bubble.elements.len();

    // dev grad images (exact, then floated)
    let devgrad_imgs: Vec<PolyMat<BigF>> = bvec
        .iter()
        .map(|v| to_float_mat(&dev_grad(v), prec))
        .collect();
    let m_dev = linearize_dev(prec, &devgrad_imgs, l + 1);
    let rank_devgrad = m_dev.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let m_bub = linearize_dev(prec, &bubble.elements, l + 1);
    let r_bub = m_bub.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let incl_dev =
        hstack_f(&m_bub, &m_dev).rank_gap(tol::RANK_EPS, tol::RANK_GAP)? == r_bub;

    // sym curl images of the bubble basis
    let symcurl_imgs: Vec<PolyMat<BigF>> =
        bubble.elements.par_iter().map(sym_curl).collect();
    let deg_s = l.max(k);
    let m_sc = linearize_sym(prec, &symcurl_imgs, deg_s);
    let rank_symcurl = m_sc.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;

    // interior subspace and its divdiv image
    let ring = ring_sigma_basis(l, k, tet, prec)?;
    let dim_ring = ring.dim;
    let m_ring = linearize_sym(prec, &ring.elements, deg_s);
    let r_ring = m_ring.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let incl_sc =
        hstack_f(&m_ring, &m_sc).rank_gap(tol::RANK_EPS, tol::RANK_GAP)? == r_ring;

    // div div of the interior subspace: rank and orthogonality to P_1
    let dd_imgs: Vec<PolyF> = ring.elements.iter().map(div_div).collect();
    let monos_dd = monomial_basis(3, k.saturating_sub(2));
    let mut m_dd = BigFloatMatrix::zeros(prec, monos_dd.len(), dd_imgs.len());
    for (j, p) in dd_imgs.iter().enumerate() {
        for (idx, c) in &p.terms {
            let pos = monos_dd.binary_search(idx).expect("degree k-2");
            m_dd[(pos, j)] = c.clone();
        }
    }
    let rank_divdiv = if dd_imgs.is_empty() {
        0
    } else {
        m_dd.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?
    };
    let orth = polyspaces::poly_orth_p1(3, k as i64 - 2, tet.verts.as_ref())?;
    let dim_orth = orth.len();
    // orthogonality of divdiv images to P_1 (moment residuals)
    let mut max_residual: f64 = 0.0;
    let p1 = polyspaces::full_space(3, SpaceClass::Scalar, 1);
    for p in &dd_imgs {
        let scale = poly_max_coeff(p).to_f64().max(1.0);
        for lin in &p1.elements {
            let w = ctx.weighted_vector(&lin.at(0, 0).to_float(prec), k.saturating_sub(2));
            let v = ctx.pair_with_weighted(p, &w, k.saturating_sub(2));
            max_residual = max_residual.max((v.to_f64() / scale).abs());
        }
    }

    // compositions: sym curl (dev grad) = 0 exactly; div div (sym curl) ~ 0
    let mut compositions_ok = true;
    for v in &bvec {
        if !sym_curl(&dev_grad(v)).is_zero() {
            compositions_ok = false;
        }
    }
    for (img, el) in symcurl_imgs.iter().zip(bubble.elements.iter()) {
        let dd = div_div(img);
        let mut scale = bf0(prec);
        for p in &el.entries {
            let m = poly_max_coeff(p);
            if m > scale {
                scale = m;
            }
        }
        let mut r = poly_max_coeff(&dd);
        if !scale.is_zero() {
            r /= &scale;
        }
        let rv = r.to_f64();
        max_residual = max_residual.max(rv);
        if rv > tol::FRAME_IDENTITY_TOL {
            compositions_ok = false;
        }
    }

    let exact = rank_devgrad == dim_b
        && rank_symcurl == dim_bubble - rank_devgrad
        && rank_symcurl == dim_ring - rank_divdiv
        && rank_divdiv == dim_orth
        && incl_dev
        && incl_sc
        && compositions_ok;
    Ok(BubbleComplexReport {
        l,
        k,
        dims: vec![dim_b, dim_bubble, dim_ring, dim_orth],
        rank_devgrad,
        rank_symcurl,
        rank_divdiv,
        inclusions_ok: incl_dev && incl_sc,
        compositions_ok,
        exact,
        max_residual,
    })
}

// ---------------------------------------------------------------------
// 2D bubble complex (exact)
// ---------------------------------------------------------------------

#[derive(Clone, Debug, serde::Serialize)]
pub struct BubbleComplex2dReport {
    pub l: u32,
    pub k: u32,
    pub dims: Vec<usize>,
    pub rank_symcurl: usize,
    pub rank_divdiv: usize,
    pub exact: bool,
}

/// Exact certificate of the 2D bubble chain
/// `0 -> b_F P_{l-2}(F;R2) -> ring(Sigma_{l,k}(F)) -> P_{k-2} orth P_1 -> 0`.
///
/// The boundary conditions are imposed with unnormalized rational edge
/// frames (each functional scaled by a positive constant), so the ring
/// space comes out of an exact nullspace.
pub fn verify_2d_bubble_complex(l: u32, k: u32, tri: &Tri) -> Result<BubbleComplex2dReport> {
    let sigma = polyspaces::sigma2(l, k, Some(tri.barycenter()))?;
    let verts: Vec<Vec<Rat>> = tri.verts.to_vec();
    // exact boundary rows
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let sym_pos = [(0usize, 0usize), (1usize, 1usize), (0usize, 1usize)];
    for v in 0..3 {
        for (i, j) in sym_pos {
            rows.push(
                sigma
                    .elements
                    .iter()
                    .map(|e| e.at(i, j).eval(&tri.verts[v]))
                    .collect(),
            );
        }
    }
    for e in 0..3 {
        let d = tri.edge_dir(e);
        let dperp = [-d[1].clone(), d[0].clone()];
        let dvec: Vec<PolyR> = d.iter().map(|c| PolyR::constant(2, c.clone())).collect();
        let nvec: Vec<PolyR> = dperp.iter().map(|c| PolyR::constant(2, c.clone())).collect();
        let chart = tri.edge_chart(e);
        let d_dot_d = PolyR::constant(2, &d[0] * &d[0] + &d[1] * &d[1]);
        for p in 0..=(l as i64 - 2).max(-1) {
            if p < 0 {
                continue;
            }
            let w = PolyR::monomial(1, MultiIndex([p as u16, 0, 0]), rat_i(1));
            rows.push(
                sigma
                    .elements
                    .iter()
                    .map(|el| {
                        let s = el.sandwich(&nvec, &nvec);
                        let r = s.subst(chart.as_ref()).mul(&w);
                        int01_exact(&r)
                    })
                    .collect(),
            );
        }
        for p in 0..=(l as i64 - 1) {
            let w = PolyR::monomial(1, MultiIndex([p as u16, 0, 0]), rat_i(1));
            rows.push(
                sigma
                    .elements
                    .iter()
                    .map(|el| {
                        // scaled shear: (d.grad)(d^T tau dperp) + (d.d)(dperp . div tau)
                        let tn = el.sandwich(&dvec, &nvec);
                        let mut s = PolyR::zero(2, ());
                        for a in 0..2 {
                            s = s.add(&tn.derivative(a).scale(&d[a]));
                        }
                        let divs = crate::diffops::div_mat(el);
                        let mut nd = PolyR::zero(2, ());
                        for a in 0..2 {
                            nd = nd.add(&divs[a].scale(&dperp[a]));
                        }
                        s = s.add(&nd.mul(&d_dot_d));
                        let r = s.subst(chart.as_ref()).mul(&w);
                        int01_exact(&r)
                    })
                    .collect(),
            );
        }
    }
    let bmat = ExactMatrix::from_rows(rows);
    let ring_coeffs = bmat.nullspace_basis();
    let dim_ring = ring_coeffs.len();
    let ring_elements: Vec<PolyMatR> = ring_coeffs
        .iter()
        .map(|c| {
            let mut acc = PolyMat::zeros(2, (), 2, 2);
            for (j, w) in c.iter().enumerate() {
                if !w.is_zero() {
                    acc = acc.add(&sigma.elements[j].scale_coeff(w));
                }
            }
            acc
        })
        .collect();

    // bubble block b_F P_{l-2}(F; R2) and its sym curl images
    let bf = tri.bubble();
    let mut bubbles: Vec<Vec<PolyR>> = Vec::new();
    for c in 0..2 {
        for m in monomial_basis(2, l.saturating_sub(2)) {
            let mut v = vec![PolyR::zero(2, ()); 2];
            v[c] = PolyR::monomial(2, m, rat_i(1)).mul(&bf);
            bubbles.push(v);
        }
    }
    let dim_bubble = bubbles.len();
    let symcurl_imgs: Vec<PolyMatR> = bubbles
        .iter()
        .map(|v| crate::diffops::sym_curl_f(v))
        .collect();

    // ranks in the ambient coordinates of P_max(S; 2d)
    let ambient = polyspaces::full_space(2, SpaceClass::Sym, l.max(k) as i64);
    let lin = |els: &[PolyMatR]| -> ExactMatrix {
        let cols: Vec<Vec<Rat>> = els.iter().map(|e| ambient.linearize(e).unwrap()).collect();
        ExactMatrix::from_columns(&cols)
    };
    let m_ring = lin(&ring_elements);
    let m_sc = lin(&symcurl_imgs);
    let rank_symcurl = m_sc.rank();
    let r_ring = m_ring.rank();
    let incl = m_ring.hstack(&m_sc).rank() == r_ring;

    // div div of the ring: exact rank and containment in P_{k-2} orth P_1
    let orth = polyspaces::poly_orth_p1(2, k as i64 - 2, &verts)?;
    let dd_imgs: Vec<PolyR> = ring_elements.iter().map(div_div).collect();
    let scal_amb = polyspaces::full_space(2, SpaceClass::Scalar, k as i64 - 2);
    let cols: Vec<Vec<Rat>> = dd_imgs
        .iter()
        .map(|p| scal_amb.linearize(&PolyMat::scalar(p.clone())).unwrap())
        .collect();
    let m_dd = ExactMatrix::from_columns(&cols);
    let rank_divdiv = m_dd.rank();
    let mut contained = true;
    let p1 = polyspaces::full_space(2, SpaceClass::Scalar, 1);
    for p in &dd_imgs {
        for lin in &p1.elements {
            let prod = p.mul(lin.at(0, 0));
            if !crate::polyring::integrate_simplex(&prod, &verts)?.is_zero() {
                contained = false;
            }
        }
    }
    // compositions vanish exactly
    let mut comp_ok = true;
    for img in &symcurl_imgs {
        if !div_div(img).is_zero() {
            comp_ok = false;
        }
    }

    let exact = rank_symcurl == dim_bubble
        && rank_symcurl == dim_ring - rank_divdiv
        && rank_divdiv == orth.len()
        && incl
        && contained
        && comp_ok
        && r_ring == dim_ring;
    Ok(BubbleComplex2dReport {
        l,
        k,
        dims: vec![dim_bubble, dim_ring, orth.len()],
        rank_symcurl,
        rank_divdiv,
        exact,
    })
}

fn int01_exact(p: &PolyR) -> Rat {
    let mut acc = Rat::zero();
    for (m, c) in &p.terms {
        acc += c / rat_i(m.0[0] as i64 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_PREC;

    #[test]
    fn bubble_dimensions() {
        let p = DEFAULT_PREC;
        let tet = Tet::reference();
        let ctx = TetCtx::new(&tet, p, 12);
        let b3 = bubble_basis(&ctx, 3).unwrap();
        assert_eq!(b3.elements.len(), 44);
        let b4 = bubble_basis(&ctx, 4).unwrap();
        assert_eq!(b4.elements.len(), 104);
    }

    #[test]
    fn bubble_edge_and_trace_vanishing() {
        let p = DEFAULT_PREC;
        let tet = Tet::random(5);
        let ctx = TetCtx::new(&tet, p, 12);
        let b = bubble_basis(&ctx, 3).unwrap();
        assert!(bubble_edge_residual(&ctx, &b).to_f64() < 1e-55);
        assert!(bubble_trace_residual(&ctx, &b).to_f64() < 1e-55);
        assert!(bubble_symcurl_edge_residual(&ctx, &b).to_f64() < 1e-55);
        assert!(psi_span_ok(&ctx).unwrap());
    }

    #[test]
    fn ring_dimension_at_33() {
        let tet = Tet::reference();
        let ring = ring_sigma_basis(3, 3, &tet, DEFAULT_PREC).unwrap();
        assert_eq!(ring.dim, 32);
    }

    #[test]
    fn bubble_complex_33() {
        let tet = Tet::reference();
        let rep = verify_bubble_complex(3, 3, &tet, DEFAULT_PREC).unwrap();
        assert_eq!(rep.dims, vec![12, 44, 32, 0]);
        assert!(rep.exact, "{rep:?}");
    }

    #[test]
    fn bubble_complex_2d() {
        let tri = Tri::reference();
        let rep = verify_2d_bubble_complex(3, 3, &tri).unwrap();
        assert_eq!(rep.dims, vec![6, 6, 0]);
        assert!(rep.exact, "{rep:?}");
        let rep = verify_2d_bubble_complex(4, 4, &tri).unwrap();
        assert_eq!(rep.dims[2], 3);
        assert!(rep.exact, "{rep:?}");
    }
}
