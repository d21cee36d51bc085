//! Degree-of-freedom sets for the four element families, their
//! evaluation against arbitrary shape functions, unisolvence matrices
//! and dual bases.
//!
//! DOFs are emitted grouped by geometric entity, with frames, charts and
//! weight bases taken from global entity data only, so two elements
//! sharing an entity generate bit-identical functionals.  Moments are
//! computed against precomputed monomial integral tables at working
//! precision (the integral weights themselves are exact rationals).

use rayon::prelude::*;

use crate::bigfloat::{bf0, bf_rat, BigF, BigFloatMatrix};
use crate::diffops::{const_vec, curl_mat3, ddn, hess_scalar, xbar};
use crate::error::{Error, Result};
use crate::exactla::Rat;
use crate::polyring::{monomial_basis, MultiIndex, Poly, PolyF, PolyR};
use crate::polyspaces::{self, SpaceBasis, SpaceClass};
use crate::simplexgeo::{EdgeFrame, FaceFrame, Tet, Tri};
use crate::tensorops::{dot_vec, PolyMat};
use crate::tol;
use crate::tracesgreen::{restrict, to_float_mat, tr1_divdiv, tr1_perp_symcurl, tr2_divdiv, tr2_symcurl};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ElementKind {
    DivDiv3d,
    DivDiv3dBubble,
    SymCurl3d,
    SymCurl3dLagrange,
    Hermite3d,
    DivDiv2d,
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::DivDiv3d => "divdiv3d",
            ElementKind::DivDiv3dBubble => "divdiv3d-bubble",
            ElementKind::SymCurl3d => "symcurl3d",
            ElementKind::SymCurl3dLagrange => "symcurl3d-lagrange",
            ElementKind::Hermite3d => "hermite3d",
            ElementKind::DivDiv2d => "divdiv2d",
        }
    }

    pub fn parse(s: &str) -> Option<ElementKind> {
        [
            ElementKind::DivDiv3d,
            ElementKind::DivDiv3dBubble,
            ElementKind::SymCurl3d,
            ElementKind::SymCurl3dLagrange,
            ElementKind::Hermite3d,
            ElementKind::DivDiv2d,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ElementDef {
    pub kind: ElementKind,
    pub l: u32,
    pub k: u32,
}

impl ElementDef {
    pub fn new(kind: ElementKind, l: u32, k: u32) -> Result<ElementDef> {
        let ok = match kind {
            ElementKind::DivDiv3d | ElementKind::DivDiv3dBubble | ElementKind::DivDiv2d => {
                k >= 3 && l >= 3.max(k.saturating_sub(1))
            }
            ElementKind::SymCurl3d | ElementKind::SymCurl3dLagrange => l >= 3,
            ElementKind::Hermite3d => l >= 3,
        };
        if ok {
            Ok(ElementDef { kind, l, k })
        } else {
            Err(Error::ParamRange(format!(
                "{} invalid for l={l}, k={k}",
                kind.name()
            )))
        }
    }

    pub fn params(&self) -> String {
        match self.kind {
            ElementKind::SymCurl3d | ElementKind::SymCurl3dLagrange | ElementKind::Hermite3d => {
                format!("l={}", self.l)
            }
            _ => format!("l={} k={}", self.l, self.k),
        }
    }
}

/// Global identity of the entity a DOF is attached to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum EntityKey {
    Vertex(usize),
    Edge([usize; 2]),
    Face([usize; 3]),
    Interior,
}

#[derive(Clone, Debug)]
pub struct DofInfo {
    pub tag: &'static str,
    pub entity: EntityKey,
    /// Slot within the entity block (stable across elements).
    pub slot: usize,
}

// ---------------------------------------------------------------------
// precomputed cell contexts
// ---------------------------------------------------------------------

pub struct FaceCtx {
    pub frame: FaceFrame,
    pub chart: Vec<PolyF>,
    pub area2: BigF,
    pub bary: Vec<Rat>,
    /// Frame coordinates (about the face barycenter) as affine polys in (u, v).
    pub xi: [PolyF; 2],
    pub gids: [usize; 3],
}

pub struct EdgeCtx {
    pub frame: EdgeFrame,
    pub chart: Vec<PolyF>,
    pub len: BigF,
    pub gids: [usize; 2],
}

pub struct TetCtx {
    pub tet: Tet,
    pub prec: u32,
    pub maxdeg: u32,
    vol_monos: Vec<MultiIndex>,
    vol_moments: Vec<BigF>,
    pub faces: Vec<FaceCtx>,
    pub edges: Vec<EdgeCtx>,
    pub verts_f: [Vec<BigF>; 4],
    pub bary: Vec<Rat>,
}

impl TetCtx {
    pub fn new(tet: &Tet, prec: u32, maxdeg: u32) -> TetCtx {
        let vol_monos = monomial_basis(3, maxdeg);
        // pullback powers of the chart coordinates, built incrementally
        let chart: Vec<PolyF> = (0..3)
            .map(|i| {
                let mut p = Poly::constant(3, bf_rat(prec, &tet.verts[0][i]));
                for j in 0..3 {
                    let d = &tet.verts[j + 1][i] - &tet.verts[0][i];
                    p = p.add(&Poly::monomial(3, MultiIndex::var(j), bf_rat(prec, &d)));
                }
                p
            })
            .collect();
        let mut pulls: Vec<PolyF> = Vec::with_capacity(vol_monos.len());
        let volf = {
            let mut v = bf_rat(prec, &tet.volume);
            v *= 6u32; // |det J|
            v
        };
        let mut vol_moments = Vec::with_capacity(vol_monos.len());
        for (idx, m) in vol_monos.iter().enumerate() {
            let p = if m.deg() == 0 {
                Poly::constant(3, BigF::with_val(prec, 1))
            } else {
                let ax = (0..3).find(|&i| m.0[i] > 0).unwrap();
                let mut parent = *m;
                parent.0[ax] -= 1;
                let pi = vol_monos[..idx]
                    .binary_search(&parent)
                    .expect("parent monomial precedes child");
                pulls[pi].mul(&chart[ax])
            };
            let mut integral = p.integrate_ref_simplex();
            integral *= &volf;
            vol_moments.push(integral);
            pulls.push(p);
        }
        let faces = (0..4)
            .map(|f| {
                let frame = tet.face_frame(f, prec);
                let chart: Vec<PolyF> =
                    tet.face_chart(f).iter().map(|c| c.to_float(prec)).collect();
                let mut area2 = tet.face_area(f, prec);
                area2 *= 2u32;
                let bary = tet.face_barycenter(f);
                let xi: [PolyF; 2] = std::array::from_fn(|a| {
                    let tvec = if a == 0 { &frame.t1 } else { &frame.t2 };
                    let mut acc = PolyF::zero(2, prec);
                    for i in 0..3 {
                        let shifted =
                            chart[i].sub(&Poly::constant(2, bf_rat(prec, &bary[i])));
                        acc = acc.add(&shifted.scale(&tvec[i]));
                    }
                    acc
                });
                let s = tet.face_verts_sorted(f);
                FaceCtx {
                    frame,
                    chart,
                    area2,
                    bary,
                    xi,
                    gids: [tet.gids[s[0]], tet.gids[s[1]], tet.gids[s[2]]],
                }
            })
            .collect();
        let edges = (0..6)
            .map(|e| {
                let frame = tet.edge_frame(e, prec);
                let chart: Vec<PolyF> =
                    tet.edge_chart(e).iter().map(|c| c.to_float(prec)).collect();
                let len = tet.edge_len(e, prec);
                let (a, b) = tet.edge_verts(e);
                EdgeCtx {
                    frame,
                    chart,
                    len,
                    gids: [tet.gids[a], tet.gids[b]],
                }
            })
            .collect();
        TetCtx {
            tet: tet.clone(),
            prec,
            maxdeg,
            vol_monos,
            vol_moments,
            faces,
            edges,
            verts_f: tet.verts_f(prec),
            bary: tet.barycenter(),
        }
    }

    fn moment(&self, m: &MultiIndex) -> &BigF {
        let i = self
            .vol_monos
            .binary_search(m)
            .expect("moment degree within table");
        &self.vol_moments[i]
    }

    /// `W_alpha = sum_beta b_beta * mom(alpha+beta)` for alpha up to `deg_a`.
    pub fn weighted_vector(&self, b: &PolyF, deg_a: u32) -> Vec<BigF> {
        let monos = monomial_basis(3, deg_a);
        let mut w = vec![bf0(self.prec); monos.len()];
        let mut tmp = bf0(self.prec);
        for (beta, c) in &b.terms {
            for (i, alpha) in monos.iter().enumerate() {
                tmp.assign_from(c);
                tmp *= self.moment(&alpha.mul(beta));
                w[i] += &tmp;
            }
        }
        w
    }

    pub fn pair_with_weighted(&self, a: &PolyF, w: &[BigF], deg_a: u32) -> BigF {
        let monos = monomial_basis(3, deg_a);
        let mut acc = bf0(self.prec);
        let mut tmp = bf0(self.prec);
        for (alpha, c) in &a.terms {
            let i = monos.binary_search(alpha).expect("within degree bound");
            tmp.assign_from(c);
            tmp *= &w[i];
            acc += &tmp;
        }
        acc
    }
}

trait AssignFrom {
    fn assign_from(&mut self, src: &BigF);
}

impl AssignFrom for BigF {
    fn assign_from(&mut self, src: &BigF) {
        use rug::Assign;
        self.assign(src);
    }
}

/// Volume-moment weight: per-entry weighted vectors for one test tensor.
pub struct VolWeight {
    pub rows: usize,
    pub cols: usize,
    /// None for identically-zero entries.
    pub w: Vec<Option<Vec<BigF>>>,
    pub tag: &'static str,
}

impl VolWeight {
    pub fn new(ctx: &TetCtx, varsigma: &PolyMat<BigF>, phi_deg: u32, tag: &'static str) -> VolWeight {
        let w = varsigma
            .entries
            .iter()
            .map(|p| {
                if p.is_zero() {
                    None
                } else {
                    Some(ctx.weighted_vector(p, phi_deg))
                }
            })
            .collect();
        VolWeight {
            rows: varsigma.rows,
            cols: varsigma.cols,
            w,
            tag,
        }
    }

    pub fn pair(&self, ctx: &TetCtx, phi: &PolyMat<BigF>, phi_deg: u32) -> BigF {
        assert_eq!((self.rows, self.cols), (phi.rows, phi.cols));
        let mut acc = bf0(ctx.prec);
        for (i, wopt) in self.w.iter().enumerate() {
            if let Some(w) = wopt {
                let p = &phi.entries[i];
                if !p.is_zero() {
                    acc += ctx.pair_with_weighted(p, w, phi_deg);
                }
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------
// DOF groups
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pre {
    None,
    SymCurl,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EVec {
    T,
    N1,
    N2,
}

pub enum DofGroup {
    /// Point values of entries of `pre(phi)` at a vertex.
    VertexVals {
        v: usize,
        pre: Pre,
        positions: Vec<(usize, usize)>,
    },
    /// All nine entries of `grad phi` at a vertex (vector-valued phi).
    VertexGrad { v: usize },
    /// `(a^T pre(phi) b, q)_e` for each (a, b) pair and weight q.
    EdgeSandwich {
        e: usize,
        pre: Pre,
        pairs: Vec<(EVec, EVec)>,
        weights: Vec<PolyF>,
    },
    /// `(n2^T (curl phi) n1 + d_t(t^T phi t), q)_e`.
    EdgeCombined { e: usize, weights: Vec<PolyF> },
    /// `(phi : C, q)_e` for constant component matrices C.
    EdgeComponents {
        e: usize,
        mats: Vec<Vec<f64>>,
        weights: Vec<PolyF>,
    },
    /// Vector components along an edge: `(phi_c, q)_e`.
    EdgeVecComponents { e: usize, weights: Vec<PolyF> },
    /// `(n^T phi n, q)_F` with the global face normal.
    FaceTr1DD { f: usize, weights: Vec<PolyF> },
    /// `(2 div_F(phi n) + d_n(n^T phi n), q)_F` with the global face normal.
    FaceTr2DD { f: usize, weights: Vec<PolyF> },
    /// `(n x sym(phi x n) x n, varsigma)_F`; weights are the in-plane
    /// components (w11, w22, w12) expressed in the (u, v) chart.
    FaceSC1 { f: usize, wmats: Vec<[PolyF; 3]> },
    /// `(n . phi x n, q)_F`; weights are in-plane vector components.
    FaceSC2 { f: usize, wvecs: Vec<[PolyF; 2]> },
    /// `(phi n, n x (x - bary_F) q)_{F1}`.
    FaceF1 { f: usize, weights: Vec<PolyF> },
    /// Vector components on a face: `(phi_c, q)_F`.
    FaceVecComponents { f: usize, weights: Vec<PolyF> },
    /// `(phi, varsigma)_K` against precomputed weighted moments.
    VolMoments { weights: Vec<VolWeight>, phi_deg: u32 },
}

impl DofGroup {
    pub fn len(&self, value_comps: usize) -> usize {
        match self {
            DofGroup::VertexVals { positions, .. } => positions.len(),
            DofGroup::VertexGrad { .. } => 9,
            DofGroup::EdgeSandwich { pairs, weights, .. } => pairs.len() * weights.len(),
            DofGroup::EdgeCombined { weights, .. } => weights.len(),
            DofGroup::EdgeComponents { mats, weights, .. } => mats.len() * weights.len(),
            DofGroup::EdgeVecComponents { weights, .. } => value_comps * weights.len(),
            DofGroup::FaceTr1DD { weights, .. } | DofGroup::FaceTr2DD { weights, .. } => {
                weights.len()
            }
            DofGroup::FaceSC1 { wmats, .. } => wmats.len(),
            DofGroup::FaceSC2 { wvecs, .. } => wvecs.len(),
            DofGroup::FaceF1 { weights, .. } => weights.len(),
            DofGroup::FaceVecComponents { weights, .. } => value_comps * weights.len(),
            DofGroup::VolMoments { weights, .. } => weights.len(),
        }
    }
}

/// Per-shape-function cache of derived fields.
pub struct PhiCache<'a> {
    pub phi: &'a PolyMat<BigF>,
    symcurl: Option<PolyMat<BigF>>,
    curl: Option<PolyMat<BigF>>,
}

impl<'a> PhiCache<'a> {
    pub fn new(phi: &'a PolyMat<BigF>) -> Self {
        PhiCache {
            phi,
            symcurl: None,
            curl: None,
        }
    }

    fn curl(&mut self) -> &PolyMat<BigF> {
        if self.curl.is_none() {
            self.curl = Some(curl_mat3(self.phi));
        }
        self.curl.as_ref().unwrap()
    }

    fn symcurl(&mut self) -> &PolyMat<BigF> {
        if self.symcurl.is_none() {
            let c = curl_mat3(self.phi).sym();
            self.symcurl = Some(c);
        }
        self.symcurl.as_ref().unwrap()
    }

    fn with_pre(&mut self, pre: Pre) -> &PolyMat<BigF> {
        match pre {
            Pre::None => self.phi,
            Pre::SymCurl => self.symcurl(),
        }
    }
}

fn evec(fr: &EdgeFrame, which: EVec) -> &[BigF] {
    match which {
        EVec::T => &fr.t,
        EVec::N1 => &fr.n1,
        EVec::N2 => &fr.n2,
    }
}

fn sandwich_c(m: &PolyMat<BigF>, a: &[BigF], b: &[BigF]) -> PolyF {
    let av = const_vec(m.arity, a);
    let bv = const_vec(m.arity, b);
    m.sandwich(&av, &bv)
}

fn edge_moments(ctx: &TetCtx, e: usize, s: &PolyF, weights: &[PolyF], out: &mut Vec<BigF>) {
    let restricted = restrict(s, &ctx.edges[e].chart);
    for w in weights {
        let mut v = crate::tracesgreen::integral01(&restricted.mul(w));
        v *= &ctx.edges[e].len;
        out.push(v);
    }
}

fn face_moments(ctx: &TetCtx, f: usize, s2: &PolyF, weights: &[PolyF], out: &mut Vec<BigF>) {
    for w in weights {
        let mut v = crate::tracesgreen::integral_ref_tri(&s2.mul(w));
        v *= &ctx.faces[f].area2;
        out.push(v);
    }
}

/// Evaluate one group against a shape function, appending to `out`.
pub fn evaluate_group(ctx: &TetCtx, g: &DofGroup, cache: &mut PhiCache, out: &mut Vec<BigF>) {
    let prec = ctx.prec;
    match g {
        DofGroup::VertexVals { v, pre, positions } => {
            let m = cache.with_pre(*pre);
            let pt = &ctx.verts_f[*v];
            for (i, j) in positions {
                out.push(m.at(*i, *j).eval(pt));
            }
        }
        DofGroup::VertexGrad { v } => {
            let pt = &ctx.verts_f[*v];
            for i in 0..3 {
                for j in 0..3 {
                    out.push(cache.phi.at(i, 0).derivative(j).eval(pt));
                }
            }
        }
        DofGroup::EdgeSandwich {
            e,
            pre,
            pairs,
            weights,
        } => {
            let m = cache.with_pre(*pre).clone();
            let fr = &ctx.edges[*e].frame;
            for (a, b) in pairs {
                let s = sandwich_c(&m, evec(fr, *a), evec(fr, *b));
                edge_moments(ctx, *e, &s, weights, out);
            }
        }
        DofGroup::EdgeCombined { e, weights } => {
            let fr = &ctx.edges[*e].frame;
            let c = cache.curl().clone();
            let g1 = sandwich_c(&c, &fr.n2, &fr.n1);
            let tt = sandwich_c(cache.phi, &fr.t, &fr.t);
            let s = g1.add(&ddn(&tt, &fr.t));
            edge_moments(ctx, *e, &s, weights, out);
        }
        DofGroup::EdgeComponents { e, mats, weights } => {
            for mat in mats {
                let mut s = PolyF::zero(3, prec);
                for i in 0..3 {
                    for j in 0..3 {
                        let c = mat[i * 3 + j];
                        if c != 0.0 {
                            s = s.add(&cache.phi.at(i, j).scale(&BigF::with_val(prec, c)));
                        }
                    }
                }
                edge_moments(ctx, *e, &s, weights, out);
            }
        }
        DofGroup::EdgeVecComponents { e, weights } => {
            for c in 0..cache.phi.rows {
                let s = cache.phi.at(c, 0).clone();
                edge_moments(ctx, *e, &s, weights, out);
            }
        }
        DofGroup::FaceTr1DD { f, weights } => {
            let n = &ctx.faces[*f].frame.n;
            let s = tr1_divdiv(cache.phi, n);
            let s2 = restrict(&s, &ctx.faces[*f].chart);
            face_moments(ctx, *f, &s2, weights, out);
        }
        DofGroup::FaceTr2DD { f, weights } => {
            let n = &ctx.faces[*f].frame.n;
            let s = tr2_divdiv(cache.phi, n);
            let s2 = restrict(&s, &ctx.faces[*f].chart);
            face_moments(ctx, *f, &s2, weights, out);
        }
        DofGroup::FaceSC1 { f, wmats } => {
            let fc = &ctx.faces[*f];
            let t1p = tr1_perp_symcurl(cache.phi, &fc.frame.n);
            let c11 = restrict(&sandwich_c(&t1p, &fc.frame.t1, &fc.frame.t1), &fc.chart);
            let c22 = restrict(&sandwich_c(&t1p, &fc.frame.t2, &fc.frame.t2), &fc.chart);
            let c12 = restrict(&sandwich_c(&t1p, &fc.frame.t1, &fc.frame.t2), &fc.chart);
            let two = BigF::with_val(prec, 2);
            for [w11, w22, w12] in wmats {
                let mut s = c11.mul(w11).add(&c22.mul(w22));
                s = s.add(&c12.mul(w12).scale(&two));
                let mut v = crate::tracesgreen::integral_ref_tri(&s);
                v *= &fc.area2;
                out.push(v);
            }
        }
        DofGroup::FaceSC2 { f, wvecs } => {
            let fc = &ctx.faces[*f];
            let w = tr2_symcurl(cache.phi, &fc.frame.n);
            let wt = [
                restrict(&dot_vec(&const_vec(3, &fc.frame.t1), &w), &fc.chart),
                restrict(&dot_vec(&const_vec(3, &fc.frame.t2), &w), &fc.chart),
            ];
            for [q1, q2] in wvecs {
                let s = wt[0].mul(q1).add(&wt[1].mul(q2));
                let mut v = crate::tracesgreen::integral_ref_tri(&s);
                v *= &fc.area2;
                out.push(v);
            }
        }
        DofGroup::FaceF1 { f, weights } => {
            let fc = &ctx.faces[*f];
            let n = &fc.frame.n;
            let phin = cache.phi.dot_right(&const_vec(3, n));
            let phin2: Vec<PolyF> = phin.iter().map(|p| restrict(p, &fc.chart)).collect();
            // n x (x - bary_F) in chart coordinates
            let xbar2: Vec<PolyF> = (0..3)
                .map(|i| fc.chart[i].sub(&Poly::constant(2, bf_rat(prec, &fc.bary[i]))))
                .collect();
            let narr: [PolyF; 3] = std::array::from_fn(|i| Poly::constant(2, n[i].clone()));
            let nxx = crate::tensorops::cross3(
                &narr,
                &[xbar2[0].clone(), xbar2[1].clone(), xbar2[2].clone()],
            );
            let s = dot_vec(&phin2, nxx.as_ref());
            face_moments(ctx, *f, &s, weights, out);
        }
        DofGroup::FaceVecComponents { f, weights } => {
            let fc = &ctx.faces[*f];
            for c in 0..cache.phi.rows {
                let s2 = restrict(cache.phi.at(c, 0), &fc.chart);
                face_moments(ctx, *f, &s2, weights, out);
            }
        }
        DofGroup::VolMoments { weights, phi_deg } => {
            for w in weights {
                out.push(w.pair(ctx, cache.phi, *phi_deg));
            }
        }
    }
}

// ---------------------------------------------------------------------
// weight bases
// ---------------------------------------------------------------------

fn edge_weights(prec: u32, deg: i64) -> Vec<PolyF> {
    if deg < 0 {
        return Vec::new();
    }
    (0..=deg as u16)
        .map(|a| PolyF::monomial(1, MultiIndex([a, 0, 0]), BigF::with_val(prec, 1)))
        .collect()
}

fn face_chart_weights(prec: u32, deg: i64) -> Vec<PolyF> {
    if deg < 0 {
        return Vec::new();
    }
    monomial_basis(2, deg as u32)
        .into_iter()
        .map(|m| PolyF::monomial(2, m, BigF::with_val(prec, 1)))
        .collect()
}

fn xi_monomials(prec: u32, deg_lo: u32, deg_hi: i64) -> Vec<PolyF> {
    if deg_hi < 0 {
        return Vec::new();
    }
    monomial_basis(2, deg_hi as u32)
        .into_iter()
        .filter(|m| m.deg() >= deg_lo)
        .map(|m| PolyF::monomial(2, m, BigF::with_val(prec, 1)))
        .collect()
}

fn subst_xi(p: &PolyF, fc: &FaceCtx) -> PolyF {
    p.subst(&[fc.xi[0].clone(), fc.xi[1].clone()])
}

/// Weights for the in-plane sym tensor moments of the sym-curl element:
/// rotated Hessians of P_{l-1} plus `sym(xi (x) P_{l-1}(R2))`, expressed
/// in the (u, v) chart.  Independence is verified at working precision.
fn face_sc1_weights(ctx: &TetCtx, f: usize, l: i64) -> Result<Vec<[PolyF; 3]>> {
    let prec = ctx.prec;
    let fc = &ctx.faces[f];
    let mut wmats: Vec<[PolyF; 3]> = Vec::new();
    // hess-perp block: q in P_{l-1}, quadratic and above
    for q in xi_monomials(prec, 2, l - 1) {
        let w11 = q.derivative(1).derivative(1);
        let w22 = q.derivative(0).derivative(0);
        let w12 = q.derivative(0).derivative(1).neg();
        wmats.push([subst_xi(&w11, fc), subst_xi(&w22, fc), subst_xi(&w12, fc)]);
    }
    // sym(xi (x) v) block: v = monomial * e_a
    let xi1 = PolyF::var(2, prec, 0);
    let xi2 = PolyF::var(2, prec, 1);
    let half = bf_rat(prec, &crate::exactla::rat(1, 2));
    for q in xi_monomials(prec, 0, l - 1) {
        // v = (q, 0): sym(xi v^T) = [[xi1 q, xi2 q / 2], [xi2 q / 2, 0]]
        let w11 = xi1.mul(&q);
        let w12 = xi2.mul(&q).scale(&half);
        wmats.push([
            subst_xi(&w11, fc),
            PolyF::zero(2, prec),
            subst_xi(&w12, fc),
        ]);
        // v = (0, q)
        let w22 = xi2.mul(&q);
        let w12 = xi1.mul(&q).scale(&half);
        wmats.push([
            PolyF::zero(2, prec),
            subst_xi(&w22, fc),
            subst_xi(&w12, fc),
        ]);
    }
    verify_weight_independence(prec, wmats.iter().flat_map(|w| w.iter()), wmats.len(), 3)?;
    Ok(wmats)
}

/// Weights for the in-plane vector moments of the sym-curl element:
/// `grad P_{l-3}` plus `xi_perp P_{l-1}`.
fn face_sc2_weights(ctx: &TetCtx, f: usize, l: i64) -> Result<Vec<[PolyF; 2]>> {
    let prec = ctx.prec;
    let fc = &ctx.faces[f];
    let mut wvecs: Vec<[PolyF; 2]> = Vec::new();
    for q in xi_monomials(prec, 1, l - 3) {
        wvecs.push([
            subst_xi(&q.derivative(0), fc),
            subst_xi(&q.derivative(1), fc),
        ]);
    }
    let xi1 = PolyF::var(2, prec, 0);
    let xi2 = PolyF::var(2, prec, 1);
    for q in xi_monomials(prec, 0, l - 1) {
        // x_perp = (xi2, -xi1)
        wvecs.push([
            subst_xi(&xi2.mul(&q), fc),
            subst_xi(&xi1.mul(&q).neg(), fc),
        ]);
    }
    verify_weight_independence(prec, wvecs.iter().flat_map(|w| w.iter()), wvecs.len(), 2)?;
    Ok(wvecs)
}

fn verify_weight_independence<'a>(
    prec: u32,
    comps: impl Iterator<Item = &'a PolyF>,
    count: usize,
    comp_per: usize,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let all: Vec<&PolyF> = comps.collect();
    let maxdeg = all
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let monos = monomial_basis(2, maxdeg);
    let rows = comp_per * monos.len();
    let mut m = BigFloatMatrix::zeros(prec, rows, count);
    for (j, chunk) in all.chunks(comp_per).enumerate() {
        for (c, p) in chunk.iter().enumerate() {
            for (idx, coeff) in &p.terms {
                let pos = monos.binary_search(idx).unwrap();
                m[(c * monos.len() + pos, j)] = coeff.clone();
            }
        }
    }
    let r = m.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    if r != count {
        return Err(Error::Internal(format!(
            "face weight set is dependent: rank {r} of {count}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// DOF sets
// ---------------------------------------------------------------------

fn push_infos(
    infos: &mut Vec<DofInfo>,
    tag: &'static str,
    entity: EntityKey,
    slot0: usize,
    n: usize,
) -> usize {
    for s in 0..n {
        infos.push(DofInfo {
            tag,
            entity,
            slot: slot0 + s,
        });
    }
    slot0 + n
}

pub struct DofSet {
    pub groups: Vec<DofGroup>,
    pub infos: Vec<DofInfo>,
}

/// DOFs of the 3D elements on a tetrahedron, in entity-grouped order.
pub fn dof_set_tet(def: &ElementDef, ctx: &TetCtx) -> Result<DofSet> {
    let prec = ctx.prec;
    let l = def.l as i64;
    let k = def.k as i64;
    let mut groups = Vec::new();
    let mut infos = Vec::new();
    match def.kind {
        ElementKind::DivDiv3d | ElementKind::DivDiv3dBubble => {
            let sym_pos = vec![(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
            for v in 0..4 {
                groups.push(DofGroup::VertexVals {
                    v,
                    pre: Pre::None,
                    positions: sym_pos.clone(),
                });
                push_infos(&mut infos, "vertex-value", EntityKey::Vertex(ctx.tet.gids[v]), 0, 6);
            }
            for e in 0..6 {
                let weights = edge_weights(prec, l - 2);
                let n = 3 * weights.len();
                groups.push(DofGroup::EdgeSandwich {
                    e,
                    pre: Pre::None,
                    pairs: vec![(EVec::N1, EVec::N1), (EVec::N1, EVec::N2), (EVec::N2, EVec::N2)],
                    weights,
                });
                push_infos(&mut infos, "edge-nn-moment", EntityKey::Edge(ctx.edges[e].gids), 0, n);
            }
            for f in 0..4 {
                let w1 = face_chart_weights(prec, l - 3);
                let n1 = w1.len();
                groups.push(DofGroup::FaceTr1DD { f, weights: w1 });
                push_infos(&mut infos, "face-nn-moment", EntityKey::Face(ctx.faces[f].gids), 0, n1);
                let w2 = face_chart_weights(prec, l - 1);
                let n2 = w2.len();
                groups.push(DofGroup::FaceTr2DD { f, weights: w2 });
                push_infos(
                    &mut infos,
                    "face-shear-moment",
                    EntityKey::Face(ctx.faces[f].gids),
                    n1,
                    n2,
                );
            }
            // interior: hessian moments
            let mut vol_weights = Vec::new();
            let phi_deg = def.l.max(def.k);
            for m in monomial_basis(3, (k - 2).max(0) as u32) {
                if m.deg() >= 2 {
                    let h = hess_scalar(&PolyR::monomial(3, m, crate::exactla::rat_i(1)));
                    vol_weights.push(VolWeight::new(ctx, &to_float_mat(&h, prec), phi_deg, "vol-hess-moment"));
                }
            }
            let nh = vol_weights.len();
            match def.kind {
                ElementKind::DivDiv3d => {
                    // sym(P_{l-2}(T) x x) moments about the barycenter
                    let st = polyspaces::sym_cross_x3((l - 1) as u32, Some(ctx.bary.clone()));
                    for e in &st.elements {
                        vol_weights.push(VolWeight::new(
                            ctx,
                            &to_float_mat(e, prec),
                            phi_deg,
                            "vol-symx-moment",
                        ));
                    }
                }
                _ => {
                    // replaced by sym-curl bubble moments
                    for w in crate::bubblecx::symcurl_bubble_weights(ctx, def.l, phi_deg)? {
                        vol_weights.push(w);
                    }
                }
            }
            let ntot = vol_weights.len();
            let tail_tag = if def.kind == ElementKind::DivDiv3d {
                "vol-symx-moment"
            } else {
                "vol-symcurl-bubble-moment"
            };
            groups.push(DofGroup::VolMoments {
                weights: vol_weights,
                phi_deg,
            });
            push_infos(&mut infos, "vol-hess-moment", EntityKey::Interior, 0, nh);
            push_infos(&mut infos, tail_tag, EntityKey::Interior, nh, ntot - nh);
            // the distinguished-face moments (only for the plain variant)
            if def.kind == ElementKind::DivDiv3d {
                let vstar = (0..4).min_by_key(|&v| ctx.tet.gids[v]).unwrap();
                let f1 = vstar;
                let wq = face_chart_weights(prec, l - 2);
                let nq = wq.len();
                groups.push(DofGroup::FaceF1 { f: f1, weights: wq });
                push_infos(&mut infos, "face-f1-moment", EntityKey::Interior, ntot, nq);
            }
        }
        ElementKind::SymCurl3d => {
            let dev_pos = vec![
                (0, 0),
                (1, 1),
                (0, 1),
                (0, 2),
                (1, 0),
                (1, 2),
                (2, 0),
                (2, 1),
            ];
            let sym_pos = vec![(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
            for v in 0..4 {
                groups.push(DofGroup::VertexVals {
                    v,
                    pre: Pre::None,
                    positions: dev_pos.clone(),
                });
                push_infos(&mut infos, "vertex-value", EntityKey::Vertex(ctx.tet.gids[v]), 0, 8);
                groups.push(DofGroup::VertexVals {
                    v,
                    pre: Pre::SymCurl,
                    positions: sym_pos.clone(),
                });
                push_infos(
                    &mut infos,
                    "vertex-symcurl-value",
                    EntityKey::Vertex(ctx.tet.gids[v]),
                    8,
                    6,
                );
            }
            for e in 0..6 {
                let ent = EntityKey::Edge(ctx.edges[e].gids);
                let w1 = edge_weights(prec, l - 2);
                let n1 = 3 * w1.len();
                groups.push(DofGroup::EdgeSandwich {
                    e,
                    pre: Pre::SymCurl,
                    pairs: vec![(EVec::N1, EVec::N1), (EVec::N1, EVec::N2), (EVec::N2, EVec::N2)],
                    weights: w1,
                });
                push_infos(&mut infos, "edge-symcurl-nn-moment", ent, 0, n1);
                let w2 = edge_weights(prec, l - 1);
                let n2 = 2 * w2.len();
                groups.push(DofGroup::EdgeSandwich {
                    e,
                    pre: Pre::None,
                    pairs: vec![(EVec::N1, EVec::T), (EVec::N2, EVec::T)],
                    weights: w2,
                });
                push_infos(&mut infos, "edge-nt-moment", ent, n1, n2);
                let w3 = edge_weights(prec, l);
                let n3 = w3.len();
                groups.push(DofGroup::EdgeCombined { e, weights: w3 });
                push_infos(&mut infos, "edge-curl-tt-moment", ent, n1 + n2, n3);
            }
            for f in 0..4 {
                let ent = EntityKey::Face(ctx.faces[f].gids);
                let wm = face_sc1_weights(ctx, f, l)?;
                let n1 = wm.len();
                groups.push(DofGroup::FaceSC1 { f, wmats: wm });
                push_infos(&mut infos, "face-tr1-moment", ent, 0, n1);
                let wv = face_sc2_weights(ctx, f, l)?;
                let n2 = wv.len();
                groups.push(DofGroup::FaceSC2 { f, wvecs: wv });
                push_infos(&mut infos, "face-tr2-moment", ent, n1, n2);
            }
            let phi_deg = def.l + 1;
            let weights = crate::bubblecx::bubble_vol_weights(ctx, def.l, phi_deg)?;
            let nb = weights.len();
            groups.push(DofGroup::VolMoments { weights, phi_deg });
            push_infos(&mut infos, "vol-bubble-moment", EntityKey::Interior, 0, nb);
        }
        ElementKind::SymCurl3dLagrange => {
            let dev_pos = vec![
                (0, 0),
                (1, 1),
                (0, 1),
                (0, 2),
                (1, 0),
                (1, 2),
                (2, 0),
                (2, 1),
            ];
            for v in 0..4 {
                groups.push(DofGroup::VertexVals {
                    v,
                    pre: Pre::None,
                    positions: dev_pos.clone(),
                });
                push_infos(&mut infos, "vertex-value", EntityKey::Vertex(ctx.tet.gids[v]), 0, 8);
            }
            // trace-free component matrices
            let dev_mats: Vec<Vec<f64>> = vec![
                vec![1., 0., 0., 0., 0., 0., 0., 0., -1.],
                vec![0., 0., 0., 0., 1., 0., 0., 0., -1.],
                vec![0., 1., 0., 0., 0., 0., 0., 0., 0.],
                vec![0., 0., 1., 0., 0., 0., 0., 0., 0.],
                vec![0., 0., 0., 1., 0., 0., 0., 0., 0.],
                vec![0., 0., 0., 0., 0., 1., 0., 0., 0.],
                vec![0., 0., 0., 0., 0., 0., 1., 0., 0.],
                vec![0., 0., 0., 0., 0., 0., 0., 1., 0.],
            ];
            for e in 0..6 {
                let w = edge_weights(prec, l - 1);
                let n = dev_mats.len() * w.len();
                groups.push(DofGroup::EdgeComponents {
                    e,
                    mats: dev_mats.clone(),
                    weights: w,
                });
                push_infos(&mut infos, "edge-component-moment", EntityKey::Edge(ctx.edges[e].gids), 0, n);
            }
            for f in 0..4 {
                let ent = EntityKey::Face(ctx.faces[f].gids);
                // full P_{l-2}(F; S) and P_{l-2}(F; R2) weight sets
                let mut wmats = Vec::new();
                let half = bf_rat(prec, &crate::exactla::rat(1, 2));
                for q in xi_monomials(prec, 0, l - 2) {
                    let fc = &ctx.faces[f];
                    let qc = subst_xi(&q, fc);
                    wmats.push([qc.clone(), PolyF::zero(2, prec), PolyF::zero(2, prec)]);
                    wmats.push([PolyF::zero(2, prec), qc.clone(), PolyF::zero(2, prec)]);
                    wmats.push([
                        PolyF::zero(2, prec),
                        PolyF::zero(2, prec),
                        qc.scale(&half),
                    ]);
                }
                let n1 = wmats.len();
                groups.push(DofGroup::FaceSC1 { f, wmats });
                push_infos(&mut infos, "face-tr1-moment", ent, 0, n1);
                let mut wvecs = Vec::new();
                for q in xi_monomials(prec, 0, l - 2) {
                    let fc = &ctx.faces[f];
                    let qc = subst_xi(&q, fc);
                    wvecs.push([qc.clone(), PolyF::zero(2, prec)]);
                    wvecs.push([PolyF::zero(2, prec), qc]);
                }
                let n2 = wvecs.len();
                groups.push(DofGroup::FaceSC2 { f, wvecs });
                push_infos(&mut infos, "face-tr2-moment", ent, n1, n2);
            }
            let phi_deg = def.l + 1;
            let weights = crate::bubblecx::bubble_vol_weights(ctx, def.l, phi_deg)?;
            let nb = weights.len();
            groups.push(DofGroup::VolMoments { weights, phi_deg });
            push_infos(&mut infos, "vol-bubble-moment", EntityKey::Interior, 0, nb);
        }
        ElementKind::Hermite3d => {
            for v in 0..4 {
                groups.push(DofGroup::VertexVals {
                    v,
                    pre: Pre::None,
                    positions: vec![(0, 0), (1, 0), (2, 0)],
                });
                push_infos(&mut infos, "vertex-value", EntityKey::Vertex(ctx.tet.gids[v]), 0, 3);
                groups.push(DofGroup::VertexGrad { v });
                push_infos(&mut infos, "vertex-gradient", EntityKey::Vertex(ctx.tet.gids[v]), 3, 9);
            }
            for e in 0..6 {
                let w = edge_weights(prec, l - 2);
                let n = 3 * w.len();
                groups.push(DofGroup::EdgeVecComponents { e, weights: w });
                push_infos(&mut infos, "edge-moment", EntityKey::Edge(ctx.edges[e].gids), 0, n);
            }
            for f in 0..4 {
                let w = face_chart_weights(prec, l - 1);
                let n = 3 * w.len();
                groups.push(DofGroup::FaceVecComponents { f, weights: w });
                push_infos(&mut infos, "face-moment", EntityKey::Face(ctx.faces[f].gids), 0, n);
            }
            let phi_deg = def.l + 2;
            let mut weights = Vec::new();
            let ob = xbar::<BigF>(3, prec, &ctx.bary);
            let mut pows: Vec<PolyF> = Vec::new();
            for m in monomial_basis(3, (l - 2).max(0) as u32) {
                let mut q = PolyF::constant(3, BigF::with_val(prec, 1));
                for i in 0..3 {
                    for _ in 0..m.0[i] {
                        q = q.mul(&ob[i]);
                    }
                }
                pows.push(q);
            }
            for c in 0..3 {
                for q in &pows {
                    let mut vs = PolyMat::zeros(3, prec, 3, 1);
                    vs.set(c, 0, q.clone());
                    weights.push(VolWeight::new(ctx, &vs, phi_deg, "vol-moment"));
                }
            }
            let nb = weights.len();
            groups.push(DofGroup::VolMoments { weights, phi_deg });
            push_infos(&mut infos, "vol-moment", EntityKey::Interior, 0, nb);
        }
        ElementKind::DivDiv2d => {
            return Err(Error::ParamRange("divdiv2d lives on triangles".into()));
        }
    }
    Ok(DofSet { groups, infos })
}

// ---------------------------------------------------------------------
// shape bases
// ---------------------------------------------------------------------

/// Diameter-like rational scale of a vertex set.
pub fn cell_scale(verts: &[Vec<Rat>]) -> Rat {
    let mut diam2 = Rat::from_integer(0.into());
    let d = verts[0].len();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            let s: Rat = (0..d)
                .map(|a| {
                    let t = &verts[i][a] - &verts[j][a];
                    &t * &t
                })
                .sum();
            if s > diam2 {
                diam2 = s;
            }
        }
    }
    polyspaces::pow2_scale(&diam2)
}

/// Exact shape-function basis of the element, expressed in the
/// barycenter-centered, diameter-scaled local coordinate (same span,
/// far better conditioned on cells away from the origin).
pub fn shape_basis(def: &ElementDef, cell_bary: &[Rat], h: &Rat) -> Result<SpaceBasis> {
    match def.kind {
        ElementKind::DivDiv3d | ElementKind::DivDiv3dBubble => {
            polyspaces::sigma3_scaled(def.l, def.k, cell_bary, h)
        }
        ElementKind::SymCurl3d | ElementKind::SymCurl3dLagrange => Ok(
            polyspaces::full_space_scaled(3, SpaceClass::Dev, def.l as i64 + 1, cell_bary, h),
        ),
        ElementKind::Hermite3d => Ok(polyspaces::full_space_scaled(
            3,
            SpaceClass::Vector,
            def.l as i64 + 2,
            cell_bary,
            h,
        )),
        ElementKind::DivDiv2d => polyspaces::sigma2_scaled(def.l, def.k, cell_bary, h),
    }
}

pub fn moment_degree_pub(def: &ElementDef) -> u32 {
    moment_degree(def)
}

fn moment_degree(def: &ElementDef) -> u32 {
    match def.kind {
        ElementKind::DivDiv3d | ElementKind::DivDiv3dBubble => 2 * (def.l.max(def.k) + 2),
        ElementKind::SymCurl3d | ElementKind::SymCurl3dLagrange => 2 * (def.l + 2),
        ElementKind::Hermite3d => 2 * (def.l + 2),
        ElementKind::DivDiv2d => 2 * (def.l.max(def.k) + 2),
    }
}

pub struct LocalElement {
    pub def: ElementDef,
    pub dofs: DofSet,
    pub shape: SpaceBasis,
    pub shape_f: Vec<PolyMat<BigF>>,
}

impl LocalElement {
    pub fn dof_count(&self) -> usize {
        self.dofs.infos.len()
    }
}

/// Build the element on a tetrahedron and assemble nothing yet.
pub fn local_element_tet(def: &ElementDef, ctx: &TetCtx) -> Result<LocalElement> {
    let dofs = dof_set_tet(def, ctx)?;
    let h = cell_scale(&ctx.tet.verts);
    let shape = shape_basis(def, &ctx.bary, &h)?;
    let shape_f: Vec<PolyMat<BigF>> = shape
        .elements
        .iter()
        .map(|e| to_float_mat(e, ctx.prec))
        .collect();
    if dofs.infos.len() != shape.len() {
        return Err(Error::Internal(format!(
            "{} l={} k={}: {} DOFs vs {} shape functions",
            def.kind.name(),
            def.l,
            def.k,
            dofs.infos.len(),
            shape.len()
        )));
    }
    Ok(LocalElement {
        def: *def,
        dofs,
        shape,
        shape_f,
    })
}

/// DOF evaluation matrix: rows = DOFs, columns = shape functions.
pub fn dof_matrix_tet(el: &LocalElement, ctx: &TetCtx) -> BigFloatMatrix {
    let n = el.dof_count();
    let cols: Vec<Vec<BigF>> = el
        .shape_f
        .par_iter()
        .map(|phi| {
            let mut cache = PhiCache::new(phi);
            let mut col = Vec::with_capacity(n);
            for g in &el.dofs.groups {
                evaluate_group(ctx, g, &mut cache, &mut col);
            }
            col
        })
        .collect();
    let mut m = BigFloatMatrix::zeros(ctx.prec, n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        assert_eq!(col.len(), n, "group sizes consistent");
        for i in 0..n {
            m[(i, j)] = col[i].clone();
        }
    }
    m
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct UnisolvenceReport {
    pub element: String,
    pub params: String,
    pub cell: String,
    pub size: usize,
    /// Extreme singular values after row/column equilibration (the DOF
    /// functionals and shape functions carry arbitrary scale factors).
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub ratio: f64,
    pub raw_ratio: f64,
    pub pass: bool,
}

fn sigma_report(
    def: &ElementDef,
    cell_name: &str,
    m: &BigFloatMatrix,
) -> Result<UnisolvenceReport> {
    let (rmin, rmax) = m.min_max_singular()?;
    let raw_ratio = if rmax.is_zero() {
        0.0
    } else {
        let mut r = rmin;
        r /= &rmax;
        r.to_f64()
    };
    let (smin, smax) = m.equilibrated().min_max_singular()?;
    let ratio = if smax.is_zero() {
        0.0
    } else {
        let mut r = smin.clone();
        r /= &smax;
        r.to_f64()
    };
    Ok(UnisolvenceReport {
        element: def.kind.name().into(),
        params: def.params(),
        cell: cell_name.into(),
        size: m.rows,
        sigma_min: smin.to_f64(),
        sigma_max: smax.to_f64(),
        ratio,
        raw_ratio,
        pass: ratio > tol::UNISOLVENCE_RATIO,
    })
}

/// Assemble the square DOF matrix and decide nonsingularity via the
/// extreme singular values.
pub fn unisolvence_check_tet(
    def: &ElementDef,
    tet: &Tet,
    cell_name: &str,
    prec: u32,
) -> Result<UnisolvenceReport> {
    let ctx = TetCtx::new(tet, prec, moment_degree(def));
    let el = local_element_tet(def, &ctx)?;
    let m = dof_matrix_tet(&el, &ctx);
    sigma_report(def, cell_name, &m)
}

/// Dual basis: shape-function combinations biorthogonal to the DOFs.
pub fn dual_basis_tet(
    def: &ElementDef,
    tet: &Tet,
    prec: u32,
) -> Result<(Vec<PolyMat<BigF>>, f64)> {
    let ctx = TetCtx::new(tet, prec, moment_degree(def));
    let el = local_element_tet(def, &ctx)?;
    let m = dof_matrix_tet(&el, &ctx);
    let n = el.dof_count();
    let inv = m.solve_mat(&BigFloatMatrix::identity(prec, n))?;
    let mut duals = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = PolyMat::zeros(3, prec, el.shape_f[0].rows, el.shape_f[0].cols);
        for c in 0..n {
            if !inv[(c, j)].is_zero() {
                acc = acc.add(&el.shape_f[c].scale_coeff(&inv[(c, j)]));
            }
        }
        duals.push(acc);
    }
    // biorthogonality residual
    let mut worst: f64 = 0.0;
    let cols: Vec<Vec<BigF>> = duals
        .par_iter()
        .map(|phi| {
            let mut cache = PhiCache::new(phi);
            let mut col = Vec::with_capacity(n);
            for g in &el.dofs.groups {
                evaluate_group(&ctx, g, &mut cache, &mut col);
            }
            col
        })
        .collect();
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v.to_f64() - want).abs());
        }
    }
    Ok((duals, worst))
}

// ---------------------------------------------------------------------
// 2D element on triangles
// ---------------------------------------------------------------------

pub struct TriCtx {
    pub tri: Tri,
    pub prec: u32,
    vol_monos: Vec<MultiIndex>,
    vol_moments: Vec<BigF>,
    pub edges: Vec<EdgeCtx2>,
    pub verts_f: [Vec<BigF>; 3],
    pub bary: Vec<Rat>,
}

pub struct EdgeCtx2 {
    pub t: Vec<BigF>,
    pub n_ccw: Vec<BigF>,
    pub chart: Vec<PolyF>,
    pub len: BigF,
    pub gids: [usize; 2],
}

impl TriCtx {
    pub fn new(tri: &Tri, prec: u32, maxdeg: u32) -> TriCtx {
        let vol_monos = monomial_basis(2, maxdeg);
        let chart: Vec<PolyF> = (0..2)
            .map(|i| {
                let mut p = Poly::constant(2, bf_rat(prec, &tri.verts[0][i]));
                for j in 0..2 {
                    let d = &tri.verts[j + 1][i] - &tri.verts[0][i];
                    p = p.add(&Poly::monomial(2, MultiIndex::var(j), bf_rat(prec, &d)));
                }
                p
            })
            .collect();
        let mut pulls: Vec<PolyF> = Vec::with_capacity(vol_monos.len());
        let areaf = {
            let mut v = bf_rat(prec, &tri.area);
            v *= 2u32;
            v
        };
        let mut vol_moments = Vec::with_capacity(vol_monos.len());
        for (idx, m) in vol_monos.iter().enumerate() {
            let p = if m.deg() == 0 {
                Poly::constant(2, BigF::with_val(prec, 1))
            } else {
                let ax = (0..2).find(|&i| m.0[i] > 0).unwrap();
                let mut parent = *m;
                parent.0[ax] -= 1;
                let pi = vol_monos[..idx].binary_search(&parent).unwrap();
                pulls[pi].mul(&chart[ax])
            };
            let mut integral = p.integrate_ref_simplex();
            integral *= &areaf;
            vol_moments.push(integral);
            pulls.push(p);
        }
        let edges = (0..3)
            .map(|e| {
                let (t, n_ccw) = tri.edge_frame(e, prec);
                let chart: Vec<PolyF> =
                    tri.edge_chart(e).iter().map(|c| c.to_float(prec)).collect();
                let len = tri.edge_len(e, prec);
                let (a, b) = tri.edge_verts(e);
                EdgeCtx2 {
                    t,
                    n_ccw,
                    chart,
                    len,
                    gids: [tri.gids[a], tri.gids[b]],
                }
            })
            .collect();
        TriCtx {
            tri: tri.clone(),
            prec,
            vol_monos,
            vol_moments,
            edges,
            verts_f: tri.verts_f(prec),
            bary: tri.barycenter(),
        }
    }

    fn moment(&self, m: &MultiIndex) -> &BigF {
        let i = self.vol_monos.binary_search(m).expect("moment in table");
        &self.vol_moments[i]
    }

    pub fn vol_pair(&self, a: &PolyF, b: &PolyF) -> BigF {
        let mut acc = bf0(self.prec);
        let mut tmp = bf0(self.prec);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                tmp.assign_from(ca);
                tmp *= cb;
                tmp *= self.moment(&ma.mul(mb));
                acc += &tmp;
            }
        }
        acc
    }
}

pub struct DofSet2 {
    pub rows: Vec<Dof2>,
    pub infos: Vec<DofInfo>,
}

pub enum Dof2 {
    VertexVal { v: usize, pos: (usize, usize) },
    EdgeNN { e: usize, weight: PolyF },
    EdgeShear { e: usize, weight: PolyF },
    VolMoment { varsigma: PolyMat<BigF> },
}

pub fn dof_set_tri(def: &ElementDef, ctx: &TriCtx) -> Result<DofSet2> {
    if def.kind != ElementKind::DivDiv2d {
        return Err(Error::ParamRange("triangle cells host divdiv2d".into()));
    }
    let prec = ctx.prec;
    let l = def.l as i64;
    let k = def.k as i64;
    let mut rows = Vec::new();
    let mut infos = Vec::new();
    let sym_pos = [(0, 0), (1, 1), (0, 1)];
    for v in 0..3 {
        for (s, pos) in sym_pos.iter().enumerate() {
            rows.push(Dof2::VertexVal { v, pos: *pos });
            infos.push(DofInfo {
                tag: "vertex-value",
                entity: EntityKey::Vertex(ctx.tri.gids[v]),
                slot: s,
            });
        }
    }
    for e in 0..3 {
        let mut slot = 0;
        for w in edge_weights(prec, l - 2) {
            rows.push(Dof2::EdgeNN { e, weight: w });
            infos.push(DofInfo {
                tag: "edge-nn-moment",
                entity: EntityKey::Edge(ctx.edges[e].gids),
                slot,
            });
            slot += 1;
        }
        for w in edge_weights(prec, l - 1) {
            rows.push(Dof2::EdgeShear { e, weight: w });
            infos.push(DofInfo {
                tag: "edge-shear-moment",
                entity: EntityKey::Edge(ctx.edges[e].gids),
                slot,
            });
            slot += 1;
        }
    }
    let mut slot = 0;
    for m in monomial_basis(2, (k - 2).max(0) as u32) {
        if m.deg() >= 2 {
            let h = hess_scalar(&PolyR::monomial(2, m, crate::exactla::rat_i(1)));
            rows.push(Dof2::VolMoment {
                varsigma: to_float_mat(&h, prec),
            });
            infos.push(DofInfo {
                tag: "vol-hess-moment",
                entity: EntityKey::Interior,
                slot,
            });
            slot += 1;
        }
    }
    let sx = polyspaces::sym_xperp2(l - 2, Some(ctx.bary.clone()));
    for e in &sx.elements {
        rows.push(Dof2::VolMoment {
            varsigma: to_float_mat(e, prec),
        });
        infos.push(DofInfo {
            tag: "vol-symx-moment",
            entity: EntityKey::Interior,
            slot,
        });
        slot += 1;
    }
    Ok(DofSet2 { rows, infos })
}

pub fn evaluate_dof2(ctx: &TriCtx, d: &Dof2, phi: &PolyMat<BigF>) -> BigF {
    let prec = ctx.prec;
    match d {
        Dof2::VertexVal { v, pos } => phi.at(pos.0, pos.1).eval(&ctx.verts_f[*v]),
        Dof2::EdgeNN { e, weight } => {
            let ec = &ctx.edges[*e];
            let nv = const_vec(2, &ec.n_ccw);
            let s = phi.sandwich(&nv, &nv);
            let mut v = crate::tracesgreen::integral01(&restrict(&s, &ec.chart).mul(weight));
            v *= &ec.len;
            v
        }
        Dof2::EdgeShear { e, weight } => {
            let ec = &ctx.edges[*e];
            let tv = const_vec(2, &ec.t);
            let nv = const_vec(2, &ec.n_ccw);
            let tn = phi.sandwich(&tv, &nv);
            let divs = crate::diffops::div_mat(phi);
            let s = ddn(&tn, &ec.t).add(&dot_vec(&nv, &divs));
            let mut v = crate::tracesgreen::integral01(&restrict(&s, &ec.chart).mul(weight));
            v *= &ec.len;
            v
        }
        Dof2::VolMoment { varsigma } => {
            let mut acc = bf0(prec);
            for i in 0..2 {
                for j in 0..2 {
                    if !varsigma.at(i, j).is_zero() && !phi.at(i, j).is_zero() {
                        acc += ctx.vol_pair(phi.at(i, j), varsigma.at(i, j));
                    }
                }
            }
            acc
        }
    }
}

pub fn unisolvence_check_tri(
    def: &ElementDef,
    tri: &Tri,
    cell_name: &str,
    prec: u32,
) -> Result<UnisolvenceReport> {
    let ctx = TriCtx::new(tri, prec, moment_degree(def));
    let dofs = dof_set_tri(def, &ctx)?;
    let h = cell_scale(&ctx.tri.verts);
    let shape = shape_basis(def, &ctx.bary, &h)?;
    if dofs.rows.len() != shape.len() {
        return Err(Error::Internal(format!(
            "divdiv2d l={} k={}: {} DOFs vs {} shape functions",
            def.l,
            def.k,
            dofs.rows.len(),
            shape.len()
        )));
    }
    let shape_f: Vec<PolyMat<BigF>> = shape
        .elements
        .iter()
        .map(|e| to_float_mat(e, prec))
        .collect();
    let n = dofs.rows.len();
    let mut m = BigFloatMatrix::zeros(prec, n, n);
    for (j, phi) in shape_f.iter().enumerate() {
        for (i, d) in dofs.rows.iter().enumerate() {
            m[(i, j)] = evaluate_dof2(&ctx, d, phi);
        }
    }
    sigma_report(def, cell_name, &m)
}

/// Boundary rows (vertex/edge/face entities) of the divdiv element,
/// evaluated on the given shape functions: used for the interior kernel.
pub fn boundary_dof_matrix(
    def: &ElementDef,
    ctx: &TetCtx,
    shapes: &[PolyMat<BigF>],
) -> Result<(BigFloatMatrix, usize)> {
    let dofs = dof_set_tet(def, ctx)?;
    let keep: Vec<usize> = dofs
        .infos
        .iter()
        .enumerate()
        .filter(|(_, i)| i.entity != EntityKey::Interior)
        .map(|(i, _)| i)
        .collect();
    let total = dofs.infos.len();
    let cols: Vec<Vec<BigF>> = shapes
        .par_iter()
        .map(|phi| {
            let mut cache = PhiCache::new(phi);
            let mut col = Vec::with_capacity(total);
            for g in &dofs.groups {
                evaluate_group(ctx, g, &mut cache, &mut col);
            }
            keep.iter().map(|&i| col[i].clone()).collect()
        })
        .collect();
    let mut m = BigFloatMatrix::zeros(ctx.prec, keep.len(), shapes.len());
    for (j, col) in cols.iter().enumerate() {
        for i in 0..keep.len() {
            m[(i, j)] = col[i].clone();
        }
    }
    Ok((m, keep.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_PREC;

    #[test]
    fn dof_counts_match_dimensions() {
        let p = DEFAULT_PREC;
        let tet = Tet::reference();
        for (l, k, want) in [(3u32, 3u32, 120usize), (3, 4, 126), (4, 4, 210)] {
            let def = ElementDef::new(ElementKind::DivDiv3d, l, k).unwrap();
            let ctx = TetCtx::new(&tet, p, moment_degree(&def));
            let el = local_element_tet(&def, &ctx).unwrap();
            assert_eq!(el.dof_count(), want, "divdiv3d ({l},{k})");
        }
        let def = ElementDef::new(ElementKind::Hermite3d, 3, 3).unwrap();
        let ctx = TetCtx::new(&tet, p, moment_degree(&def));
        let el = local_element_tet(&def, &ctx).unwrap();
        assert_eq!(el.dof_count(), 168);
    }

    #[test]
    fn vertex_eval_of_identity() {
        // tau = I gives the component values (1,1,1,0,0,0) at each vertex
        let p = DEFAULT_PREC;
        let tet = Tet::reference();
        let def = ElementDef::new(ElementKind::DivDiv3d, 3, 3).unwrap();
        let ctx = TetCtx::new(&tet, p, moment_degree(&def));
        let eye = {
            let mut m = PolyMat::zeros(3, p, 3, 3);
            for i in 0..3 {
                m.set(i, i, PolyF::constant(3, BigF::with_val(p, 1)));
            }
            m
        };
        let dofs = dof_set_tet(&def, &ctx).unwrap();
        let mut cache = PhiCache::new(&eye);
        let mut out = Vec::new();
        evaluate_group(&ctx, &dofs.groups[0], &mut cache, &mut out);
        let got: Vec<f64> = out.iter().map(|x| x.to_f64()).collect();
        assert_eq!(got, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn hermite_unisolvent_on_reference() {
        let def = ElementDef::new(ElementKind::Hermite3d, 3, 3).unwrap();
        let rep = unisolvence_check_tet(&def, &Tet::reference(), "reference", DEFAULT_PREC).unwrap();
        assert_eq!(rep.size, 168);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn divdiv3d_unisolvent_on_reference() {
        let def = ElementDef::new(ElementKind::DivDiv3d, 3, 3).unwrap();
        let rep = unisolvence_check_tet(&def, &Tet::reference(), "reference", DEFAULT_PREC).unwrap();
        assert_eq!(rep.size, 120);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn divdiv2d_unisolvent() {
        let def = ElementDef::new(ElementKind::DivDiv2d, 3, 3).unwrap();
        let rep = unisolvence_check_tri(&def, &Tri::reference(), "reference", DEFAULT_PREC).unwrap();
        assert_eq!(rep.size, 30);
        assert!(rep.pass, "{rep:?}");
        let rep = unisolvence_check_tri(&def, &Tri::random(2), "random:2", DEFAULT_PREC).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}
