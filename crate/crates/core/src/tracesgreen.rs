//! Trace operators for the two tensor element families and residual
//! verification of the Green's identities and trace relations.
//!
//! Volume pairings of exact inputs are integrated exactly and floated
//! once; boundary terms go through unit frames at working precision.
//! Residuals are reported relative to the largest term magnitude so the
//! tolerances are scale-free.

use crate::bigfloat::{bf0, bf_rat, dot as fdot, BigF};
use crate::diffops::{
    curl_mat3, ddn, div_f, div_f_mat, div_mat, hess_scalar,
    rot_f_emb, sym_curl, sym_curl_f,
};
use crate::error::Result;
use crate::exactla::Rat;
use crate::polyring::{integrate_simplex, Poly, PolyF, PolyR};
use crate::simplexgeo::{Tet, Tri};
use crate::tensorops::{dot_vec, PolyMat, PolyMatR};

// ---------------------------------------------------------------------
// float helpers
// ---------------------------------------------------------------------

pub fn to_float_mat(m: &PolyMatR, prec: u32) -> PolyMat<BigF> {
    let entries = m.entries.iter().map(|p| p.to_float(prec)).collect();
    PolyMat::from_entries(m.rows, m.cols, entries)
}

pub fn to_float_vec(v: &[PolyR], prec: u32) -> Vec<PolyF> {
    v.iter().map(|p| p.to_float(prec)).collect()
}

/// Restrict a 3D (or 2D) float polynomial to an entity chart.
pub fn restrict(p: &PolyF, chart: &[PolyF]) -> PolyF {
    p.subst(chart)
}

pub fn chart_f(chart: &[PolyR], prec: u32) -> Vec<PolyF> {
    chart.iter().map(|c| c.to_float(prec)).collect()
}

/// Integral over [0,1] of a 1-variable polynomial.
pub fn integral01(p: &PolyF) -> BigF {
    let prec = p.ctx;
    let mut acc = bf0(prec);
    for (m, c) in &p.terms {
        let mut t = c.clone();
        t /= (m.0[0] + 1) as u32;
        acc += &t;
    }
    acc
}

/// Integral over the reference triangle of a 2-variable polynomial.
pub fn integral_ref_tri(p: &PolyF) -> BigF {
    p.integrate_ref_simplex()
}

fn max_abs(vals: &[BigF]) -> BigF {
    let prec = vals.first().map_or(64, |v| v.prec());
    let mut m = bf0(prec);
    for v in vals {
        let a = v.clone().abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// |lhs - rhs| relative to the scale of the given terms (>= 1 floor on
/// the scale only when everything vanishes).
fn rel_residual(lhs: &BigF, rhs: &BigF, terms: &[BigF]) -> BigF {
    let prec = lhs.prec();
    let mut diff = lhs.clone();
    diff -= rhs;
    let mut d = diff.abs();
    let mut scale = max_abs(terms);
    if scale.is_zero() {
        scale = BigF::with_val(prec, 1);
    }
    d /= &scale;
    d
}

/// Coefficientwise relative difference of two polynomials.
pub fn poly_rel_diff(a: &PolyF, b: &PolyF) -> BigF {
    let prec = a.ctx;
    let diff = a.sub(b);
    let mut num = bf0(prec);
    for c in diff.terms.values() {
        let v = c.clone().abs();
        if v > num {
            num = v;
        }
    }
    let mut scale = bf0(prec);
    for c in a.terms.values().chain(b.terms.values()) {
        let v = c.clone().abs();
        if v > scale {
            scale = v;
        }
    }
    if scale.is_zero() {
        scale = BigF::with_val(prec, 1);
    }
    num /= &scale;
    num
}

// ---------------------------------------------------------------------
// trace operators
// ---------------------------------------------------------------------

/// Normal-normal trace `n^T tau n` (3D scalar field; restrict afterwards).
pub fn tr1_divdiv(tau: &PolyMat<BigF>, n: &[BigF]) -> PolyF {
    let nv = crate::diffops::const_vec(tau.arity, n);
    tau.sandwich(&nv, &nv)
}

/// Combined trace `2 div_F(tau n) + d_n(n^T tau n)`.
pub fn tr2_divdiv(tau: &PolyMat<BigF>, n: &[BigF]) -> PolyF {
    let nv = crate::diffops::const_vec(tau.arity, n);
    let taun = tau.dot_right(&nv);
    let two = BigF::with_val(n[0].prec(), 2);
    let a = div_f(&taun, n).scale(&two);
    let s = tau.sandwich(&nv, &nv);
    a.add(&ddn(&s, n))
}

/// `n_i^T tau n_j` along an edge (3D scalar field).
pub fn edge_nn(tau: &PolyMat<BigF>, ni: &[BigF], nj: &[BigF]) -> PolyF {
    let a = crate::diffops::const_vec(tau.arity, ni);
    let b = crate::diffops::const_vec(tau.arity, nj);
    tau.sandwich(&a, &b)
}

fn const3(arity: usize, n: &[BigF]) -> [PolyF; 3] {
    let v = crate::diffops::const_vec(arity, n);
    [v[0].clone(), v[1].clone(), v[2].clone()]
}

/// `tau x n` followed by sym, projected in-plane: `Pi_F sym(tau x n) Pi_F`.
pub fn tr1_symcurl(tau: &PolyMat<BigF>, n: &[BigF]) -> PolyMat<BigF> {
    let narr = const3(tau.arity, n);
    let s = tau.cross_right(&narr).sym();
    pi_f_mat(&s, n)
}

/// `n x sym(tau x n) x n` (the 90-degree rotation of tr1).
pub fn tr1_perp_symcurl(tau: &PolyMat<BigF>, n: &[BigF]) -> PolyMat<BigF> {
    let narr = const3(tau.arity, n);
    let s = tau.cross_right(&narr).sym();
    s.cross_left(&narr).cross_right(&narr)
}

/// `n . tau x n` (in-plane vector field).
pub fn tr2_symcurl(tau: &PolyMat<BigF>, n: &[BigF]) -> Vec<PolyF> {
    let narr = const3(tau.arity, n);
    let nxt = tau.cross_right(&narr);
    nxt.dot_left(narr.as_ref())
}

/// `Pi_F M Pi_F` with `Pi_F = I - n n^T` (unit `n`).
pub fn pi_f_mat(m: &PolyMat<BigF>, n: &[BigF]) -> PolyMat<BigF> {
    let prec = n[0].prec();
    let arity = m.arity;
    let mut proj = PolyMat::zeros(arity, prec, 3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut v = BigF::with_val(prec, if i == j { 1 } else { 0 });
            let mut t = n[i].clone();
            t *= &n[j];
            v -= &t;
            proj.set(i, j, Poly::constant(arity, v));
        }
    }
    proj.matmul(m).matmul(&proj)
}

// ---------------------------------------------------------------------
// Green's identities
// ---------------------------------------------------------------------

/// Residual of the 3D Green's identity on a tetrahedron:
/// `(divdiv tau, v)_K = (tau, hess v)_K - sum_F sum_e (n_Fe^T tau n, v)_e
///  - sum_F [(n^T tau n, d_n v)_F - (2 div_F(tau n) + d_n(n^T tau n), v)_F]`.
pub fn green_residual_3d(tau: &PolyMatR, v: &PolyR, tet: &Tet, prec: u32) -> Result<BigF> {
    let verts: Vec<Vec<Rat>> = tet.verts.to_vec();
    // exact volume terms
    let lhs_exact = integrate_simplex(&crate::diffops::div_div(tau).mul(v), &verts)?;
    let hessv = hess_scalar(v);
    let mut pair = PolyR::zero(3, ());
    for i in 0..3 {
        for j in 0..3 {
            pair = pair.add(&tau.at(i, j).mul(hessv.at(i, j)));
        }
    }
    let vol_exact = integrate_simplex(&pair, &verts)?;
    let lhs = bf_rat(prec, &lhs_exact);
    let volterm = bf_rat(prec, &vol_exact);

    let tau_f = to_float_mat(tau, prec);
    let v_f = v.to_float(prec);

    let mut edge_sum = bf0(prec);
    let mut face_sum = bf0(prec);
    let mut terms = vec![lhs.clone(), volterm.clone()];
    for f in 0..4 {
        let fr = tet.face_frame(f, prec);
        let sign = BigF::with_val(prec, fr.outward_sign);
        let n_out: Vec<BigF> = fr
            .n
            .iter()
            .map(|x| {
                let mut y = x.clone();
                y *= &sign;
                y
            })
            .collect();
        // edge terms over the boundary of F
        for ([a, b], nfe) in tet.face_boundary(f, prec) {
            // chart of the segment a -> b
            let chart: Vec<PolyF> = (0..3)
                .map(|i| {
                    let c0 = bf_rat(prec, &tet.verts[a][i]);
                    let mut d = bf_rat(prec, &tet.verts[b][i]);
                    d -= &c0;
                    Poly::constant(1, c0).add(&Poly::monomial(
                        1,
                        crate::polyring::MultiIndex::var(0),
                        d,
                    ))
                })
                .collect();
            let g = edge_nn(&tau_f, &nfe, &n_out);
            let gv = g.mul(&v_f);
            let restricted = restrict(&gv, &chart);
            let mut val = integral01(&restricted);
            // edge length
            let mut len2 = bf0(prec);
            for i in 0..3 {
                let mut d = bf_rat(prec, &tet.verts[b][i]);
                d -= &bf_rat(prec, &tet.verts[a][i]);
                d.square_mut();
                len2 += &d;
            }
            val *= &len2.sqrt();
            terms.push(val.clone());
            edge_sum += &val;
        }
        // face terms
        let chart = chart_f(&tet.face_chart(f), prec);
        let area = tet.face_area(f, prec);
        let two_area = {
            let mut a = area.clone();
            a *= 2u32;
            a
        };
        let t1 = tr1_divdiv(&tau_f, &n_out);
        let dnv = ddn(&v_f, &n_out);
        let g1 = restrict(&t1.mul(&dnv), &chart);
        let mut val1 = integral_ref_tri(&g1);
        val1 *= &two_area;
        let t2 = tr2_divdiv(&tau_f, &n_out);
        let g2 = restrict(&t2.mul(&v_f), &chart);
        let mut val2 = integral_ref_tri(&g2);
        val2 *= &two_area;
        terms.push(val1.clone());
        terms.push(val2.clone());
        face_sum += &val1;
        face_sum -= &val2;
    }
    let mut rhs = volterm;
    rhs -= &edge_sum;
    rhs -= &face_sum;
    Ok(rel_residual(&lhs, &rhs, &terms))
}

/// Residual of the 2D Green's identity on a triangle, including the signed
/// corner terms.
pub fn green_residual_2d(tau: &PolyMatR, v: &PolyR, tri: &Tri, prec: u32) -> Result<BigF> {
    let verts: Vec<Vec<Rat>> = tri.verts.to_vec();
    let lhs_exact = integrate_simplex(&crate::diffops::div_div(tau).mul(v), &verts)?;
    let hessv = hess_scalar(v);
    let mut pair = PolyR::zero(2, ());
    for i in 0..2 {
        for j in 0..2 {
            pair = pair.add(&tau.at(i, j).mul(hessv.at(i, j)));
        }
    }
    let vol_exact = integrate_simplex(&pair, &verts)?;
    let lhs = bf_rat(prec, &lhs_exact);
    let volterm = bf_rat(prec, &vol_exact);

    let tau_f = to_float_mat(tau, prec);
    let v_f = v.to_float(prec);
    let mut terms = vec![lhs.clone(), volterm.clone()];
    let mut boundary = bf0(prec);
    let mut corners = bf0(prec);
    for e in 0..3 {
        let (t, _) = tri.edge_frame(e, prec);
        let n = tri.edge_outward(e, prec);
        let (a, b) = tri.edge_verts(e);
        let chart = chart_f(&tri.edge_chart(e), prec);
        let len = tri.edge_len(e, prec);
        let tvec = crate::diffops::const_vec(2, &t);
        let nvec = crate::diffops::const_vec(2, &n);
        let nn = tau_f.sandwich(&nvec, &nvec);
        let tn = tau_f.sandwich(&tvec, &nvec);
        let dnv = ddn(&v_f, &n);
        // (n^T tau n, d_n v)_e
        let g1 = restrict(&nn.mul(&dnv), &chart);
        let mut val1 = integral01(&g1);
        val1 *= &len;
        // (2 d_t(t^T tau n) + d_n(n^T tau n), v)_e
        let two = BigF::with_val(prec, 2);
        let shear = ddn(&tn, &t).scale(&two).add(&ddn(&nn, &n));
        let g2 = restrict(&shear.mul(&v_f), &chart);
        let mut val2 = integral01(&g2);
        val2 *= &len;
        boundary += &val1;
        boundary -= &val2;
        terms.push(val1);
        terms.push(val2);
        // corner terms: sign_{e,delta} (t^T tau n)(delta) v(delta)
        let tnv = tn.mul(&v_f);
        let pa: Vec<BigF> = tri.verts[a].iter().map(|r| bf_rat(prec, r)).collect();
        let pb: Vec<BigF> = tri.verts[b].iter().map(|r| bf_rat(prec, r)).collect();
        let at_b = tnv.eval(&pb);
        let at_a = tnv.eval(&pa);
        corners += &at_b;
        corners -= &at_a;
        terms.push(at_b);
        terms.push(at_a);
    }
    let mut rhs = volterm;
    rhs -= &boundary;
    rhs -= &corners;
    Ok(rel_residual(&lhs, &rhs, &terms))
}

/// Residual of the sym-curl Green's identity:
/// `(sym curl tau, sigma)_K = (tau, curl sigma)_K
///  - sum_F (sym Pi_F(tau x n) Pi_F, Pi_F sigma Pi_F)_F
///  - sum_F (n . tau x n, n . sigma Pi_F)_F`  with symmetric `sigma`.
pub fn green_residual_symcurl(
    tau: &PolyMatR,
    sigma: &PolyMatR,
    tet: &Tet,
    prec: u32,
) -> Result<BigF> {
    let verts: Vec<Vec<Rat>> = tet.verts.to_vec();
    let sc = sym_curl(tau);
    let mut pair_l = PolyR::zero(3, ());
    let curl_s = curl_mat3(sigma);
    let mut pair_r = PolyR::zero(3, ());
    for i in 0..3 {
        for j in 0..3 {
            pair_l = pair_l.add(&sc.at(i, j).mul(sigma.at(i, j)));
            pair_r = pair_r.add(&tau.at(i, j).mul(curl_s.at(i, j)));
        }
    }
    let lhs = bf_rat(prec, &integrate_simplex(&pair_l, &verts)?);
    let volterm = bf_rat(prec, &integrate_simplex(&pair_r, &verts)?);

    let tau_f = to_float_mat(tau, prec);
    let sig_f = to_float_mat(sigma, prec);
    let mut terms = vec![lhs.clone(), volterm.clone()];
    let mut facesum = bf0(prec);
    for f in 0..4 {
        let fr = tet.face_frame(f, prec);
        let sign = BigF::with_val(prec, fr.outward_sign);
        let n: Vec<BigF> = fr
            .n
            .iter()
            .map(|x| {
                let mut y = x.clone();
                y *= &sign;
                y
            })
            .collect();
        let chart = chart_f(&tet.face_chart(f), prec);
        let area2 = {
            let mut a = tet.face_area(f, prec);
            a *= 2u32;
            a
        };
        let t1 = tr1_symcurl(&tau_f, &n);
        let sig_proj = pi_f_mat(&sig_f, &n);
        let mut g = PolyF::zero(3, prec);
        for i in 0..3 {
            for j in 0..3 {
                g = g.add(&t1.at(i, j).mul(sig_proj.at(i, j)));
            }
        }
        let mut val1 = integral_ref_tri(&restrict(&g, &chart));
        val1 *= &area2;
        let t2 = tr2_symcurl(&tau_f, &n);
        let nvec = crate::diffops::const_vec(3, &n);
        let nsig = sig_f.dot_left(&nvec);
        let nsig_proj = crate::diffops::pi_f_vec(&nsig, &n);
        let g2 = dot_vec(&t2, &nsig_proj);
        let mut val2 = integral_ref_tri(&restrict(&g2, &chart));
        val2 *= &area2;
        facesum += &val1;
        facesum += &val2;
        terms.push(val1);
        terms.push(val2);
    }
    let mut rhs = volterm;
    rhs -= &facesum;
    Ok(rel_residual(&lhs, &rhs, &terms))
}

// ---------------------------------------------------------------------
// trace relations
// ---------------------------------------------------------------------

/// Relation `n^T (sym curl tau) n = div_F (n . tau x n)` checked on the
/// chart of face `f`; returns the coefficientwise relative residual.
pub fn trace1_relation(tau: &PolyMatR, tet: &Tet, f: usize, prec: u32) -> BigF {
    let fr = tet.face_frame(f, prec);
    let tau_f = to_float_mat(tau, prec);
    let sc = {
        let e = sym_curl(tau);
        to_float_mat(&e, prec)
    };
    let lhs = tr1_divdiv(&sc, &fr.n);
    let rhs = div_f(&tr2_symcurl(&tau_f, &fr.n), &fr.n);
    let chart = chart_f(&tet.face_chart(f), prec);
    poly_rel_diff(&restrict(&lhs, &chart), &restrict(&rhs, &chart))
}

/// Relation for the second trace of `sigma = sym curl tau`:
/// `rot_F(n x sigma . n) + n . div sigma
///   = -rot_F rot_F (n x sym(tau x n) x n)
///   = div_F div_F (Pi_F sym(tau x n) Pi_F)`;
/// returns the worst of the two coefficientwise residuals on face `f`.
pub fn trace2_relation(tau: &PolyMatR, tet: &Tet, f: usize, prec: u32) -> BigF {
    let fr = tet.face_frame(f, prec);
    let n = &fr.n;
    let tau_f = to_float_mat(tau, prec);
    let sc = {
        let e = sym_curl(tau);
        to_float_mat(&e, prec)
    };
    let narr = const3(3, n);
    // lhs = rot_F(n x sigma . n) + n . div sigma
    let nxsig = sc.cross_left(&narr);
    let w = nxsig.dot_right(narr.as_ref());
    let mut lhs = rot_f_emb(&w, n);
    let divs = div_mat(&sc);
    let nvec = crate::diffops::const_vec(3, n);
    lhs = lhs.add(&dot_vec(&nvec, &divs));
    // rhs1 = -rot_F rot_F (tr1_perp)
    let t1p = tr1_perp_symcurl(&tau_f, n);
    let rots: Vec<PolyF> = (0..3)
        .map(|i| rot_f_emb(&t1p.row_vec(i), n))
        .collect();
    let rhs1 = rot_f_emb(&rots, n).neg();
    // rhs2 = div_F div_F (tr1)
    let t1 = tr1_symcurl(&tau_f, n);
    let rhs2 = div_f(&div_f_mat(&t1, n), n);
    let chart = chart_f(&tet.face_chart(f), prec);
    let l = restrict(&lhs, &chart);
    let a = poly_rel_diff(&l, &restrict(&rhs1, &chart));
    let b = poly_rel_diff(&l, &restrict(&rhs2, &chart));
    if a > b {
        a
    } else {
        b
    }
}

/// Edge relation expressing the curl edge moment through sym-curl data;
/// checked on the chart of edge `e` of face `f`.
pub fn edge_curl_relation(tau: &PolyMatR, tet: &Tet, f: usize, e: usize, prec: u32) -> BigF {
    let fr = tet.face_frame(f, prec);
    let ef = tet.edge_frame(e, prec);
    let tau_f = to_float_mat(tau, prec);
    let curl_t = curl_mat3(&tau_f);
    let sc = curl_t.sym();
    let nfe = cross_f(prec, &ef.t, &fr.n);
    // lhs = n_Fe^T (curl tau) n_F
    let lhs = sandwich_const(&curl_t, &nfe, &fr.n);
    // rhs = c1 c2 (S22 - S11) - 2 c2^2 S12 + n2^T (curl tau) n1
    let c1 = fdot(prec, &fr.n, &ef.n1);
    let c2 = fdot(prec, &fr.n, &ef.n2);
    let s11 = sandwich_const(&sc, &ef.n1, &ef.n1);
    let s22 = sandwich_const(&sc, &ef.n2, &ef.n2);
    let s12 = sandwich_const(&sc, &ef.n1, &ef.n2);
    let c21 = sandwich_const(&curl_t, &ef.n2, &ef.n1);
    let mut c1c2 = c1.clone();
    c1c2 *= &c2;
    let mut m2c2sq = c2.clone();
    m2c2sq.square_mut();
    m2c2sq *= 2u32;
    m2c2sq = -m2c2sq;
    let rhs = s22
        .sub(&s11)
        .scale(&c1c2)
        .add(&s12.scale(&m2c2sq))
        .add(&c21);
    let chart = chart_f(&tet.edge_chart(e), prec);
    poly_rel_diff(&restrict(&lhs, &chart), &restrict(&rhs, &chart))
}

/// Edge relation for the effective trace of `tr1(tau)`:
/// `d_t(t^T tr1 n_Fe) + n_Fe^T div_F tr1 = n_Fe^T (curl tau) n_F + d_t(t^T tau t)`.
pub fn edge_shear_relation(tau: &PolyMatR, tet: &Tet, f: usize, e: usize, prec: u32) -> BigF {
    let fr = tet.face_frame(f, prec);
    let ef = tet.edge_frame(e, prec);
    let tau_f = to_float_mat(tau, prec);
    let nfe = cross_f(prec, &ef.t, &fr.n);
    let t1 = tr1_symcurl(&tau_f, &fr.n);
    let lhs = {
        let a = ddn(&sandwich_const(&t1, &ef.t, &nfe), &ef.t);
        let divs = div_f_mat(&t1, &fr.n);
        let nfev = crate::diffops::const_vec(3, &nfe);
        a.add(&dot_vec(&nfev, &divs))
    };
    let curl_t = curl_mat3(&tau_f);
    let rhs = {
        let a = sandwich_const(&curl_t, &nfe, &fr.n);
        let b = ddn(&sandwich_const(&tau_f, &ef.t, &ef.t), &ef.t);
        a.add(&b)
    };
    let chart = chart_f(&tet.edge_chart(e), prec);
    poly_rel_diff(&restrict(&lhs, &chart), &restrict(&rhs, &chart))
}

/// 2D relation `d_t(t^T tau n_e) + n_e^T div_F tau = d_t(t^T d_t v)` for
/// `tau = sym curl_F v` with `n_e` the counterclockwise rotation of `t`.
pub fn trace2_2d_relation(v: &[PolyR], tri: &Tri, e: usize, prec: u32) -> BigF {
    let tau = sym_curl_f(v);
    let tau_f = to_float_mat(&tau, prec);
    let (t, n) = tri.edge_frame(e, prec);
    let tvec = crate::diffops::const_vec(2, &t);
    let nvec = crate::diffops::const_vec(2, &n);
    let tn = tau_f.sandwich(&tvec, &nvec);
    let divs = div_mat(&tau_f);
    let lhs = ddn(&tn, &t).add(&dot_vec(&nvec, &divs));
    let v_f = to_float_vec(v, prec);
    let dtv: Vec<PolyF> = v_f.iter().map(|c| ddn(c, &t)).collect();
    let rhs = ddn(&dot_vec(&tvec, &dtv), &t);
    let chart = chart_f(&tri.edge_chart(e), prec);
    poly_rel_diff(&restrict(&lhs, &chart), &restrict(&rhs, &chart))
}

/// Parity of the combined divdiv trace: computed with `-n` it flips sign.
pub fn tr2_parity_residual(tau: &PolyMatR, tet: &Tet, f: usize, prec: u32) -> BigF {
    let fr = tet.face_frame(f, prec);
    let tau_f = to_float_mat(tau, prec);
    let plus = tr2_divdiv(&tau_f, &fr.n);
    let nneg: Vec<BigF> = fr.n.iter().map(|x| -x.clone()).collect();
    let minus = tr2_divdiv(&tau_f, &nneg);
    let chart = chart_f(&tet.face_chart(f), prec);
    poly_rel_diff(&restrict(&plus, &chart), &restrict(&minus.neg(), &chart))
}

fn sandwich_const(m: &PolyMat<BigF>, a: &[BigF], b: &[BigF]) -> PolyF {
    let av = crate::diffops::const_vec(m.arity, a);
    let bv = crate::diffops::const_vec(m.arity, b);
    m.sandwich(&av, &bv)
}

pub fn cross_f(prec: u32, a: &[BigF], b: &[BigF]) -> Vec<BigF> {
    crate::simplexgeo::cross_f(prec, a, b)
}

/// For dev-grad fields with vanishing boundary values the sym-curl traces
/// vanish; used by the bubble complex checks.
pub fn devgrad_trace_residuals(vfield: &[PolyR], tet: &Tet, prec: u32) -> (BigF, BigF) {
    let t = crate::diffops::dev_grad(vfield);
    let t_f = to_float_mat(&t, prec);
    let mut worst1 = bf0(prec);
    let mut worst2 = bf0(prec);
    for f in 0..4 {
        let fr = tet.face_frame(f, prec);
        let chart = chart_f(&tet.face_chart(f), prec);
        let t1p = tr1_perp_symcurl(&t_f, &fr.n);
        for i in 0..3 {
            for j in 0..3 {
                let r = restrict(t1p.at(i, j), &chart);
                let m = poly_max_coeff(&r);
                if m > worst1 {
                    worst1 = m;
                }
            }
        }
        for comp in tr2_symcurl(&t_f, &fr.n) {
            let r = restrict(&comp, &chart);
            let m = poly_max_coeff(&r);
            if m > worst2 {
                worst2 = m;
            }
        }
    }
    (worst1, worst2)
}

pub fn poly_max_coeff(p: &PolyF) -> BigF {
    let mut m = bf0(p.ctx);
    for c in p.terms.values() {
        let a = c.clone().abs();
        if a > m {
            m = a;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat_i;
    use crate::polyspaces::SpaceClass;
    use crate::randgen::PolyGen;
    use crate::tol::DEFAULT_PREC;

    fn x(i: usize) -> PolyR {
        PolyR::var(3, (), i)
    }

    #[test]
    fn green_3d_trivial_and_simple() {
        let p = DEFAULT_PREC;
        let tet = Tet::reference();
        // constant tau, linear v: everything vanishes termwise
        let mut g = PolyGen::new(1);
        let tau_const = g.tensor(3, SpaceClass::Sym, 0);
        let v_lin = x(0).add(&x(1).scale(&rat_i(2)));
        let r = green_residual_3d(&tau_const, &v_lin, &tet, p).unwrap();
        assert!(r.to_f64() < 1e-70, "residual {}", r.to_f64());
        // tau = x x^T, v = x1^2
        let xv = [x(0), x(1), x(2)];
        let tau = crate::tensorops::outer(&xv, &xv);
        let v = x(0).mul(&x(0));
        let r = green_residual_3d(&tau, &v, &tet, p).unwrap();
        assert!(r.to_f64() < 1e-60, "residual {}", r.to_f64());
    }

    #[test]
    fn green_3d_random() {
        let p = DEFAULT_PREC;
        let mut g = PolyGen::new(7);
        let mut worst: f64 = 0.0;
        for seed in 0..5 {
            let tet = Tet::random(seed + 11);
            for _ in 0..3 {
                let tau = g.tensor(3, SpaceClass::Sym, 3);
                let v = g.scalar(3, 4);
                let r = green_residual_3d(&tau, &v, &tet, p).unwrap();
                worst = worst.max(r.to_f64());
            }
        }
        assert!(worst < 1e-55, "worst residual {worst}");
    }

    #[test]
    fn green_2d_random() {
        let p = DEFAULT_PREC;
        let mut g = PolyGen::new(9);
        let mut worst: f64 = 0.0;
        for seed in 0..5 {
            let tri = Tri::random(seed + 3);
            for _ in 0..3 {
                let tau = g.tensor(2, SpaceClass::Sym, 3);
                let v = g.scalar(2, 4);
                let r = green_residual_2d(&tau, &v, &tri, p).unwrap();
                worst = worst.max(r.to_f64());
            }
        }
        assert!(worst < 1e-55, "worst residual {worst}");
    }

    #[test]
    fn green_symcurl_random() {
        let p = DEFAULT_PREC;
        let mut g = PolyGen::new(13);
        let mut worst: f64 = 0.0;
        for seed in 0..5 {
            let tet = Tet::random(seed + 21);
            for _ in 0..2 {
                let tau = g.tensor(3, SpaceClass::GenMat, 2);
                let sigma = g.tensor(3, SpaceClass::Sym, 2);
                let r = green_residual_symcurl(&tau, &sigma, &tet, p).unwrap();
                worst = worst.max(r.to_f64());
            }
        }
        assert!(worst < 1e-55, "worst residual {worst}");
    }

    #[test]
    fn trace_relations_random() {
        let p = DEFAULT_PREC;
        let mut g = PolyGen::new(17);
        let mut worst: f64 = 0.0;
        for seed in 0..3 {
            let tet = Tet::random(seed + 31);
            let tau = g.tensor(3, SpaceClass::Dev, 2);
            for f in 0..4 {
                worst = worst.max(trace1_relation(&tau, &tet, f, p).to_f64());
                worst = worst.max(trace2_relation(&tau, &tet, f, p).to_f64());
                worst = worst.max(tr2_parity_residual(&g.tensor(3, SpaceClass::Sym, 3), &tet, f, p).to_f64());
            }
            for f in 0..4 {
                for e in 0..6 {
                    // only edges of the face
                    let fverts = crate::simplexgeo::TET_FACES[f];
                    let ev = crate::simplexgeo::TET_EDGES[e];
                    if ev.iter().all(|v| fverts.contains(v)) {
                        worst = worst.max(edge_curl_relation(&tau, &tet, f, e, p).to_f64());
                        worst = worst.max(edge_shear_relation(&tau, &tet, f, e, p).to_f64());
                    }
                }
            }
        }
        assert!(worst < 1e-55, "worst residual {worst}");
    }

    #[test]
    fn trace_2d_relation_example() {
        let p = DEFAULT_PREC;
        let tri = Tri::reference();
        // v = (x1^2, x1 x2)
        let v = vec![
            PolyR::var(2, (), 0).mul(&PolyR::var(2, (), 0)),
            PolyR::var(2, (), 0).mul(&PolyR::var(2, (), 1)),
        ];
        let mut worst: f64 = 0.0;
        for e in 0..3 {
            worst = worst.max(trace2_2d_relation(&v, &tri, e, p).to_f64());
        }
        let mut g = PolyGen::new(23);
        for seed in 0..3 {
            let tri = Tri::random(seed + 41);
            let v = g.vector(2, 3);
            for e in 0..3 {
                worst = worst.max(trace2_2d_relation(&v, &tri, e, p).to_f64());
            }
        }
        assert!(worst < 1e-55, "worst residual {worst}");
    }
}
