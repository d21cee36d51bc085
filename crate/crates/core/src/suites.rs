//! Check-suite drivers shared by the command-line tool and the
//! acceptance tests: each produces machine-readable result lines.

use num_traits::Zero;

use crate::complexlab::{self, ComplexId};
use crate::diffops::{self, Op};
use crate::error::Result;
use crate::exactla::{rat, Rat};
use crate::femdofs::{self, ElementDef, ElementKind};
use crate::meshfem::{self, Mesh, SpaceKind};
use crate::polyring::PolyR;
use crate::polyspaces::{self, SpaceClass};
use crate::randgen::PolyGen;
use crate::report::CheckResult;
use crate::simplexgeo::{Tet, Tri};
use crate::tensorops::{dot_vec, mskw, outer, vskw, PolyMat};
use crate::tol;
use crate::tracesgreen;

// ---------------------------------------------------------------------
// complexes and decompositions
// ---------------------------------------------------------------------

pub fn complexes_suite(ids: &[ComplexId], krange: Option<(u32, u32)>) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &id in ids {
        let (lo, hi) = id.degree_range();
        let (lo, hi) = match krange {
            Some((a, b)) => (a.max(lo), b.min(hi)),
            None => (lo, hi),
        };
        for k in lo..=hi {
            let rep = complexlab::verify_complex(id, k)?;
            let mut r = CheckResult::new(format!("complex/{}", rep.name), format!("k={k}"), rep.pass);
            r.metric_int("alternating_sum", rep.alternating_sum);
            r.note(format!(
                "dims {:?}, ranks {:?}",
                rep.dims, rep.op_ranks
            ));
            out.push(r);
        }
    }
    Ok(out)
}

pub fn decomp_suite(ks: &[u32]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &k in ks {
        let kk = k as i64;
        let whole_s = polyspaces::full_space(3, SpaceClass::Sym, kk);
        let a = polyspaces::c_sym3(k);
        let b = polyspaces::c_plus3(k, None);
        let rep = polyspaces::verify_direct_sum(&[&a, &b], &whole_s)?;
        let mut r = CheckResult::new("decomp/symcurl-koszul-split", format!("k={k}"), rep.pass);
        r.note(format!(
            "{} + {} = {} (rank {})",
            rep.part_dims[0], rep.part_dims[1], rep.whole_dim, rep.rank_of_union
        ));
        out.push(r);

        let h = polyspaces::hess_image(3, k);
        let s = polyspaces::sym_cross_x3(k, None);
        let rep = polyspaces::verify_direct_sum(&[&h, &s], &whole_s)?;
        let mut r = CheckResult::new("decomp/hessian-split", format!("k={k}"), rep.pass);
        r.note(format!(
            "{} + {} = {} (rank {})",
            rep.part_dims[0], rep.part_dims[1], rep.whole_dim, rep.rank_of_union
        ));
        out.push(r);

        let whole_t = polyspaces::full_space(3, SpaceClass::Dev, kk + 1);
        let sx = polyspaces::s_cross_x3(k, None);
        let dg = polyspaces::dev_grad_image3(k);
        let rep = polyspaces::verify_direct_sum(&[&sx, &dg], &whole_t)?;
        let mut r = CheckResult::new("decomp/tracefree-split", format!("k={k}"), rep.pass);
        r.note(format!(
            "{} + {} = {} (rank {})",
            rep.part_dims[0], rep.part_dims[1], rep.whole_dim, rep.rank_of_union
        ));
        out.push(r);
    }
    Ok(out)
}

/// Exact kernel-dimension bookkeeping behind the element construction:
/// `dim(P_k(S) & ker divdiv) = dim sym curl P_{k+1}(T) = (5k^3+36k^2+67k+36)/6`.
pub fn kernel_dims_suite(ks: &[u32]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let o3 = vec![Rat::zero(); 3];
    for &k in ks {
        let kk = k as i64;
        let s = polyspaces::full_space(3, SpaceClass::Sym, kk);
        let scal = polyspaces::full_space(3, SpaceClass::Scalar, kk - 2);
        let dd = diffops::operator_matrix(&Op::DivDiv, &s, &scal)?;
        let nullity = s.len() - dd.rank();
        let null_count = dd.nullspace_basis().len();
        let t = polyspaces::full_space(3, SpaceClass::Dev, kk + 1);
        let sc = diffops::operator_matrix(&Op::SymCurl, &t, &s)?;
        let rank_sc = sc.rank();
        let want = polyspaces::dim_ck_sym(kk) as usize;
        let pass = nullity == want && rank_sc == want && null_count == nullity;
        let mut r = CheckResult::new("dims/kernel-divdiv", format!("k={k}"), pass);
        r.metric_int("nullity", nullity as i64);
        r.metric_int("rank_symcurl", rank_sc as i64);
        r.metric_int("formula", want as i64);
        out.push(r);
        // Koszul kernel bookkeeping: dim(P_{k+1}(T) & ker(.x)) = dim(P_k(S) x x)
        let v3 = polyspaces::full_space(3, SpaceClass::Vector, kk + 2);
        let dx = diffops::operator_matrix(&Op::DotX(o3.clone()), &t, &v3)?;
        let cx = diffops::operator_matrix(&Op::CrossX(o3.clone()), &s, &t)?;
        let pass = t.len() - dx.rank() == cx.rank();
        let mut r = CheckResult::new("dims/koszul-kernel", format!("k={k}"), pass);
        r.metric_int("nullity_dotx", (t.len() - dx.rank()) as i64);
        r.metric_int("rank_crossx", cx.rank() as i64);
        out.push(r);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub enum CellSpec {
    Reference,
    Random(u64),
}

impl CellSpec {
    pub fn label(&self) -> String {
        match self {
            CellSpec::Reference => "reference".into(),
            CellSpec::Random(s) => format!("random:{s}"),
        }
    }

    pub fn tet(&self) -> Tet {
        match self {
            CellSpec::Reference => Tet::reference(),
            CellSpec::Random(s) => Tet::random(*s),
        }
    }

    pub fn tri(&self) -> Tri {
        match self {
            CellSpec::Reference => Tri::reference(),
            CellSpec::Random(s) => Tri::random(*s),
        }
    }
}

pub fn unisolvence_suite(
    kind: ElementKind,
    l: u32,
    k: u32,
    cells: &[CellSpec],
    prec: u32,
) -> Result<Vec<CheckResult>> {
    let def = ElementDef::new(kind, l, k)?;
    let mut out = Vec::new();
    for cs in cells {
        let rep = if kind == ElementKind::DivDiv2d {
            femdofs::unisolvence_check_tri(&def, &cs.tri(), &cs.label(), prec)?
        } else {
            femdofs::unisolvence_check_tet(&def, &cs.tet(), &cs.label(), prec)?
        };
        let mut r = CheckResult::new(
            format!("unisolvence/{}", rep.element),
            format!("{} cell={}", rep.params, rep.cell),
            rep.pass,
        );
        r.metric_int("size", rep.size as i64);
        r.metric_f64("sigma_ratio", rep.ratio);
        r.metric_f64("sigma_ratio_raw", rep.raw_ratio);
        r.note(format!("threshold {:.0e}", tol::UNISOLVENCE_RATIO));
        out.push(r);
    }
    Ok(out)
}

pub fn dualbasis_suite(
    kind: ElementKind,
    l: u32,
    k: u32,
    cells: &[CellSpec],
    prec: u32,
) -> Result<Vec<CheckResult>> {
    let def = ElementDef::new(kind, l, k)?;
    let mut out = Vec::new();
    for cs in cells {
        let (duals, resid) = femdofs::dual_basis_tet(&def, &cs.tet(), prec)?;
        let pass = resid < tol::BIORTHOGONALITY_TOL;
        let mut r = CheckResult::new(
            format!("dualbasis/{}", def.kind.name()),
            format!("{} cell={}", def.params(), cs.label()),
            pass,
        );
        r.metric_int("count", duals.len() as i64);
        r.metric_f64("biorthogonality_residual", resid);
        out.push(r);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// bubbles
// ---------------------------------------------------------------------

pub fn bubble_suite(pairs: &[(u32, u32)], cells: &[CellSpec], prec: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for cs in cells {
        let tet = cs.tet();
        for &(l, k) in pairs {
            let ctx = femdofs::TetCtx::new(&tet, prec, 2 * (l.max(k) + 2));
            let basis = crate::bubblecx::bubble_basis(&ctx, l)?;
            let want = polyspaces::dim_bubble_symcurl(l as i64) as usize;
            let edge = crate::bubblecx::bubble_edge_residual(&ctx, &basis).to_f64();
            let trace = crate::bubblecx::bubble_trace_residual(&ctx, &basis).to_f64();
            let scedge = crate::bubblecx::bubble_symcurl_edge_residual(&ctx, &basis).to_f64();
            let psi = crate::bubblecx::psi_span_ok(&ctx)?;
            let pass = basis.elements.len() == want
                && edge < tol::BUBBLE_TRACE_TOL
                && trace < tol::BUBBLE_TRACE_TOL
                && scedge < tol::BUBBLE_TRACE_TOL
                && psi;
            let mut r = CheckResult::new(
                "bubble/space",
                format!("l={l} cell={}", cs.label()),
                pass,
            );
            r.metric_int("dim", basis.elements.len() as i64);
            r.metric_f64("edge_residual", edge);
            r.metric_f64("trace_residual", trace);
            r.metric_f64("symcurl_edge_residual", scedge);
            out.push(r);

            let rep = crate::bubblecx::verify_bubble_complex(l, k, &tet, prec)?;
            let mut r = CheckResult::new(
                "bubble/complex3d",
                format!("l={l} k={k} cell={}", cs.label()),
                rep.exact,
            );
            r.metric_f64("max_residual", rep.max_residual);
            r.note(format!(
                "dims {:?}, ranks {}/{}/{}",
                rep.dims, rep.rank_devgrad, rep.rank_symcurl, rep.rank_divdiv
            ));
            out.push(r);

            let tri = cs.tri();
            let rep2 = crate::bubblecx::verify_2d_bubble_complex(l, k, &tri)?;
            let mut r = CheckResult::new(
                "bubble/complex2d",
                format!("l={l} k={k} cell={}", cs.label()),
                rep2.exact,
            );
            r.note(format!(
                "dims {:?}, ranks {}/{}",
                rep2.dims, rep2.rank_symcurl, rep2.rank_divdiv
            ));
            out.push(r);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Green's identities and trace relations
// ---------------------------------------------------------------------

pub fn green_suite(cases: usize, ncells: usize, seed: u64, prec: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut gen = PolyGen::new(seed);
    let mut worst3 = 0f64;
    for c in 0..ncells {
        let tet = Tet::random(seed + 100 + c as u64);
        for _ in 0..cases {
            let tau = gen.tensor(3, SpaceClass::Sym, 3);
            let v = gen.scalar(3, 4);
            worst3 = worst3.max(tracesgreen::green_residual_3d(&tau, &v, &tet, prec)?.to_f64());
        }
    }
    let mut r = CheckResult::new("green/3d", format!("cases={} cells={}", cases, ncells), worst3 < tol::GREEN_TOL);
    r.metric_f64("max_residual", worst3);
    out.push(r);

    let mut worst2 = 0f64;
    for c in 0..ncells {
        let tri = Tri::random(seed + 200 + c as u64);
        for _ in 0..cases {
            let tau = gen.tensor(2, SpaceClass::Sym, 3);
            let v = gen.scalar(2, 4);
            worst2 = worst2.max(tracesgreen::green_residual_2d(&tau, &v, &tri, prec)?.to_f64());
        }
    }
    let mut r = CheckResult::new("green/2d", format!("cases={} cells={}", cases, ncells), worst2 < tol::GREEN_TOL);
    r.metric_f64("max_residual", worst2);
    out.push(r);

    let mut worstsc = 0f64;
    for c in 0..ncells {
        let tet = Tet::random(seed + 300 + c as u64);
        for _ in 0..cases {
            let tau = gen.tensor(3, SpaceClass::GenMat, 2);
            let sigma = gen.tensor(3, SpaceClass::Sym, 2);
            worstsc = worstsc
                .max(tracesgreen::green_residual_symcurl(&tau, &sigma, &tet, prec)?.to_f64());
        }
    }
    let mut r = CheckResult::new(
        "green/symcurl",
        format!("cases={} cells={}", cases, ncells),
        worstsc < tol::GREEN_TOL,
    );
    r.metric_f64("max_residual", worstsc);
    out.push(r);
    Ok(out)
}

pub fn trace_suite(cases: usize, seed: u64, prec: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut gen = PolyGen::new(seed);
    let mut w_tr1 = 0f64;
    let mut w_tr2 = 0f64;
    let mut w_edge1 = 0f64;
    let mut w_edge2 = 0f64;
    let mut w_2d = 0f64;
    for c in 0..cases {
        let tet = Tet::random(seed + 500 + c as u64);
        let tau = gen.tensor(3, SpaceClass::Dev, 2);
        for f in 0..4 {
            w_tr1 = w_tr1.max(tracesgreen::trace1_relation(&tau, &tet, f, prec).to_f64());
            w_tr2 = w_tr2.max(tracesgreen::trace2_relation(&tau, &tet, f, prec).to_f64());
            for e in 0..6 {
                let fv = crate::simplexgeo::TET_FACES[f];
                let ev = crate::simplexgeo::TET_EDGES[e];
                if ev.iter().all(|v| fv.contains(v)) {
                    w_edge1 =
                        w_edge1.max(tracesgreen::edge_curl_relation(&tau, &tet, f, e, prec).to_f64());
                    w_edge2 = w_edge2
                        .max(tracesgreen::edge_shear_relation(&tau, &tet, f, e, prec).to_f64());
                }
            }
        }
        let tri = Tri::random(seed + 600 + c as u64);
        let v = gen.vector(2, 3);
        for e in 0..3 {
            w_2d = w_2d.max(tracesgreen::trace2_2d_relation(&v, &tri, e, prec).to_f64());
        }
    }
    for (tag, w) in [
        ("trace/normal-normal", w_tr1),
        ("trace/combined", w_tr2),
        ("trace/edge-curl", w_edge1),
        ("trace/edge-shear", w_edge2),
        ("trace/2d-shear", w_2d),
    ] {
        let mut r = CheckResult::new(tag, format!("cases={cases}"), w < tol::GREEN_TOL);
        r.metric_f64("max_residual", w);
        out.push(r);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// meshes
// ---------------------------------------------------------------------

pub fn mesh_suite(meshes: &[Mesh], l: u32, k: u32, prec: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for mesh in meshes {
        let rep = meshfem::verify_global_complex(mesh, l, k, prec)?;
        let mut r = CheckResult::new(
            "mesh/global-complex",
            format!("mesh={} l={l} k={k}", rep.mesh),
            rep.pass,
        );
        r.metric_int("euler", rep.euler);
        r.metric_int("alternating_sum", rep.alternating_sum);
        r.metric_f64("single_valued_residual", rep.single_valued_residual);
        r.metric_f64("surjectivity_residual", rep.surjectivity_residual);
        r.metric_f64("composition_residual", rep.composition_residual);
        let marker = if rep.exactness_expected {
            ""
        } else {
            " [exactness not expected: non-contractible]"
        };
        r.note(format!(
            "dims {:?}, rank dev grad {} (kernel 4), rank divdiv {}{marker}",
            rep.dims, rep.rank_devgrad, rep.rank_divdiv
        ));
        out.push(r);
    }
    Ok(out)
}

pub fn dims_table(space: SpaceKind, mesh: &Mesh, l: u32, k: u32, prec: u32) -> Result<CheckResult> {
    let formula = meshfem::global_dim_formula(space, l as i64, k as i64, mesh);
    let assembled = meshfem::global_space(space, l, k, mesh, prec)?.dim as i64;
    let mut r = CheckResult::new(
        format!("dims/{}", space.name()),
        format!("mesh={} l={l} k={k}", mesh.name),
        formula == assembled,
    );
    r.metric_int("formula", formula);
    r.metric_int("assembled", assembled);
    Ok(r)
}

// ---------------------------------------------------------------------
// pointwise identity suite
// ---------------------------------------------------------------------

/// Rational unit vectors (Pythagorean quadruples) for exact frame checks.
fn rational_unit_vectors() -> Vec<Vec<Rat>> {
    vec![
        vec![rat(1, 3), rat(2, 3), rat(2, 3)],
        vec![rat(2, 7), rat(3, 7), rat(6, 7)],
        vec![rat(4, 9), rat(4, 9), rat(7, 9)],
        vec![rat(1, 9), rat(4, 9), rat(8, 9)],
        vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        vec![rat(2, 11), rat(6, 11), rat(9, 11)],
    ]
}

pub fn identities_suite(cases: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut gen = PolyGen::new(seed);
    let zero3 = vec![Rat::zero(); 3];

    let mut push = |tag: &str, pass: bool, n: usize| {
        let mut r = CheckResult::new(format!("identity/{tag}"), format!("cases={n}"), pass);
        r.note("exact");
        out.push(r.clone());
    };

    // skw(grad u) = 1/2 mskw(curl u)
    let mut ok = true;
    for _ in 0..cases {
        let u = gen.vector(3, 3);
        let lhs = diffops::grad_vec(&u).skw();
        let c = diffops::curl_vec3(&u);
        let rhs = mskw(&[c[0].clone(), c[1].clone(), c[2].clone()]).scale_coeff(&rat(1, 2));
        if lhs != rhs {
            ok = false;
        }
    }
    push("skw-grad", ok, cases);

    // skw(curl A) = 1/2 mskw[div(A^T) - grad tr A]
    let mut ok = true;
    for _ in 0..cases {
        let a = gen.tensor(3, SpaceClass::GenMat, 3);
        let lhs = diffops::curl_mat3(&a).skw();
        let rhs = diffops::mskw_of_grad_div_combo(&a).scale_coeff(&rat(1, 2));
        if lhs != rhs {
            ok = false;
        }
    }
    push("skw-curl", ok, cases);

    // div mskw u = -curl u
    let mut ok = true;
    for _ in 0..cases {
        let u = gen.vector(3, 3);
        let lhs = diffops::div_mat(&mskw(&[u[0].clone(), u[1].clone(), u[2].clone()]));
        let rhs = diffops::curl_vec3(&u);
        if !(0..3).all(|i| lhs[i] == rhs[i].neg()) {
            ok = false;
        }
    }
    push("div-mskw", ok, cases);

    // curl(u I) = -mskw grad u
    let mut ok = true;
    for _ in 0..cases {
        let s = gen.scalar(3, 4);
        let mut si = PolyMat::zeros(3, (), 3, 3);
        for i in 0..3 {
            si.set(i, i, s.clone());
        }
        let g = diffops::grad_scalar(&s);
        let rhs = mskw(&[g[0].clone(), g[1].clone(), g[2].clone()]).neg();
        if diffops::curl_mat3(&si) != rhs {
            ok = false;
        }
    }
    push("curl-scalar-identity", ok, cases);

    // tr(tau x x) = -2 x . vskw tau
    let mut ok = true;
    for _ in 0..cases {
        let tau = gen.tensor(3, SpaceClass::GenMat, 3);
        let xv: Vec<PolyR> = (0..3).map(|i| PolyR::var(3, (), i)).collect();
        let xarr = [xv[0].clone(), xv[1].clone(), xv[2].clone()];
        let lhs = tau.cross_right(&xarr).trace();
        let w = vskw(&tau)?;
        let rhs = dot_vec(&xv, w.as_ref()).scale(&rat(-2, 1));
        if lhs != rhs {
            ok = false;
        }
    }
    push("trace-cross", ok, cases);

    // div div mskw v = 0
    let mut ok = true;
    for _ in 0..cases {
        let v = gen.vector(3, 4);
        if !diffops::div_div(&mskw(&[v[0].clone(), v[1].clone(), v[2].clone()])).is_zero() {
            ok = false;
        }
    }
    push("divdiv-skw", ok, cases);

    // n x (curl v) = grad(n.v) - d_n v  (any constant direction n)
    let mut ok = true;
    for i in 0..cases {
        let v = gen.vector(3, 3);
        let frames = rational_unit_vectors();
        let n = &frames[i % frames.len()];
        let nv = diffops::const_vec(3, n);
        let c = diffops::curl_vec3(&v);
        let lhs = crate::tensorops::cross3(
            &[nv[0].clone(), nv[1].clone(), nv[2].clone()],
            &[c[0].clone(), c[1].clone(), c[2].clone()],
        );
        let g = diffops::grad_scalar(&dot_vec(&nv, &v));
        for j in 0..3 {
            if lhs[j] != g[j].sub(&diffops::ddn(&v[j], n)) {
                ok = false;
            }
        }
    }
    push("tangential-trace", ok, cases);

    // rot_F v = -div_F(n x v) and div_F v = rot_F(n x v) (rational unit n)
    let mut ok = true;
    for i in 0..cases {
        let v = gen.vector(3, 3);
        let frames = rational_unit_vectors();
        let n = &frames[i % frames.len()];
        let nv = diffops::const_vec(3, n);
        let nxv = crate::tensorops::cross3(
            &[nv[0].clone(), nv[1].clone(), nv[2].clone()],
            &[v[0].clone(), v[1].clone(), v[2].clone()],
        );
        if diffops::rot_f_emb(&v, n) != diffops::div_f(nxv.as_ref(), n).neg() {
            ok = false;
        }
        if diffops::div_f(&v, n) != diffops::rot_f_emb(nxv.as_ref(), n) {
            ok = false;
        }
        // div_F curl_F = 0 and rot_F grad_F = 0
        let q = gen.scalar(3, 3);
        if !diffops::div_f(diffops::nabla_f_perp(&q, n).as_ref(), n).is_zero() {
            ok = false;
        }
        if !diffops::rot_f_emb(&diffops::grad_f(&q, n), n).is_zero() {
            ok = false;
        }
    }
    push("surface-rot-div", ok, cases);

    // pi_RT is a projector fixing RT
    let mut ok = true;
    for _ in 0..cases {
        let v = gen.vector(3, 3);
        let p1 = diffops::pi_rt(&v, &zero3);
        let p2 = diffops::pi_rt(&p1, &zero3);
        if p1 != p2 {
            ok = false;
        }
        let a = rat(gen.gen_range(-5, 6), 1);
        let b: Vec<Rat> = (0..3).map(|_| rat(gen.gen_range(-5, 6), 1)).collect();
        let rt: Vec<PolyR> = (0..3)
            .map(|i| {
                PolyR::var(3, (), i)
                    .scale(&a)
                    .add(&PolyR::constant(3, b[i].clone()))
            })
            .collect();
        if diffops::pi_rt(&rt, &zero3) != rt {
            ok = false;
        }
    }
    push("pi-rt-projector", ok, cases);

    // Euler identity (x . grad) q = m q on homogeneous components
    let mut ok = true;
    for _ in 0..cases {
        let p = gen.scalar(3, 4);
        let x: Vec<PolyR> = (0..3).map(|i| PolyR::var(3, (), i)).collect();
        let mut xg = PolyR::zero(3, ());
        for i in 0..3 {
            xg = xg.add(&x[i].mul(&p.derivative(i)));
        }
        let mut recon = PolyR::zero(3, ());
        for m in 0..=4u32 {
            recon = recon.add(&p.homogeneous_component(m).scale(&rat(m as i64, 1)));
        }
        if xg != recon {
            ok = false;
        }
    }
    push("euler-homogeneous", ok, cases);

    // Koszul / differential compositions: (p xx^T) x x = 0, (tau x x).x = 0,
    // pi_RT(tau . x) = 0, div div(sym curl) = 0, sym curl(dev grad) = 0
    let mut ok = true;
    for _ in 0..cases {
        let p = PolyMat::scalar(gen.scalar(3, 2));
        let xxt = Op::XxT(zero3.clone()).apply(&p)?;
        if !Op::CrossX(zero3.clone()).apply(&xxt)?.is_zero() {
            ok = false;
        }
        let tau = gen.tensor(3, SpaceClass::Dev, 2);
        let c = Op::CrossX(zero3.clone()).apply(&tau)?;
        if !Op::DotX(zero3.clone()).apply(&c)?.is_zero() {
            ok = false;
        }
        let tx = Op::DotX(zero3.clone()).apply(&tau)?;
        if !Op::PiRT(zero3.clone()).apply(&tx)?.is_zero() {
            ok = false;
        }
        let a = gen.tensor(3, SpaceClass::GenMat, 2);
        if !diffops::div_div(&diffops::sym_curl(&a)).is_zero() {
            ok = false;
        }
        let v = gen.vector(3, 3);
        if !diffops::sym_curl(&diffops::dev_grad(&v)).is_zero() {
            ok = false;
        }
    }
    push("compositions", ok, cases);

    // (x . grad + m) q = 0 forces q = 0 on P_3 (kernel ranks)
    {
        let p3 = polyspaces::full_space(3, SpaceClass::Scalar, 3);
        let mut ok = true;
        for shift in 0..3i64 {
            // matrix of x.grad + shift on P_3
            let cols: Vec<Vec<Rat>> = p3
                .elements
                .iter()
                .map(|e| {
                    let q = e.at(0, 0);
                    let x: Vec<PolyR> = (0..3).map(|i| PolyR::var(3, (), i)).collect();
                    let mut img = q.scale(&rat(shift, 1));
                    for i in 0..3 {
                        img = img.add(&x[i].mul(&q.derivative(i)));
                    }
                    p3.linearize(&PolyMat::scalar(img)).unwrap()
                })
                .collect();
            let m = crate::exactla::ExactMatrix::from_columns(&cols);
            let nullity = p3.len() - m.rank();
            let want = if shift == 0 { 1 } else { 0 };
            if nullity != want {
                ok = false;
            }
        }
        push("radial-derivative-kernel", ok, 3);
    }

    // sym curl identity on random dyadic fields: (u v^T) x x = u (v x x)^T
    let mut ok = true;
    for _ in 0..cases {
        let u = gen.vector(3, 1);
        let v = gen.vector(3, 1);
        let x: Vec<PolyR> = (0..3).map(|i| PolyR::var(3, (), i)).collect();
        let xarr = [x[0].clone(), x[1].clone(), x[2].clone()];
        let lhs = outer(&u, &v).cross_right(&xarr);
        let vxx = crate::tensorops::cross3(&[v[0].clone(), v[1].clone(), v[2].clone()], &xarr);
        let rhs = outer(&u, &vxx);
        if lhs != rhs {
            ok = false;
        }
    }
    push("dyadic-cross", ok, cases);

    Ok(out)
}

/// Patching across a shared face: evaluating the three divdiv trace
/// quantities of one globally smooth field from either adjacent tet with
/// the global frames yields the same polynomials, and the combined trace
/// is odd under flipping the normal.
pub fn patching_suite(seed: u64, prec: u32) -> Result<Vec<CheckResult>> {
    let mesh = Mesh::builtin("two_tets")?;
    let ta = mesh.tet(0)?;
    let tb = mesh.tet(1)?;
    // the shared face is {1,2,3} in global ids
    let find_face = |t: &Tet| -> usize {
        (0..4)
            .find(|&f| {
                let s = t.face_verts_sorted(f);
                let g = [t.gids[s[0]], t.gids[s[1]], t.gids[s[2]]];
                g == [1, 2, 3]
            })
            .unwrap()
    };
    let (fa, fb) = (find_face(&ta), find_face(&tb));
    let mut gen = PolyGen::new(seed);
    let mut worst = 0f64;
    let mut parity = 0f64;
    for _ in 0..5 {
        let tau = gen.tensor(3, SpaceClass::Sym, 3);
        let tf = tracesgreen::to_float_mat(&tau, prec);
        let fra = ta.face_frame(fa, prec);
        let frb = tb.face_frame(fb, prec);
        let charta: Vec<_> = ta.face_chart(fa).iter().map(|c| c.to_float(prec)).collect();
        let chartb: Vec<_> = tb.face_chart(fb).iter().map(|c| c.to_float(prec)).collect();
        let t1a = tracesgreen::restrict(&tracesgreen::tr1_divdiv(&tf, &fra.n), &charta);
        let t1b = tracesgreen::restrict(&tracesgreen::tr1_divdiv(&tf, &frb.n), &chartb);
        worst = worst.max(tracesgreen::poly_rel_diff(&t1a, &t1b).to_f64());
        let t2a = tracesgreen::restrict(&tracesgreen::tr2_divdiv(&tf, &fra.n), &charta);
        let t2b = tracesgreen::restrict(&tracesgreen::tr2_divdiv(&tf, &frb.n), &chartb);
        worst = worst.max(tracesgreen::poly_rel_diff(&t2a, &t2b).to_f64());
        parity = parity.max(tracesgreen::tr2_parity_residual(&tau, &ta, fa, prec).to_f64());
        // shared-edge normal components from both sides
        for e in 0..6 {
            let (ia, ib) = ta.edge_verts(e);
            let ga = [ta.gids[ia], ta.gids[ib]];
            if !ga.iter().all(|v| [1usize, 2, 3].contains(v)) {
                continue;
            }
            let eb = (0..6)
                .find(|&e2| {
                    let (ja, jb) = tb.edge_verts(e2);
                    [tb.gids[ja], tb.gids[jb]] == ga
                })
                .unwrap();
            let fra = ta.edge_frame(e, prec);
            let frb = tb.edge_frame(eb, prec);
            let ca: Vec<_> = ta.edge_chart(e).iter().map(|c| c.to_float(prec)).collect();
            let cb: Vec<_> = tb.edge_chart(eb).iter().map(|c| c.to_float(prec)).collect();
            let pa = tracesgreen::restrict(&tracesgreen::edge_nn(&tf, &fra.n1, &fra.n2), &ca);
            let pb = tracesgreen::restrict(&tracesgreen::edge_nn(&tf, &frb.n1, &frb.n2), &cb);
            worst = worst.max(tracesgreen::poly_rel_diff(&pa, &pb).to_f64());
        }
    }
    let mut out = Vec::new();
    let mut r = CheckResult::new("trace/patching", "mesh=two_tets", worst < tol::SINGLE_VALUED_TOL);
    r.metric_f64("max_residual", worst);
    out.push(r);
    let mut r = CheckResult::new("trace/parity", "mesh=two_tets", parity < tol::SINGLE_VALUED_TOL);
    r.metric_f64("max_residual", parity);
    out.push(r);
    Ok(out)
}

/// Boundary-degree bookkeeping of the symmetric element: edge and face
/// traces of shape functions stay within the stated polynomial degrees.
pub fn boundary_degree_suite(l: u32, k: u32, seed: u64, prec: u32) -> Result<Vec<CheckResult>> {
    let tet = Tet::random(seed + 71);
    let h = femdofs::cell_scale(&tet.verts);
    let shape = femdofs::shape_basis(
        &ElementDef::new(ElementKind::DivDiv3d, l, k)?,
        &tet.barycenter(),
        &h,
    )?;
    let mut gen = PolyGen::new(seed);
    let mut ok = true;
    let mut worst_edge: i64 = -1;
    let mut worst_face: i64 = -1;
    for _ in 0..50 {
        // random combination of shape functions
        let mut tau = PolyMat::zeros(3, (), 3, 3);
        for e in &shape.elements {
            if gen.gen_range(0, 4) == 0 {
                tau = tau.add(&e.scale_coeff(&rat(gen.gen_range(-3, 4), 1)));
            }
        }
        let tf = tracesgreen::to_float_mat(&tau, prec);
        for e in 0..6 {
            let fr = tet.edge_frame(e, prec);
            let chart: Vec<_> = tet.edge_chart(e).iter().map(|c| c.to_float(prec)).collect();
            let s = tracesgreen::restrict(&tracesgreen::edge_nn(&tf, &fr.n1, &fr.n2), &chart);
            let d = trimmed_degree(&s);
            worst_edge = worst_edge.max(d);
            if d > l as i64 {
                ok = false;
            }
        }
        for f in 0..4 {
            let fr = tet.face_frame(f, prec);
            let chart: Vec<_> = tet.face_chart(f).iter().map(|c| c.to_float(prec)).collect();
            let s = tracesgreen::restrict(&tracesgreen::tr2_divdiv(&tf, &fr.n), &chart);
            let d = trimmed_degree(&s);
            worst_face = worst_face.max(d);
            if d > l as i64 - 1 {
                ok = false;
            }
        }
    }
    let mut r = CheckResult::new("trace/boundary-degrees", format!("l={l} k={k}"), ok);
    r.metric_int("max_edge_degree", worst_edge);
    r.metric_int("max_combined_degree", worst_face);
    Ok(vec![r])
}

/// Degree after dropping floating noise far below the coefficient scale.
fn trimmed_degree(p: &crate::polyring::PolyF) -> i64 {
    let scale = tracesgreen::poly_max_coeff(p);
    if scale.is_zero() {
        return -1;
    }
    let mut cutoff = scale;
    cutoff >>= 120;
    p.terms
        .iter()
        .filter(|(_, c)| {
            let a = (*c).clone().abs();
            a > cutoff
        })
        .map(|(m, _)| m.deg() as i64)
        .max()
        .unwrap_or(-1)
}

/// Consequences of zeroed DOFs for the symmetric element: with every
/// vertex, edge, face and volume moment zeroed (all but the
/// distinguished-face block), the divdiv vanishes and the field is
/// L2-orthogonal to the full symmetric space one degree down.
pub fn vanishing_dof_suite(l: u32, k: u32, seed: u64, prec: u32) -> Result<Vec<CheckResult>> {
    let tet = Tet::random(seed + 31);
    let def = ElementDef::new(ElementKind::DivDiv3d, l, k)?;
    let ctx = femdofs::TetCtx::new(&tet, prec, femdofs::moment_degree_pub(&def));
    let el = femdofs::local_element_tet(&def, &ctx)?;
    let m = femdofs::dof_matrix_tet(&el, &ctx);
    let keep: Vec<usize> = el
        .dofs
        .infos
        .iter()
        .enumerate()
        .filter(|(_, i)| i.tag != "face-f1-moment")
        .map(|(i, _)| i)
        .collect();
    let sub = crate::bigfloat::BigFloatMatrix::from_fn(prec, keep.len(), m.cols, |i, j| {
        m[(keep[i], j)].clone()
    });
    let rank = sub.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let null = sub.nullspace(rank);
    let expected = (l as i64) * (l as i64 - 1) / 2;
    let mut worst_dd = 0f64;
    let mut worst_orth = 0f64;
    let pl1 = polyspaces::full_space(3, SpaceClass::Sym, l as i64 - 1);
    for coeffs in &null {
        let mut tau = PolyMat::zeros(3, prec, 3, 3);
        for (c, phi) in coeffs.iter().zip(el.shape_f.iter()) {
            if !c.is_zero() {
                tau = tau.add(&phi.scale_coeff(c));
            }
        }
        let mut scale = crate::bigfloat::bf0(prec);
        for p in &tau.entries {
            let mm = tracesgreen::poly_max_coeff(p);
            if mm > scale {
                scale = mm;
            }
        }
        let sc = scale.to_f64().max(1e-30);
        let dd = diffops::div_div(&tau);
        worst_dd = worst_dd.max(tracesgreen::poly_max_coeff(&dd).to_f64() / sc);
        for e in &pl1.elements {
            let ef = tracesgreen::to_float_mat(e, prec);
            let mut acc = crate::bigfloat::bf0(prec);
            for i in 0..3 {
                for j in 0..3 {
                    if !ef.at(i, j).is_zero() && !tau.at(i, j).is_zero() {
                        let w = ctx.weighted_vector(ef.at(i, j), l.max(k));
                        acc += ctx.pair_with_weighted(tau.at(i, j), &w, l.max(k));
                    }
                }
            }
            worst_orth = worst_orth.max(acc.to_f64().abs() / sc);
        }
    }
    let pass = null.len() == expected as usize
        && worst_dd < tol::BUBBLE_TRACE_TOL
        && worst_orth < tol::BUBBLE_TRACE_TOL;
    let mut r = CheckResult::new("element/vanishing-dofs", format!("l={l} k={k}"), pass);
    r.metric_int("kernel_dim", null.len() as i64);
    r.metric_f64("divdiv_residual", worst_dd);
    r.metric_f64("orthogonality_residual", worst_orth);
    Ok(vec![r])
}
