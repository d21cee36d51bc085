//! Small conforming tetrahedral meshes, global finite element spaces via
//! single-valued DOF gluing, and certification of the discrete complex
//! at mesh level.
//!
//! Global DOFs are keyed by (entity, slot); local frames, charts and
//! weights come from global entity data, so matching is by key only and
//! no per-element sign flips exist.  The distinguished-face moments of
//! the symmetric element are interior (per-cell) DOFs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bigfloat::{bf0, bf_rat, BigF, BigFloatMatrix};
use crate::diffops::{dev_grad, div_div, sym_curl};
use crate::error::{Error, Result};
use crate::exactla::{rat_i, Rat};
use crate::femdofs::{
    cell_scale, dof_matrix_tet, local_element_tet, moment_degree_pub, ElementDef, ElementKind,
    EntityKey, LocalElement, PhiCache, TetCtx,
};
use crate::polyring::{monomial_basis, Poly, PolyF};
use crate::polyspaces::{self};
use crate::randgen::PolyGen;
use crate::simplexgeo::{Tet, TET_FACES};
use crate::tensorops::PolyMat;
use crate::tol;
use crate::tracesgreen::{
    restrict, to_float_mat, tr1_divdiv, tr1_perp_symcurl, tr2_divdiv, tr2_symcurl,
};

// ---------------------------------------------------------------------
// meshes
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Mesh {
    pub name: String,
    pub verts: Vec<Vec<Rat>>,
    pub cells: Vec<[usize; 4]>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<[usize; 3]>,
    /// Adjacent cells per face (1 = boundary, 2 = interior).
    pub face_cells: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(name: impl Into<String>, verts: Vec<Vec<Rat>>, cells: Vec<[usize; 4]>) -> Result<Mesh> {
        let name = name.into();
        for c in &cells {
            for &v in c {
                if v >= verts.len() {
                    return Err(Error::Mesh(format!("vertex index {v} out of range")));
                }
            }
        }
        // derive entities
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut faces: Vec<[usize; 3]> = Vec::new();
        for c in &cells {
            for [a, b] in crate::simplexgeo::TET_EDGES {
                let mut e = [c[a], c[b]];
                e.sort();
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
            for f in TET_FACES {
                let mut t = [c[f[0]], c[f[1]], c[f[2]]];
                t.sort();
                if !faces.contains(&t) {
                    faces.push(t);
                }
            }
        }
        edges.sort();
        faces.sort();
        let mut face_cells = vec![Vec::new(); faces.len()];
        for (ci, c) in cells.iter().enumerate() {
            for f in TET_FACES {
                let mut t = [c[f[0]], c[f[1]], c[f[2]]];
                t.sort();
                let fi = faces.binary_search(&t).unwrap();
                face_cells[fi].push(ci);
            }
        }
        if face_cells.iter().any(|fc| fc.len() > 2) {
            return Err(Error::Mesh("a face is shared by more than two cells".into()));
        }
        let mesh = Mesh {
            name,
            verts,
            cells,
            edges,
            faces,
            face_cells,
        };
        // every cell must be non-degenerate
        for c in 0..mesh.cells.len() {
            mesh.tet(c)?;
        }
        Ok(mesh)
    }

    /// Tetrahedron of cell `c`, carrying the global vertex indices.
    pub fn tet(&self, c: usize) -> Result<Tet> {
        let ids = self.cells[c];
        Tet::new(
            std::array::from_fn(|i| self.verts[ids[i]].clone()),
            ids,
        )
    }

    pub fn euler(&self) -> i64 {
        self.verts.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
            - self.cells.len() as i64
    }

    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (
            self.verts.len(),
            self.edges.len(),
            self.faces.len(),
            self.cells.len(),
        )
    }

    pub fn builtin(name: &str) -> Result<Mesh> {
        let p = |x: i64, y: i64, z: i64| vec![rat_i(x), rat_i(y), rat_i(z)];
        match name {
            "single_tet" => Mesh::new(
                name,
                vec![p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(0, 0, 1)],
                vec![[0, 1, 2, 3]],
            ),
            "two_tets" => Mesh::new(
                name,
                vec![p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(0, 0, 1), p(1, 1, 1)],
                vec![[0, 1, 2, 3], [1, 2, 3, 4]],
            ),
            "cube6" => {
                // unit cube, six tets around the main diagonal 0 -> 7
                let verts: Vec<Vec<Rat>> = (0..8)
                    .map(|i| p(i & 1, (i >> 1) & 1, (i >> 2) & 1))
                    .collect();
                let axes = [1usize, 2, 4];
                let mut cells = Vec::new();
                for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    let a = 0;
                    let b = a + axes[perm[0]];
                    let c = b + axes[perm[1]];
                    let d = 7;
                    cells.push([a, b, c, d]);
                }
                Mesh::new(name, verts, cells)
            }
            other => Err(Error::Mesh(format!("unknown builtin mesh '{other}'"))),
        }
    }

    /// Plain-text format: `nv nt`, then `nv` lines of three rationals
    /// (slash notation allowed), then `nt` lines of four 0-based indices.
    pub fn from_text(name: &str, src: &str) -> Result<Mesh> {
        let mut tokens = src.split_whitespace();
        let mut next = || -> Result<String> {
            tokens
                .next()
                .map(|s| s.to_string())
                .ok_or_else(|| Error::Mesh("unexpected end of mesh file".into()))
        };
        let nv: usize = next()?
            .parse()
            .map_err(|_| Error::Mesh("bad vertex count".into()))?;
        let nt: usize = next()?
            .parse()
            .map_err(|_| Error::Mesh("bad cell count".into()))?;
        let mut verts = Vec::with_capacity(nv);
        for _ in 0..nv {
            let mut v = Vec::with_capacity(3);
            for _ in 0..3 {
                v.push(parse_rat(&next()?)?);
            }
            verts.push(v);
        }
        let mut cells = Vec::with_capacity(nt);
        for _ in 0..nt {
            let mut c = [0usize; 4];
            for slot in &mut c {
                *slot = next()?
                    .parse()
                    .map_err(|_| Error::Mesh("bad vertex index".into()))?;
            }
            cells.push(c);
        }
        Mesh::new(name, verts, cells)
    }
}

fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<num_bigint::BigInt> {
        t.parse()
            .map_err(|_| Error::Mesh(format!("bad rational '{s}'")))
    };
    if let Some((n, d)) = s.split_once('/') {
        Ok(Rat::new(parse_int(n)?, parse_int(d)?))
    } else {
        Ok(Rat::from_integer(parse_int(s)?))
    }
}

// ---------------------------------------------------------------------
// global spaces
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpaceKind {
    Vh,
    SigmaT,
    SigmaS,
    Qh,
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Vh => "V_h",
            SpaceKind::SigmaT => "Sigma_h_T",
            SpaceKind::SigmaS => "Sigma_h_S",
            SpaceKind::Qh => "Q_h",
        }
    }

    pub fn parse(s: &str) -> Option<SpaceKind> {
        [SpaceKind::Vh, SpaceKind::SigmaT, SpaceKind::SigmaS, SpaceKind::Qh]
            .into_iter()
            .find(|k| k.name() == s)
    }

    fn element(&self, l: u32, k: u32) -> Result<Option<ElementDef>> {
        Ok(match self {
            SpaceKind::Vh => Some(ElementDef::new(ElementKind::Hermite3d, l, k)?),
            SpaceKind::SigmaT => Some(ElementDef::new(ElementKind::SymCurl3d, l, k)?),
            SpaceKind::SigmaS => Some(ElementDef::new(ElementKind::DivDiv3d, l, k)?),
            SpaceKind::Qh => None,
        })
    }
}

/// Closed-form global dimension from the per-entity DOF counts.
pub fn global_dim_formula(kind: SpaceKind, l: i64, k: i64, mesh: &Mesh) -> i64 {
    let (nv, ne, nf, nt) = mesh.counts();
    let (nv, ne, nf, nt) = (nv as i64, ne as i64, nf as i64, nt as i64);
    match kind {
        SpaceKind::Vh => 12 * nv + 3 * (l - 1) * ne + 3 * (l + 1) * l / 2 * nf + (l * l * l - l) / 2 * nt,
        SpaceKind::SigmaT => {
            14 * nv
                + (6 * l - 2) * ne
                + (2 * l * (l + 1) + (l - 1) * (l - 2) / 2 - 4) * nf
                + (4 * l * l * l + 6 * l * l - 10 * l) / 3 * nt
        }
        SpaceKind::SigmaS => {
            6 * nv
                + 3 * (l - 1) * ne
                + (l * l - l + 1) * nf
                + (l * (l - 1) / 2 + (l - 1) * l * (5 * l + 14) / 6 + (k * k * k - k) / 6 - 4) * nt
        }
        SpaceKind::Qh => (k * k * k - k) / 6 * nt,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum GKey {
    V(usize),
    E([usize; 2]),
    F([usize; 3]),
    I(usize),
}

fn gkey(cell: usize, e: &EntityKey) -> GKey {
    match e {
        EntityKey::Vertex(v) => GKey::V(*v),
        EntityKey::Edge(ab) => GKey::E(*ab),
        EntityKey::Face(f) => GKey::F(*f),
        EntityKey::Interior => GKey::I(cell),
    }
}

pub struct GlobalSpace {
    pub kind: SpaceKind,
    pub l: u32,
    pub k: u32,
    pub dim: usize,
    /// local DOF index -> global index, per cell.
    pub cell_maps: Vec<Vec<usize>>,
}

fn build_global_maps(
    mesh: &Mesh,
    per_cell_infos: &[Vec<(EntityKey, usize)>],
) -> (usize, Vec<Vec<usize>>) {
    // entity block sizes
    let mut block: BTreeMap<GKey, usize> = BTreeMap::new();
    for (c, infos) in per_cell_infos.iter().enumerate() {
        for (e, slot) in infos {
            let key = gkey(c, e);
            let entry = block.entry(key).or_insert(0);
            *entry = (*entry).max(slot + 1);
        }
    }
    let mut offsets: BTreeMap<GKey, usize> = BTreeMap::new();
    let mut dim = 0usize;
    for (key, len) in &block {
        offsets.insert(*key, dim);
        dim += len;
    }
    let _ = mesh;
    let cell_maps = per_cell_infos
        .iter()
        .enumerate()
        .map(|(c, infos)| {
            infos
                .iter()
                .map(|(e, slot)| offsets[&gkey(c, e)] + slot)
                .collect()
        })
        .collect();
    (dim, cell_maps)
}

/// Assemble a global space (dimension and local-to-global maps).
pub fn global_space(kind: SpaceKind, l: u32, k: u32, mesh: &Mesh, prec: u32) -> Result<GlobalSpace> {
    match kind {
        SpaceKind::Qh => {
            let per = monomial_basis(3, k.saturating_sub(2)).len();
            let n = mesh.cells.len();
            let mut cell_maps = Vec::with_capacity(n);
            for c in 0..n {
                cell_maps.push((c * per..(c + 1) * per).collect());
            }
            Ok(GlobalSpace {
                kind,
                l,
                k,
                dim: per * n,
                cell_maps,
            })
        }
        _ => {
            let def = kind.element(l, k)?.unwrap();
            let mut infos = Vec::new();
            for c in 0..mesh.cells.len() {
                let tet = mesh.tet(c)?;
                let ctx = TetCtx::new(&tet, prec, moment_degree_pub(&def));
                let ds = crate::femdofs::dof_set_tet(&def, &ctx)?;
                infos.push(
                    ds.infos
                        .iter()
                        .map(|i| (i.entity, i.slot))
                        .collect::<Vec<_>>(),
                );
            }
            let (dim, cell_maps) = build_global_maps(mesh, &infos);
            Ok(GlobalSpace {
                kind,
                l,
                k,
                dim,
                cell_maps,
            })
        }
    }
}

// ---------------------------------------------------------------------
// global complex verification
// ---------------------------------------------------------------------

struct CellData {
    tet: Tet,
    ctx: TetCtx,
    v_el: LocalElement,
    t_el: LocalElement,
    s_el: LocalElement,
    v_inv: BigFloatMatrix,
    t_inv: BigFloatMatrix,
    s_inv: BigFloatMatrix,
}

fn build_cell(mesh: &Mesh, c: usize, l: u32, k: u32, prec: u32) -> Result<CellData> {
    let tet = mesh.tet(c)?;
    let v_def = ElementDef::new(ElementKind::Hermite3d, l, k)?;
    let t_def = ElementDef::new(ElementKind::SymCurl3d, l, k)?;
    let s_def = ElementDef::new(ElementKind::DivDiv3d, l, k)?;
    let maxdeg = moment_degree_pub(&s_def)
        .max(moment_degree_pub(&t_def))
        .max(moment_degree_pub(&v_def));
    let ctx = TetCtx::new(&tet, prec, maxdeg);
    let v_el = local_element_tet(&v_def, &ctx)?;
    let t_el = local_element_tet(&t_def, &ctx)?;
    let s_el = local_element_tet(&s_def, &ctx)?;
    let v_m = dof_matrix_tet(&v_el, &ctx);
    let t_m = dof_matrix_tet(&t_el, &ctx);
    let s_m = dof_matrix_tet(&s_el, &ctx);
    let eye = |n: usize| BigFloatMatrix::identity(prec, n);
    let v_inv = v_m.solve_mat(&eye(v_el.dof_count()))?;
    let t_inv = t_m.solve_mat(&eye(t_el.dof_count()))?;
    let s_inv = s_m.solve_mat(&eye(s_el.dof_count()))?;
    Ok(CellData {
        tet,
        ctx,
        v_el,
        t_el,
        s_el,
        v_inv,
        t_inv,
        s_inv,
    })
}

/// Evaluate the DOFs of a local element on a list of tensors.
fn eval_dofs_on(
    el: &LocalElement,
    ctx: &TetCtx,
    images: &[PolyMat<BigF>],
) -> BigFloatMatrix {
    let n = el.dof_count();
    let cols: Vec<Vec<BigF>> = images
        .par_iter()
        .map(|phi| {
            let mut cache = PhiCache::new(phi);
            let mut col = Vec::with_capacity(n);
            for g in &el.dofs.groups {
                crate::femdofs::evaluate_group(ctx, g, &mut cache, &mut col);
            }
            col
        })
        .collect();
    let mut m = BigFloatMatrix::zeros(ctx.prec, n, images.len());
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = col[i].clone();
        }
    }
    m
}

fn scatter(
    global: &mut BigFloatMatrix,
    local: &BigFloatMatrix,
    row_map: &[usize],
    col_map: &[usize],
    row_owner: &[bool],
) {
    for (i, &gi) in row_map.iter().enumerate() {
        if !row_owner[i] {
            continue;
        }
        for (j, &gj) in col_map.iter().enumerate() {
            global[(gi, gj)] = local[(i, j)].clone();
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct GlobalComplexReport {
    pub mesh: String,
    pub l: u32,
    pub k: u32,
    pub counts: (usize, usize, usize, usize),
    pub euler: i64,
    pub dims: Vec<usize>,
    pub dims_formula_ok: bool,
    pub alternating_sum: i64,
    pub rank_devgrad: usize,
    pub rank_divdiv: usize,
    pub rt_kernel_residual: f64,
    pub inclusion_residual: f64,
    pub single_valued_residual: f64,
    pub composition_residual: f64,
    pub surjectivity_residual: f64,
    /// Exactness ranks are only demanded on contractible meshes.
    pub exactness_expected: bool,
    pub pass: bool,
}

/// Certify the discrete chain `RT -> V_h -> Sigma_h^T -> Sigma_h^S -> Q_h -> 0`
/// on a conforming mesh at working precision.
pub fn verify_global_complex(mesh: &Mesh, l: u32, k: u32, prec: u32) -> Result<GlobalComplexReport> {
    let nc = mesh.cells.len();
    let cells: Vec<CellData> = (0..nc)
        .map(|c| build_cell(mesh, c, l, k, prec))
        .collect::<Result<_>>()?;

    // global spaces and maps
    let gv = global_space(SpaceKind::Vh, l, k, mesh, prec)?;
    let gt = global_space(SpaceKind::SigmaT, l, k, mesh, prec)?;
    let gs = global_space(SpaceKind::SigmaS, l, k, mesh, prec)?;
    let gq = global_space(SpaceKind::Qh, l, k, mesh, prec)?;
    let dims = vec![gv.dim, gt.dim, gs.dim, gq.dim];
    let dims_formula_ok = [SpaceKind::Vh, SpaceKind::SigmaT, SpaceKind::SigmaS, SpaceKind::Qh]
        .iter()
        .zip(&dims)
        .all(|(kind, &d)| global_dim_formula(*kind, l as i64, k as i64, mesh) == d as i64);
    let alternating_sum = gv.dim as i64 - gt.dim as i64 + gs.dim as i64 - gq.dim as i64;

    // row ownership: lowest adjacent cell wins
    let owner_rows = |g: &GlobalSpace| -> Vec<Vec<bool>> {
        let mut seen = vec![false; g.dim];
        let mut owners = Vec::with_capacity(nc);
        for map in &g.cell_maps {
            let own: Vec<bool> = map
                .iter()
                .map(|&gi| {
                    if seen[gi] {
                        false
                    } else {
                        seen[gi] = true;
                        true
                    }
                })
                .collect();
            owners.push(own);
        }
        owners
    };
    let own_t = owner_rows(&gt);
    let own_s = owner_rows(&gs);

    // operator matrices in global DOF coordinates, plus the inclusion
    // residual: rows seen from a non-owner cell must agree with the owner
    let mut d1 = BigFloatMatrix::zeros(prec, gt.dim, gv.dim);
    let mut d2 = BigFloatMatrix::zeros(prec, gs.dim, gt.dim);
    let mut d3 = BigFloatMatrix::zeros(prec, gq.dim, gs.dim);
    let mut inclusion_residual: f64 = 0.0;
    for (c, cd) in cells.iter().enumerate() {
        // dev grad of the Hermite shape functions, in sym-curl DOFs
        let dev_images: Vec<PolyMat<BigF>> = cd
            .v_el
            .shape_f
            .par_iter()
            .map(|phi| dev_grad(&phi.col_vec(0)))
            .collect();
        let m_td = eval_dofs_on(&cd.t_el, &cd.ctx, &dev_images);
        let local_d1 = m_td.matmul(&cd.v_inv);
        // sym curl of the trace-free shape functions, in divdiv DOFs
        let sc_images: Vec<PolyMat<BigF>> =
            cd.t_el.shape_f.par_iter().map(sym_curl).collect();
        let m_st = eval_dofs_on(&cd.s_el, &cd.ctx, &sc_images);
        let local_d2 = m_st.matmul(&cd.t_inv);
        // div div of the symmetric shape functions, as Q_h coefficients
        let h = cell_scale(&cd.tet.verts);
        let bary = cd.tet.barycenter();
        let qmonos = monomial_basis(3, k.saturating_sub(2));
        let mut m_qs = BigFloatMatrix::zeros(prec, qmonos.len(), cd.s_el.shape_f.len());
        for (j, phi) in cd.s_el.shape_f.iter().enumerate() {
            let dd = div_div(phi);
            // express in the scaled local monomial basis: substitute x = o + h z
            let hf = bf_rat(prec, &h);
            let chart: Vec<PolyF> = (0..3)
                .map(|i| {
                    let mut p = Poly::constant(3, bf_rat(prec, &bary[i]));
                    p = p.add(&Poly::var(3, prec, i).scale(&hf));
                    p
                })
                .collect();
            let local = dd.subst(&chart);
            for (idx, coeff) in &local.terms {
                let pos = qmonos.binary_search(idx).expect("degree k-2");
                m_qs[(pos, j)] = coeff.clone();
            }
        }
        let local_d3 = m_qs.matmul(&cd.s_inv);

        // scale for residual reporting
        let scale = local_d1
            .max_abs()
            .to_f64()
            .max(local_d2.max_abs().to_f64())
            .max(1.0);
        // non-owner rows must reproduce the owner's values
        for (i, &gi) in gt.cell_maps[c].iter().enumerate() {
            if !own_t[c][i] {
                for (j, &gj) in gv.cell_maps[c].iter().enumerate() {
                    let mut dlt = d1[(gi, gj)].clone();
                    dlt -= &local_d1[(i, j)];
                    inclusion_residual =
                        inclusion_residual.max(dlt.to_f64().abs() / scale);
                }
            }
        }
        for (i, &gi) in gs.cell_maps[c].iter().enumerate() {
            if !own_s[c][i] {
                for (j, &gj) in gt.cell_maps[c].iter().enumerate() {
                    let mut dlt = d2[(gi, gj)].clone();
                    dlt -= &local_d2[(i, j)];
                    inclusion_residual =
                        inclusion_residual.max(dlt.to_f64().abs() / scale);
                }
            }
        }
        scatter(&mut d1, &local_d1, &gt.cell_maps[c], &gv.cell_maps[c], &own_t[c]);
        scatter(&mut d2, &local_d2, &gs.cell_maps[c], &gt.cell_maps[c], &own_s[c]);
        let all = vec![true; gq.cell_maps[c].len()];
        scatter(&mut d3, &local_d3, &gq.cell_maps[c], &gs.cell_maps[c], &all);
    }

    // ranks
    let rank_devgrad = d1.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;
    let rank_divdiv = d3.rank_gap(tol::RANK_EPS, tol::RANK_GAP)?;

    // RT lies in the kernel of dev grad: assemble its global coefficients
    let mut rt_kernel_residual: f64 = 0.0;
    {
        let rt = polyspaces::rt_space(3);
        for field in &rt.elements {
            let mut coeffs = vec![bf0(prec); gv.dim];
            for (c, cd) in cells.iter().enumerate() {
                let f = to_float_mat(field, prec);
                let vals = eval_dofs_on(&cd.v_el, &cd.ctx, std::slice::from_ref(&f));
                for (i, &gi) in gv.cell_maps[c].iter().enumerate() {
                    coeffs[gi] = vals[(i, 0)].clone();
                }
            }
            let img = d1.mul_vec(&coeffs);
            let scale = d1.max_abs().to_f64().max(1.0);
            for v in img {
                rt_kernel_residual = rt_kernel_residual.max(v.to_f64().abs() / scale);
            }
        }
    }

    // compositions vanish
    let comp21 = d2.matmul(&d1);
    let comp32 = d3.matmul(&d2);
    let comp_scale = d1
        .max_abs()
        .to_f64()
        .max(d2.max_abs().to_f64())
        .max(d3.max_abs().to_f64())
        .max(1.0);
    let composition_residual =
        (comp21.max_abs().to_f64() / comp_scale).max(comp32.max_abs().to_f64() / comp_scale);

    // divdiv surjectivity: minimal-norm preimages of random q_h
    let mut surjectivity_residual: f64 = 0.0;
    {
        let ddt = d3.matmul(&d3.transpose());
        let mut gen = PolyGen::new(902);
        let mut rhs = BigFloatMatrix::zeros(prec, gq.dim, 20);
        for j in 0..20 {
            for i in 0..gq.dim {
                rhs[(i, j)] = bf_rat(prec, &crate::exactla::rat(gen.gen_range(-9, 10), 4));
            }
        }
        let y = ddt.solve_mat(&rhs)?;
        let x = d3.transpose().matmul(&y);
        let back = d3.matmul(&x);
        for j in 0..20 {
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for i in 0..gq.dim {
                let mut dlt = back[(i, j)].clone();
                dlt -= &rhs[(i, j)];
                num = num.max(dlt.to_f64().abs());
                den = den.max(rhs[(i, j)].to_f64().abs());
            }
            surjectivity_residual = surjectivity_residual.max(num / den.max(1e-30));
        }
    }

    // trace single-valuedness of random global fields across interior faces
    let single_valued_residual = single_valued_traces(mesh, &cells, &gv, &gt, &gs, prec)?;

    let exactness_expected = mesh.euler() == 1;
    let exactness_counts = !exactness_expected
        || (rank_devgrad == gv.dim - 4 && rank_divdiv == gq.dim && alternating_sum == 4);
    let pass = dims_formula_ok
        && exactness_counts
        && rt_kernel_residual < tol::GREEN_TOL
        && inclusion_residual < tol::SINGLE_VALUED_TOL
        && single_valued_residual < tol::SINGLE_VALUED_TOL
        && composition_residual < tol::SINGLE_VALUED_TOL
        && (!exactness_expected || surjectivity_residual < tol::SURJECTIVITY_TOL);
    Ok(GlobalComplexReport {
        mesh: mesh.name.clone(),
        l,
        k,
        counts: mesh.counts(),
        euler: mesh.euler(),
        dims,
        dims_formula_ok,
        alternating_sum,
        rank_devgrad,
        rank_divdiv,
        rt_kernel_residual,
        inclusion_residual,
        single_valued_residual,
        composition_residual,
        surjectivity_residual,
        exactness_expected,
        pass,
    })
}

/// Reconstruct the per-cell polynomial of a global coefficient vector.
fn field_on_cell(
    cd: &CellData,
    which: SpaceKind,
    map: &[usize],
    coeffs: &[BigF],
) -> PolyMat<BigF> {
    let (el, inv) = match which {
        SpaceKind::Vh => (&cd.v_el, &cd.v_inv),
        SpaceKind::SigmaT => (&cd.t_el, &cd.t_inv),
        SpaceKind::SigmaS => (&cd.s_el, &cd.s_inv),
        SpaceKind::Qh => unreachable!(),
    };
    let local: Vec<BigF> = map.iter().map(|&g| coeffs[g].clone()).collect();
    let weights = inv.mul_vec(&local);
    let (r, c) = (el.shape_f[0].rows, el.shape_f[0].cols);
    let mut acc = PolyMat::zeros(3, cd.ctx.prec, r, c);
    for (w, phi) in weights.iter().zip(el.shape_f.iter()) {
        if !w.is_zero() {
            acc = acc.add(&phi.scale_coeff(w));
        }
    }
    acc
}

fn single_valued_traces(
    mesh: &Mesh,
    cells: &[CellData],
    gv: &GlobalSpace,
    gt: &GlobalSpace,
    gs: &GlobalSpace,
    prec: u32,
) -> Result<f64> {
    let mut gen = PolyGen::new(417);
    let mut worst: f64 = 0.0;
    let rand_coeffs = |g: &GlobalSpace, gen: &mut PolyGen| -> Vec<BigF> {
        (0..g.dim)
            .map(|_| bf_rat(prec, &crate::exactla::rat(gen.gen_range(-9, 10), 8)))
            .collect()
    };
    let vs = rand_coeffs(gv, &mut gen);
    let ts = rand_coeffs(gt, &mut gen);
    let ss = rand_coeffs(gs, &mut gen);
    for (fi, fc) in mesh.face_cells.iter().enumerate() {
        if fc.len() != 2 {
            continue;
        }
        let (ca, cb) = (fc[0], fc[1]);
        let gface = mesh.faces[fi];
        let local_face = |c: usize| -> usize {
            (0..4)
                .find(|&f| {
                    let t = cells[c].tet.face_verts_sorted(f);
                    let g = [
                        cells[c].tet.gids[t[0]],
                        cells[c].tet.gids[t[1]],
                        cells[c].tet.gids[t[2]],
                    ];
                    g == gface
                })
                .expect("shared face present in both cells")
        };
        let (fa, fb) = (local_face(ca), local_face(cb));
        let mut cmp = |pa: &PolyF, pb: &PolyF| {
            let d = crate::tracesgreen::poly_rel_diff(pa, pb).to_f64();
            if d > worst {
                worst = d;
            }
        };
        // V_h: the function itself is continuous
        let va = field_on_cell(&cells[ca], SpaceKind::Vh, &gv.cell_maps[ca], &vs);
        let vb = field_on_cell(&cells[cb], SpaceKind::Vh, &gv.cell_maps[cb], &vs);
        let charta = &cells[ca].ctx.faces[fa].chart;
        let chartb = &cells[cb].ctx.faces[fb].chart;
        for comp in 0..3 {
            cmp(
                &restrict(va.at(comp, 0), charta),
                &restrict(vb.at(comp, 0), chartb),
            );
        }
        // Sigma_h^T: the two sym-curl traces are single-valued
        let ta = field_on_cell(&cells[ca], SpaceKind::SigmaT, &gt.cell_maps[ca], &ts);
        let tb = field_on_cell(&cells[cb], SpaceKind::SigmaT, &gt.cell_maps[cb], &ts);
        let na = &cells[ca].ctx.faces[fa].frame.n;
        let nb = &cells[cb].ctx.faces[fb].frame.n;
        let t1a = tr1_perp_symcurl(&ta, na);
        let t1b = tr1_perp_symcurl(&tb, nb);
        for i in 0..3 {
            for j in 0..3 {
                cmp(&restrict(t1a.at(i, j), charta), &restrict(t1b.at(i, j), chartb));
            }
        }
        for (pa, pb) in tr2_symcurl(&ta, na).iter().zip(tr2_symcurl(&tb, nb).iter()) {
            cmp(&restrict(pa, charta), &restrict(pb, chartb));
        }
        // Sigma_h^S: normal-normal and combined traces are single-valued
        let sa = field_on_cell(&cells[ca], SpaceKind::SigmaS, &gs.cell_maps[ca], &ss);
        let sb = field_on_cell(&cells[cb], SpaceKind::SigmaS, &gs.cell_maps[cb], &ss);
        cmp(
            &restrict(&tr1_divdiv(&sa, na), charta),
            &restrict(&tr1_divdiv(&sb, nb), chartb),
        );
        cmp(
            &restrict(&tr2_divdiv(&sa, na), charta),
            &restrict(&tr2_divdiv(&sb, nb), chartb),
        );
        // edge normal-normal components across the edges of the face
        for e in 0..6 {
            let gedge = cells[ca].ctx.edges[e].gids;
            if !gedge.iter().all(|v| gface.contains(v)) {
                continue;
            }
            let eb = (0..6)
                .find(|&e2| cells[cb].ctx.edges[e2].gids == gedge)
                .expect("edge shared");
            let fra = &cells[ca].ctx.edges[e].frame;
            let frb = &cells[cb].ctx.edges[eb].frame;
            for (u, v) in [(0, 0), (0, 1), (1, 1)] {
                let pick = |fr: &crate::simplexgeo::EdgeFrame, w: usize| {
                    if w == 0 {
                        fr.n1.clone()
                    } else {
                        fr.n2.clone()
                    }
                };
                let pa = crate::tracesgreen::edge_nn(&sa, &pick(fra, u), &pick(fra, v));
                let pb = crate::tracesgreen::edge_nn(&sb, &pick(frb, u), &pick(frb, v));
                cmp(
                    &restrict(&pa, &cells[ca].ctx.edges[e].chart),
                    &restrict(&pb, &cells[cb].ctx.edges[eb].chart),
                );
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_PREC;

    #[test]
    fn builtin_meshes_entity_counts() {
        let m = Mesh::builtin("single_tet").unwrap();
        assert_eq!(m.counts(), (4, 6, 4, 1));
        assert_eq!(m.euler(), 1);
        let m = Mesh::builtin("two_tets").unwrap();
        assert_eq!(m.counts(), (5, 9, 7, 2));
        assert_eq!(m.euler(), 1);
        let m = Mesh::builtin("cube6").unwrap();
        assert_eq!(m.counts().3, 6);
        assert_eq!(m.euler(), 1);
    }

    #[test]
    fn mesh_text_roundtrip() {
        let src = "4 1\n0 0 0\n1 0 0\n0 1 0\n0 0 1/1\n0 1 2 3\n";
        let m = Mesh::from_text("t", src).unwrap();
        assert_eq!(m.counts(), (4, 6, 4, 1));
        assert!(Mesh::from_text("t", "4 1\n0 0").is_err());
    }

    #[test]
    fn global_dims_on_two_tets() {
        let p = DEFAULT_PREC;
        let mesh = Mesh::builtin("two_tets").unwrap();
        let gv = global_space(SpaceKind::Vh, 3, 3, &mesh, p).unwrap();
        let gt = global_space(SpaceKind::SigmaT, 3, 3, &mesh, p).unwrap();
        let gs = global_space(SpaceKind::SigmaS, 3, 3, &mesh, p).unwrap();
        let gq = global_space(SpaceKind::Qh, 3, 3, &mesh, p).unwrap();
        assert_eq!(gv.dim, 264);
        assert_eq!(gt.dim, 449);
        assert_eq!(gs.dim, 197);
        assert_eq!(gq.dim, 8);
        for (kind, d) in [
            (SpaceKind::Vh, gv.dim),
            (SpaceKind::SigmaT, gt.dim),
            (SpaceKind::SigmaS, gs.dim),
            (SpaceKind::Qh, gq.dim),
        ] {
            assert_eq!(global_dim_formula(kind, 3, 3, &mesh), d as i64);
        }
    }

    #[test]
    fn single_tet_global_complex() {
        let rep = verify_global_complex(&Mesh::builtin("single_tet").unwrap(), 3, 3, DEFAULT_PREC)
            .unwrap();
        assert_eq!(rep.dims, vec![168, 280, 120, 4]);
        assert!(rep.pass, "{rep:?}");
    }
}
