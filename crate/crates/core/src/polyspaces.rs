//! Bases of the named polynomial tensor spaces and verification of the
//! direct-sum decompositions.
//!
//! Every space stores honest, exactly independent elements; generated
//! spaces (sym-curl images, Koszul images, ...) are pruned to an
//! independent subset by deterministic column-pivot elimination.
//! Linearization maps a tensor to its coordinates over `class components
//! x graded-lex monomials`, which is also the coordinate frame for all
//! operator matrices.

use num_traits::Zero;

use crate::diffops;
use crate::error::{Error, Result};
use crate::exactla::{rat_i, ExactMatrix, Rat};
use crate::polyring::{monomial_basis, Coeff, MultiIndex, Poly, PolyR};
use crate::tensorops::{PolyMat, PolyMatR};

/// Component structure used for linearization.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpaceClass {
    Scalar,
    Vector,
    GenMat,
    Sym,
    Skw,
    Dev,
}

impl SpaceClass {
    pub fn comp_count(&self, dim: usize) -> usize {
        match self {
            SpaceClass::Scalar => 1,
            SpaceClass::Vector => dim,
            SpaceClass::GenMat => dim * dim,
            SpaceClass::Sym => dim * (dim + 1) / 2,
            SpaceClass::Skw => dim * (dim - 1) / 2,
            SpaceClass::Dev => dim * dim - 1,
        }
    }

    pub fn shape(&self, dim: usize) -> (usize, usize) {
        match self {
            SpaceClass::Scalar => (1, 1),
            SpaceClass::Vector => (dim, 1),
            _ => (dim, dim),
        }
    }

    /// Positions read off by `extract`, in order.
    fn comp_positions(&self, dim: usize) -> Vec<(usize, usize)> {
        match (self, dim) {
            (SpaceClass::Scalar, _) => vec![(0, 0)],
            (SpaceClass::Vector, d) => (0..d).map(|i| (i, 0)).collect(),
            (SpaceClass::GenMat, d) => {
                let mut v = Vec::new();
                for i in 0..d {
                    for j in 0..d {
                        v.push((i, j));
                    }
                }
                v
            }
            (SpaceClass::Sym, 3) => vec![(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
            (SpaceClass::Sym, 2) => vec![(0, 0), (1, 1), (0, 1)],
            (SpaceClass::Skw, 3) => vec![(2, 1), (0, 2), (1, 0)],
            (SpaceClass::Skw, 2) => vec![(1, 0)],
            (SpaceClass::Dev, 3) => vec![
                (0, 0),
                (1, 1),
                (0, 1),
                (0, 2),
                (1, 0),
                (1, 2),
                (2, 0),
                (2, 1),
            ],
            (SpaceClass::Dev, 2) => vec![(0, 0), (0, 1), (1, 0)],
            _ => panic!("unsupported class/dim"),
        }
    }

    pub fn extract<C: Coeff>(&self, m: &PolyMat<C>, dim: usize) -> Result<Vec<Poly<C>>> {
        let (r, c) = self.shape(dim);
        if (m.rows, m.cols) != (r, c) {
            return Err(Error::ShapeMismatch(format!(
                "expected {r}x{c}, got {}x{}",
                m.rows, m.cols
            )));
        }
        let comps: Vec<Poly<C>> = self
            .comp_positions(dim)
            .into_iter()
            .map(|(i, j)| m.at(i, j).clone())
            .collect();
        // reconstruct and compare: catches symmetry/trace/skw violations
        let back = self.reconstruct(dim, m.arity, m.ctx, &comps);
        if &back != m {
            return Err(Error::ClassMismatch(format!(
                "tensor does not satisfy class {self:?}"
            )));
        }
        Ok(comps)
    }

    pub fn reconstruct<C: Coeff>(
        &self,
        dim: usize,
        arity: usize,
        ctx: C::Ctx,
        comps: &[Poly<C>],
    ) -> PolyMat<C> {
        let (r, c) = self.shape(dim);
        let mut m = PolyMat::zeros(arity, ctx, r, c);
        match (self, dim) {
            (SpaceClass::Scalar, _) | (SpaceClass::Vector, _) | (SpaceClass::GenMat, _) => {
                for ((i, j), p) in self.comp_positions(dim).into_iter().zip(comps) {
                    m.set(i, j, p.clone());
                }
            }
            (SpaceClass::Sym, _) => {
                for ((i, j), p) in self.comp_positions(dim).into_iter().zip(comps) {
                    m.set(i, j, p.clone());
                    if i != j {
                        m.set(j, i, p.clone());
                    }
                }
            }
            (SpaceClass::Skw, _) => {
                for ((i, j), p) in self.comp_positions(dim).into_iter().zip(comps) {
                    m.set(i, j, p.clone());
                    m.set(j, i, p.neg());
                }
            }
            (SpaceClass::Dev, 3) => {
                for ((i, j), p) in self.comp_positions(dim).into_iter().zip(comps) {
                    m.set(i, j, p.clone());
                }
                let last = comps[0].add(&comps[1]).neg();
                m.set(2, 2, last);
            }
            (SpaceClass::Dev, 2) => {
                for ((i, j), p) in self.comp_positions(dim).into_iter().zip(comps) {
                    m.set(i, j, p.clone());
                }
                m.set(1, 1, comps[0].neg());
            }
            _ => panic!("unsupported class/dim"),
        }
        m.class = m.classify();
        m
    }
}

/// Ordered basis of a polynomial tensor space.
#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub name: String,
    pub arity: usize,
    /// Vector/matrix dimension of the values (2 or 3; equals arity here).
    pub dim: usize,
    pub class: SpaceClass,
    /// Ambient polynomial degree bound.
    pub degree: u32,
    pub monomials: Vec<MultiIndex>,
    pub elements: Vec<PolyMatR>,
    /// True iff `elements` is exactly the canonical component x monomial basis.
    pub is_full: bool,
    pub origin: Option<Vec<Rat>>,
}

impl SpaceBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.class.comp_count(self.dim) * self.monomials.len()
    }

    /// Coordinates of a tensor in the ambient component x monomial frame.
    pub fn linearize(&self, m: &PolyMatR) -> Result<Vec<Rat>> {
        let comps = self.class.extract(m, self.dim)?;
        let n = self.monomials.len();
        let mut out = vec![Rat::zero(); self.ambient_dim()];
        for (c, poly) in comps.iter().enumerate() {
            for (idx, coeff) in &poly.terms {
                match self.monomials.binary_search(idx) {
                    Ok(pos) => out[c * n + pos] = coeff.clone(),
                    Err(_) => {
                        return Err(Error::ClassMismatch(format!(
                            "monomial of degree {} outside space of degree {}",
                            idx.deg(),
                            self.degree
                        )))
                    }
                }
            }
        }
        Ok(out)
    }

    /// Columns are the linearized basis elements.
    pub fn coefficient_matrix(&self) -> ExactMatrix {
        let cols: Vec<Vec<Rat>> = self
            .elements
            .iter()
            .map(|e| self.linearize(e).expect("own element must linearize"))
            .collect();
        ExactMatrix::from_columns(&cols)
    }

    /// Rank of the coefficient matrix equals the element count.
    pub fn verify_independent(&self) -> bool {
        if self.is_full {
            return true;
        }
        self.coefficient_matrix().rank() == self.len()
    }

    /// Express arbitrary tensors in this basis (columns of the result).
    pub fn expand_in_basis(&self, tensors: &[PolyMatR]) -> Result<ExactMatrix> {
        let cols: Vec<Vec<Rat>> = tensors
            .iter()
            .map(|t| self.linearize(t))
            .collect::<Result<_>>()?;
        let targets = ExactMatrix::from_columns(&cols);
        if self.is_full {
            Ok(targets)
        } else {
            self.coefficient_matrix().solve_batch(&targets)
        }
    }
}

// ---------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------

fn class_label(class: SpaceClass, dim: usize) -> &'static str {
    match (class, dim) {
        (SpaceClass::Scalar, _) => "",
        (SpaceClass::Vector, 3) => ";R3",
        (SpaceClass::Vector, _) => ";R2",
        (SpaceClass::GenMat, _) => ";M",
        (SpaceClass::Sym, _) => ";S",
        (SpaceClass::Skw, _) => ";K",
        (SpaceClass::Dev, _) => ";T",
    }
}

/// Full polynomial space `P_deg` of the given class (empty for deg < 0).
pub fn full_space(arity: usize, class: SpaceClass, deg: i64) -> SpaceBasis {
    let dim = arity;
    if deg < 0 {
        return SpaceBasis {
            name: "0".into(),
            arity,
            dim,
            class,
            degree: 0,
            monomials: Vec::new(),
            elements: Vec::new(),
            is_full: true,
            origin: None,
        };
    }
    let deg = deg as u32;
    let monomials = monomial_basis(arity, deg);
    let comp = class.comp_count(dim);
    let mut elements = Vec::with_capacity(comp * monomials.len());
    for c in 0..comp {
        let mut comps = vec![PolyR::zero(arity, ()); comp];
        comps[c] = PolyR::constant(arity, rat_i(1));
        let cmat = class.reconstruct(dim, arity, (), &comps);
        for m in &monomials {
            let mono = PolyR::monomial(arity, *m, rat_i(1));
            elements.push(cmat.scale_poly(&mono));
        }
    }
    SpaceBasis {
        name: format!("P_{deg}{}", class_label(class, dim)),
        arity,
        dim,
        class,
        degree: deg,
        monomials,
        elements,
        is_full: true,
        origin: None,
    }
}

/// Build a space from generating images, keeping a deterministic
/// independent subset when asked.
pub fn from_images(
    name: impl Into<String>,
    arity: usize,
    class: SpaceClass,
    degree: u32,
    images: Vec<PolyMatR>,
    prune: bool,
    origin: Option<Vec<Rat>>,
) -> SpaceBasis {
    let mut sb = SpaceBasis {
        name: name.into(),
        arity,
        dim: arity,
        class,
        degree,
        monomials: monomial_basis(arity, degree),
        elements: images,
        is_full: false,
        origin,
    };
    if prune {
        let cols = sb.coefficient_matrix();
        let keep = cols.independent_columns();
        sb.elements = keep.into_iter().map(|i| sb.elements[i].clone()).collect();
    }
    sb
}

/// The lowest-order Raviart-Thomas shape space `{a x + b}`.
pub fn rt_space(arity: usize) -> SpaceBasis {
    let dim = arity;
    let mut elements = Vec::new();
    for i in 0..dim {
        let mut comps = vec![PolyR::zero(arity, ()); dim];
        comps[i] = PolyR::constant(arity, rat_i(1));
        elements.push(SpaceClass::Vector.reconstruct(dim, arity, (), &comps));
    }
    let xvec: Vec<PolyR> = (0..dim).map(|i| PolyR::var(arity, (), i)).collect();
    elements.push(PolyMat::from_vec(xvec));
    SpaceBasis {
        name: if arity == 3 { "RT".into() } else { "RT(2d)".into() },
        arity,
        dim,
        class: SpaceClass::Vector,
        degree: 1,
        monomials: monomial_basis(arity, 1),
        elements,
        is_full: false,
        origin: None,
    }
}

/// Scalar homogeneous polynomials of exact degree `k`.
pub fn homogeneous_space(arity: usize, k: u32) -> SpaceBasis {
    let monos = crate::polyring::homogeneous_monomials(arity, k);
    let elements = monos
        .iter()
        .map(|m| PolyMat::scalar(PolyR::monomial(arity, *m, rat_i(1))))
        .collect();
    SpaceBasis {
        name: format!("H_{k}"),
        arity,
        dim: arity,
        class: SpaceClass::Scalar,
        degree: k,
        monomials: monomial_basis(arity, k),
        elements,
        is_full: false,
        origin: None,
    }
}

fn origin_zero(arity: usize) -> Vec<Rat> {
    vec![Rat::zero(); arity]
}

/// `C_k(S) = sym curl P_{k+1}(T)` in 3D.
pub fn c_sym3(k: u32) -> SpaceBasis {
    let dom = full_space(3, SpaceClass::Dev, k as i64 + 1);
    let images = dom
        .elements
        .iter()
        .map(diffops::sym_curl)
        .collect();
    from_images(format!("C_{k}(S)"), 3, SpaceClass::Sym, k, images, true, None)
}

/// `C_k_plus(S) = xx^T P_{k-2}` about `origin`.
pub fn c_plus3(k: u32, origin: Option<Vec<Rat>>) -> SpaceBasis {
    let o = origin.clone().unwrap_or_else(|| origin_zero(3));
    let op = diffops::Op::XxT(o.clone());
    let dom = full_space(3, SpaceClass::Scalar, k as i64 - 2);
    let images = dom
        .elements
        .iter()
        .map(|e| op.apply(e).expect("xxT applies to scalars"))
        .collect();
    from_images(
        format!("C_{k}+(S)"),
        3,
        SpaceClass::Sym,
        k,
        images,
        false,
        Some(o),
    )
}

/// 2D `C_l(S) = sym curl_F P_{l+1}(R2)`.
pub fn c_sym2(l: u32) -> SpaceBasis {
    let dom = full_space(2, SpaceClass::Vector, l as i64 + 1);
    let images = dom
        .elements
        .iter()
        .map(|e| diffops::sym_curl_f(&e.col_vec(0)))
        .collect();
    from_images(format!("C_{l}(S;2d)"), 2, SpaceClass::Sym, l, images, true, None)
}

/// 2D `C_k_plus(S) = xx^T P_{k-2}` about `origin`.
pub fn c_plus2(k: u32, origin: Option<Vec<Rat>>) -> SpaceBasis {
    let o = origin.clone().unwrap_or_else(|| origin_zero(2));
    let op = diffops::Op::XxT(o.clone());
    let dom = full_space(2, SpaceClass::Scalar, k as i64 - 2);
    let images = dom
        .elements
        .iter()
        .map(|e| op.apply(e).expect("xxT applies to scalars"))
        .collect();
    from_images(
        format!("C_{k}+(S;2d)"),
        2,
        SpaceClass::Sym,
        k,
        images,
        false,
        Some(o),
    )
}

/// Hessians of scalar polynomials: `hess P_{k+2}` inside `P_k(S)`.
pub fn hess_image(arity: usize, k: u32) -> SpaceBasis {
    let monos = monomial_basis(arity, k + 2);
    let images: Vec<PolyMatR> = monos
        .iter()
        .filter(|m| m.deg() >= 2)
        .map(|m| diffops::hess_scalar(&PolyR::monomial(arity, *m, rat_i(1))))
        .collect();
    from_images(
        format!("hess P_{}", k + 2),
        arity,
        SpaceClass::Sym,
        k,
        images,
        false,
        None,
    )
}

/// `sym(P_{k-1}(T) x x)` inside `P_k(S)` (3D).
pub fn sym_cross_x3(k: u32, origin: Option<Vec<Rat>>) -> SpaceBasis {
    let o = origin.clone().unwrap_or_else(|| origin_zero(3));
    let op = diffops::Op::SymCrossX(o.clone());
    let dom = full_space(3, SpaceClass::Dev, k as i64 - 1);
    let images = dom
        .elements
        .iter()
        .map(|e| op.apply(e).expect("shape ok"))
        .collect();
    from_images(
        format!("sym(P_{}(T) x x)", k as i64 - 1),
        3,
        SpaceClass::Sym,
        k,
        images,
        true,
        Some(o),
    )
}

/// `dev grad P_{k+2}(R3)` inside `P_{k+1}(T)`.
pub fn dev_grad_image3(k: u32) -> SpaceBasis {
    let dom = full_space(3, SpaceClass::Vector, k as i64 + 2);
    let images = dom
        .elements
        .iter()
        .map(|e| diffops::dev_grad(&e.col_vec(0)))
        .collect();
    from_images(
        format!("dev grad P_{}", k + 2),
        3,
        SpaceClass::Dev,
        k + 1,
        images,
        true,
        None,
    )
}

/// `P_k(S) x x` inside `P_{k+1}(T)`.
pub fn s_cross_x3(k: u32, origin: Option<Vec<Rat>>) -> SpaceBasis {
    let o = origin.clone().unwrap_or_else(|| origin_zero(3));
    let op = diffops::Op::CrossX(o.clone());
    let dom = full_space(3, SpaceClass::Sym, k as i64);
    let images = dom
        .elements
        .iter()
        .map(|e| op.apply(e).expect("shape ok"))
        .collect();
    from_images(
        format!("P_{k}(S) x x"),
        3,
        SpaceClass::Dev,
        k + 1,
        images,
        true,
        Some(o),
    )
}

/// Shape-function space of the 3D symmetric element:
/// `Sigma_{l,k} = C_l(S) + xx^T P_{k-2}` (equal to `P_k(S)` when l = k).
pub fn sigma3(l: u32, k: u32, origin: Option<Vec<Rat>>) -> Result<SpaceBasis> {
    if k < 3 || l < 3.max(k.saturating_sub(1)) {
        return Err(Error::ParamRange(format!(
            "sigma3 needs k >= 3 and l >= max(k-1, 3); got l={l}, k={k}"
        )));
    }
    if l == k {
        let mut sb = full_space(3, SpaceClass::Sym, k as i64);
        sb.name = format!("Sigma_{{{l},{k}}}");
        return Ok(sb);
    }
    let a = c_sym3(l);
    let b = c_plus3(k, origin.clone());
    let degree = l.max(k);
    let mut elements = a.elements;
    elements.extend(b.elements);
    Ok(from_images(
        format!("Sigma_{{{l},{k}}}"),
        3,
        SpaceClass::Sym,
        degree,
        elements,
        false,
        origin,
    ))
}

/// 2D shape-function space `Sigma_{l,k}(F)`.
pub fn sigma2(l: u32, k: u32, origin: Option<Vec<Rat>>) -> Result<SpaceBasis> {
    if k < 3 || l < 3.max(k.saturating_sub(1)) {
        return Err(Error::ParamRange(format!(
            "sigma2 needs k >= 3 and l >= max(k-1, 3); got l={l}, k={k}"
        )));
    }
    let a = c_sym2(l);
    let b = c_plus2(k, origin.clone());
    let degree = l.max(k);
    let mut elements = a.elements;
    elements.extend(b.elements);
    Ok(from_images(
        format!("Sigma_{{{l},{k}}}(2d)"),
        2,
        SpaceClass::Sym,
        degree,
        elements,
        false,
        origin,
    ))
}

/// `sym(x_perp P_deg(R2))` about `origin` (2D volume-moment weights).
pub fn sym_xperp2(deg: i64, origin: Option<Vec<Rat>>) -> SpaceBasis {
    let o = origin.clone().unwrap_or_else(|| origin_zero(2));
    let op = diffops::Op::SymXPerpV(o.clone());
    let dom = full_space(2, SpaceClass::Vector, deg);
    let images = dom
        .elements
        .iter()
        .map(|e| op.apply(e).expect("shape ok"))
        .collect();
    from_images(
        format!("sym(x_perp P_{deg}(R2))"),
        2,
        SpaceClass::Sym,
        (deg.max(0) as u32) + 1,
        images,
        true,
        Some(o),
    )
}

/// Scalar polynomials of degree <= k that are L2-orthogonal to `P_1` on
/// the simplex with the given vertices (exact).
pub fn poly_orth_p1(arity: usize, k: i64, verts: &[Vec<Rat>]) -> Result<SpaceBasis> {
    let base = full_space(arity, SpaceClass::Scalar, k);
    if base.is_empty() {
        return Ok(base);
    }
    let lin = full_space(arity, SpaceClass::Scalar, 1);
    let mut rows = Vec::new();
    for l in &lin.elements {
        let mut row = Vec::new();
        for m in &base.elements {
            let prod = l.at(0, 0).mul(m.at(0, 0));
            row.push(crate::polyring::integrate_simplex(&prod, verts)?);
        }
        rows.push(row);
    }
    let constraint = ExactMatrix::from_rows(rows);
    let null = constraint.nullspace_basis();
    let elements: Vec<PolyMatR> = null
        .iter()
        .map(|v| {
            let mut p = PolyR::zero(arity, ());
            for (c, e) in v.iter().zip(base.elements.iter()) {
                if !c.is_zero() {
                    p = p.add(&e.at(0, 0).scale(c));
                }
            }
            PolyMat::scalar(p)
        })
        .collect();
    Ok(from_images(
        format!("P_{k} orth P_1"),
        arity,
        SpaceClass::Scalar,
        k.max(0) as u32,
        elements,
        false,
        None,
    ))
}

// ---------------------------------------------------------------------
// locally scaled bases (well-conditioned on far-from-origin cells)
// ---------------------------------------------------------------------

/// Monomials in the shifted, scaled coordinate `(x - origin) / h`,
/// expanded into global coordinates (exact; `h` is a rational scale).
pub fn scaled_monomials(arity: usize, deg: i64, origin: &[Rat], h: &Rat) -> Vec<PolyR> {
    if deg < 0 {
        return Vec::new();
    }
    let xhat: Vec<PolyR> = (0..arity)
        .map(|i| {
            PolyR::var(arity, (), i)
                .add(&PolyR::constant(arity, -origin[i].clone()))
                .scale(&(Rat::from_integer(1.into()) / h))
        })
        .collect();
    monomial_basis(arity, deg as u32)
        .into_iter()
        .map(|m| {
            let mut q = PolyR::constant(arity, rat_i(1));
            for i in 0..arity {
                for _ in 0..m.0[i] {
                    q = q.mul(&xhat[i]);
                }
            }
            q
        })
        .collect()
}

/// Full polynomial space with a barycenter-shifted, diameter-scaled
/// monomial basis (same span as `full_space`).
pub fn full_space_scaled(
    arity: usize,
    class: SpaceClass,
    deg: i64,
    origin: &[Rat],
    h: &Rat,
) -> SpaceBasis {
    let dim = arity;
    let mut sb = full_space(arity, class, deg);
    if deg < 0 {
        return sb;
    }
    let monos = scaled_monomials(arity, deg, origin, h);
    let comp = class.comp_count(dim);
    let mut elements = Vec::with_capacity(comp * monos.len());
    for c in 0..comp {
        let mut comps = vec![PolyR::zero(arity, ()); comp];
        comps[c] = PolyR::constant(arity, rat_i(1));
        let cmat = class.reconstruct(dim, arity, (), &comps);
        for q in &monos {
            elements.push(cmat.scale_poly(q));
        }
    }
    sb.elements = elements;
    sb.is_full = false;
    sb.origin = Some(origin.to_vec());
    sb
}

/// `Sigma_{l,k}` with the locally scaled basis.
pub fn sigma3_scaled(l: u32, k: u32, origin: &[Rat], h: &Rat) -> Result<SpaceBasis> {
    if k < 3 || l < 3.max(k.saturating_sub(1)) {
        return Err(Error::ParamRange(format!(
            "sigma3 needs k >= 3 and l >= max(k-1, 3); got l={l}, k={k}"
        )));
    }
    if l == k {
        let mut sb = full_space_scaled(3, SpaceClass::Sym, k as i64, origin, h);
        sb.name = format!("Sigma_{{{l},{k}}}");
        return Ok(sb);
    }
    // sym curl images of the scaled P_{l+1}(T) basis, pruned
    let dom = full_space_scaled(3, SpaceClass::Dev, l as i64 + 1, origin, h);
    let images: Vec<PolyMatR> = dom.elements.iter().map(diffops::sym_curl).collect();
    let a = from_images(format!("C_{l}(S)"), 3, SpaceClass::Sym, l, images, true, None);
    // x x^T P_{k-2} about the origin, scaled
    let xb: Vec<PolyR> = (0..3)
        .map(|i| {
            PolyR::var(3, (), i)
                .add(&PolyR::constant(3, -origin[i].clone()))
                .scale(&(Rat::from_integer(1.into()) / h))
        })
        .collect();
    let xxt = crate::tensorops::outer(&xb, &xb);
    let mut elements = a.elements;
    for q in scaled_monomials(3, k as i64 - 2, origin, h) {
        elements.push(xxt.scale_poly(&q));
    }
    Ok(from_images(
        format!("Sigma_{{{l},{k}}}"),
        3,
        SpaceClass::Sym,
        l.max(k),
        elements,
        false,
        Some(origin.to_vec()),
    ))
}

/// 2D `Sigma_{l,k}(F)` with the locally scaled basis.
pub fn sigma2_scaled(l: u32, k: u32, origin: &[Rat], h: &Rat) -> Result<SpaceBasis> {
    if k < 3 || l < 3.max(k.saturating_sub(1)) {
        return Err(Error::ParamRange(format!(
            "sigma2 needs k >= 3 and l >= max(k-1, 3); got l={l}, k={k}"
        )));
    }
    let dom = full_space_scaled(2, SpaceClass::Vector, l as i64 + 1, origin, h);
    let images: Vec<PolyMatR> = dom
        .elements
        .iter()
        .map(|e| diffops::sym_curl_f(&e.col_vec(0)))
        .collect();
    let a = from_images(format!("C_{l}(S;2d)"), 2, SpaceClass::Sym, l, images, true, None);
    let xb: Vec<PolyR> = (0..2)
        .map(|i| {
            PolyR::var(2, (), i)
                .add(&PolyR::constant(2, -origin[i].clone()))
                .scale(&(Rat::from_integer(1.into()) / h))
        })
        .collect();
    let xxt = crate::tensorops::outer(&xb, &xb);
    let mut elements = a.elements;
    for q in scaled_monomials(2, k as i64 - 2, origin, h) {
        elements.push(xxt.scale_poly(&q));
    }
    Ok(from_images(
        format!("Sigma_{{{l},{k}}}(2d)"),
        2,
        SpaceClass::Sym,
        l.max(k),
        elements,
        false,
        Some(origin.to_vec()),
    ))
}

/// Smallest power of two whose square bounds the squared diameter.
pub fn pow2_scale(diam2: &Rat) -> Rat {
    let one = Rat::from_integer(1.into());
    let two = Rat::from_integer(2.into());
    let mut h = one.clone();
    if diam2 <= &one {
        // shrink while (h/2)^2 still bounds diam2
        loop {
            let half = &h / &two;
            if &(&half * &half) >= diam2 {
                h = half;
            } else {
                break;
            }
        }
    } else {
        while &(&h * &h) < diam2 {
            h = &h * &two;
        }
    }
    h
}

// ---------------------------------------------------------------------
// direct sums and dimension formulas
// ---------------------------------------------------------------------

#[derive(Clone, Debug, serde::Serialize)]
pub struct DirectSumReport {
    pub whole: String,
    pub part_names: Vec<String>,
    pub part_dims: Vec<usize>,
    pub sum_of_dims: usize,
    pub rank_of_union: usize,
    pub whole_dim: usize,
    pub pass: bool,
}

/// Certify `whole = part_1 (+) part_2 (+) ...` by exact rank counting.
pub fn verify_direct_sum(parts: &[&SpaceBasis], whole: &SpaceBasis) -> Result<DirectSumReport> {
    let mut seen_origin: Option<&Vec<Rat>> = None;
    for p in parts {
        if p.arity != whole.arity {
            return Err(Error::ArityMismatch {
                left: p.arity,
                right: whole.arity,
            });
        }
        if let Some(o) = &p.origin {
            match seen_origin {
                None => seen_origin = Some(o),
                Some(prev) if prev == o => {}
                Some(_) => {
                    return Err(Error::ClassMismatch(
                        "parts built around different Koszul origins".into(),
                    ))
                }
            }
        }
    }
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for p in parts {
        for e in &p.elements {
            cols.push(whole.linearize(e)?);
        }
    }
    let union = ExactMatrix::from_columns(&cols);
    let rank = union.rank();
    let part_dims: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    let sum: usize = part_dims.iter().sum();
    let whole_dim = whole.len();
    Ok(DirectSumReport {
        whole: whole.name.clone(),
        part_names: parts.iter().map(|p| p.name.clone()).collect(),
        part_dims,
        sum_of_dims: sum,
        rank_of_union: rank,
        whole_dim,
        pass: sum == rank && rank == whole_dim,
    })
}

pub fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `dim P_k` of scalar polynomials in `d` variables.
pub fn dim_pk(d: u32, k: i64) -> i64 {
    binom(k + d as i64, d as i64)
}

/// `dim C_k(S) = dim (P_k(S) & ker divdiv) = (5k^3+36k^2+67k+36)/6`.
pub fn dim_ck_sym(k: i64) -> i64 {
    (5 * k * k * k + 36 * k * k + 67 * k + 36) / 6
}

/// `dim C_k_plus(S) = (k^3 - k)/6`.
pub fn dim_ck_plus(k: i64) -> i64 {
    (k * k * k - k) / 6
}

/// `dim sym(P_{k-1}(T) x x) = (k+1)k(5k+19)/6`.
pub fn dim_sym_tx(k: i64) -> i64 {
    (k + 1) * k * (5 * k + 19) / 6
}

/// `dim B_{l+1}(sym curl; T) = (4l^3 + 6l^2 - 10l)/3`.
pub fn dim_bubble_symcurl(l: i64) -> i64 {
    (4 * l * l * l + 6 * l * l - 10 * l) / 3
}

/// Dimension of the interior kernel `ring(Sigma) & ker(divdiv)`:
/// `l(l-1)(5l+17)/6`.
pub fn dim_ring_ker(l: i64) -> i64 {
    l * (l - 1) * (5 * l + 17) / 6
}

/// `dim Sigma_{l,k} = dim C_l(S) + dim C_k_plus(S)`.
pub fn dim_sigma3(l: i64, k: i64) -> i64 {
    dim_ck_sym(l) + dim_ck_plus(k)
}

/// `dim Sigma_{l,k}(F) = l^2 + 5l + 3 + k(k-1)/2` in 2D.
pub fn dim_sigma2(l: i64, k: i64) -> i64 {
    l * l + 5 * l + 3 + k * (k - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_dims() {
        assert_eq!(full_space(3, SpaceClass::Sym, 3).len(), 120);
        assert_eq!(full_space(3, SpaceClass::Dev, 4).len(), 280);
        assert_eq!(full_space(3, SpaceClass::Vector, 5).len(), 168);
        assert_eq!(full_space(3, SpaceClass::Scalar, 0).len(), 1);
        assert_eq!(full_space(2, SpaceClass::Sym, 3).len(), 30);
        assert_eq!(full_space(3, SpaceClass::Scalar, -1).len(), 0);
    }

    #[test]
    fn rt_and_cplus() {
        let rt = rt_space(3);
        assert_eq!(rt.len(), 4);
        assert!(rt.verify_independent());
        let cp = c_plus3(3, None);
        assert_eq!(cp.len(), 4);
        assert_eq!(dim_ck_plus(3), 4);
        assert!(cp.verify_independent());
    }

    #[test]
    fn c_sym_dimension_formula() {
        for k in 3..=4 {
            let c = c_sym3(k);
            assert_eq!(c.len() as i64, dim_ck_sym(k as i64), "k={k}");
            assert!(c.verify_independent());
        }
        assert_eq!(dim_ck_sym(3), 116);
        assert_eq!(dim_ck_sym(4), 200);
    }

    #[test]
    fn direct_sum_at_k3() {
        let whole = full_space(3, SpaceClass::Sym, 3);
        // C_3(S) (+) C_3+(S) = P_3(S): 116 + 4 = 120
        let a = c_sym3(3);
        let b = c_plus3(3, None);
        let rep = verify_direct_sum(&[&a, &b], &whole).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.part_dims, vec![116, 4]);
        // hess P_5 (+) sym(P_2(T) x x) = P_3(S): 52 + 68 = 120
        let h = hess_image(3, 3);
        let s = sym_cross_x3(3, None);
        let rep = verify_direct_sum(&[&h, &s], &whole).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.part_dims, vec![52, 68]);
        assert_eq!(dim_sym_tx(3), 68);
        // P_3(S) x x (+) dev grad P_5 = P_4(T): 116 + 164 = 280
        let whole_t = full_space(3, SpaceClass::Dev, 4);
        let sx = s_cross_x3(3, None);
        let dg = dev_grad_image3(3);
        let rep = verify_direct_sum(&[&sx, &dg], &whole_t).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.part_dims, vec![116, 164]);
    }

    #[test]
    fn sigma_spaces() {
        let s33 = sigma3(3, 3, None).unwrap();
        assert_eq!(s33.len(), 120);
        assert!(s33.is_full);
        let s34 = sigma3(3, 4, None).unwrap();
        assert_eq!(s34.len() as i64, dim_sigma3(3, 4));
        assert_eq!(s34.len(), 126);
        assert!(s34.verify_independent());
        assert!(sigma3(2, 3, None).is_err());
        let s2 = sigma2(3, 3, None).unwrap();
        assert_eq!(s2.len() as i64, dim_sigma2(3, 3));
        assert_eq!(s2.len(), 30);
    }

    #[test]
    fn orth_p1_dims() {
        let verts = vec![
            vec![rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
            vec![rat_i(0), rat_i(0), rat_i(1)],
        ];
        let s = poly_orth_p1(3, 1, &verts).unwrap();
        assert_eq!(s.len(), 0);
        let s = poly_orth_p1(3, 2, &verts).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.verify_independent());
    }
}
