//! Declarative polynomial complexes and exact-arithmetic certificates of
//! the complex property, exactness and dimension bookkeeping.
//!
//! A chain is a node list `V_0 -> V_1 -> ... -> V_m` with one operator
//! per arrow, implicitly extended by zero on both ends.  The certificate
//! checks, all in exact arithmetic:
//!   - composition of consecutive operators is the zero map,
//!   - the first operator is injective,
//!   - interior slots satisfy `rank(in) = dim - rank(out)`,
//!   - the last operator is surjective,
//!   - the alternating dimension sum vanishes.

use serde::Serialize;

use crate::diffops::{operator_matrix, Op};
use crate::error::{Error, Result};
use crate::exactla::{rat, Rat};
use crate::polyspaces::{self, SpaceBasis, SpaceClass};
use num_traits::Zero;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ComplexId {
    DivDiv3d,
    Koszul3d,
    DeRham3d,
    Hessian3d,
    HessianKoszul3d,
    DivDiv2d,
    Koszul2d,
    Hessian2d,
    HessianKoszul2d,
    Fem2dOneElement,
}

impl ComplexId {
    pub fn name(&self) -> &'static str {
        match self {
            ComplexId::DivDiv3d => "divdiv3d",
            ComplexId::Koszul3d => "koszul3d",
            ComplexId::DeRham3d => "derham3d",
            ComplexId::Hessian3d => "hessian3d",
            ComplexId::HessianKoszul3d => "hessian-koszul3d",
            ComplexId::DivDiv2d => "divdiv2d",
            ComplexId::Koszul2d => "koszul2d",
            ComplexId::Hessian2d => "hessian2d",
            ComplexId::HessianKoszul2d => "hessian-koszul2d",
            ComplexId::Fem2dOneElement => "fe-divdiv2d-one-element",
        }
    }

    pub fn parse(s: &str) -> Option<ComplexId> {
        ALL_COMPLEXES.iter().copied().find(|c| c.name() == s)
    }

    /// Inclusive degree range in which the chain is built and certified.
    pub fn degree_range(&self) -> (u32, u32) {
        match self {
            ComplexId::DivDiv3d
            | ComplexId::Koszul3d
            | ComplexId::DeRham3d
            | ComplexId::Hessian3d
            | ComplexId::HessianKoszul3d => (2, 5),
            ComplexId::Fem2dOneElement => (3, 6),
            _ => (2, 6),
        }
    }
}

pub const ALL_COMPLEXES: [ComplexId; 10] = [
    ComplexId::DivDiv3d,
    ComplexId::Koszul3d,
    ComplexId::DeRham3d,
    ComplexId::Hessian3d,
    ComplexId::HessianKoszul3d,
    ComplexId::DivDiv2d,
    ComplexId::Koszul2d,
    ComplexId::Hessian2d,
    ComplexId::HessianKoszul2d,
    ComplexId::Fem2dOneElement,
];

/// The built-in chains (each double-direction display contributes its two
/// one-directional complexes).
pub fn builtin_complexes() -> Vec<ComplexId> {
    ALL_COMPLEXES.to_vec()
}

pub struct ComplexSpec {
    pub id: ComplexId,
    pub degree: u32,
    pub nodes: Vec<SpaceBasis>,
    pub ops: Vec<Op>,
}

/// Assemble the chain for a given degree.
pub fn build_complex(id: ComplexId, k: u32) -> Result<ComplexSpec> {
    let (lo, hi) = id.degree_range();
    if k < lo || k > hi {
        return Err(Error::ParamRange(format!(
            "complex {} is certified for degrees {lo}..={hi}; got {k}",
            id.name()
        )));
    }
    let k = k as i64;
    let o3 = vec![Rat::zero(); 3];
    let o2 = vec![Rat::zero(); 2];
    use SpaceClass::*;
    let (nodes, ops) = match id {
        ComplexId::DivDiv3d => (
            vec![
                polyspaces::rt_space(3),
                polyspaces::full_space(3, Vector, k + 2),
                polyspaces::full_space(3, Dev, k + 1),
                polyspaces::full_space(3, Sym, k),
                polyspaces::full_space(3, Scalar, k - 2),
            ],
            vec![Op::Inclusion, Op::DevGrad, Op::SymCurl, Op::DivDiv],
        ),
        ComplexId::Koszul3d => (
            vec![
                polyspaces::full_space(3, Scalar, k - 2),
                polyspaces::full_space(3, Sym, k),
                polyspaces::full_space(3, Dev, k + 1),
                polyspaces::full_space(3, Vector, k + 2),
                polyspaces::rt_space(3),
            ],
            vec![
                Op::XxT(o3.clone()),
                Op::CrossX(o3.clone()),
                Op::DotX(o3.clone()),
                Op::PiRT(o3),
            ],
        ),
        ComplexId::DeRham3d => (
            vec![
                polyspaces::full_space(3, Scalar, 0),
                polyspaces::full_space(3, Scalar, k + 1),
                polyspaces::full_space(3, Vector, k),
                polyspaces::full_space(3, Vector, k - 1),
                polyspaces::full_space(3, Scalar, k - 2),
            ],
            vec![Op::Inclusion, Op::Grad, Op::Curl, Op::Div],
        ),
        ComplexId::Hessian3d => (
            vec![
                polyspaces::full_space(3, Scalar, 1),
                polyspaces::full_space(3, Scalar, k + 2),
                polyspaces::full_space(3, Sym, k),
                polyspaces::full_space(3, Dev, k - 1),
                polyspaces::full_space(3, Vector, k - 2),
            ],
            vec![Op::Inclusion, Op::Hess, Op::Curl, Op::Div],
        ),
        ComplexId::HessianKoszul3d => (
            vec![
                polyspaces::full_space(3, Vector, k - 2),
                polyspaces::full_space(3, Dev, k - 1),
                polyspaces::full_space(3, Sym, k),
                polyspaces::full_space(3, Scalar, k + 2),
                polyspaces::full_space(3, Scalar, 1),
            ],
            vec![
                Op::DevVxT(o3.clone()),
                Op::SymCrossX(o3.clone()),
                Op::XtTauX(o3.clone()),
                Op::Pi1(o3),
            ],
        ),
        ComplexId::DivDiv2d => (
            vec![
                polyspaces::rt_space(2),
                polyspaces::full_space(2, Vector, k + 1),
                polyspaces::full_space(2, Sym, k),
                polyspaces::full_space(2, Scalar, k - 2),
            ],
            vec![Op::Inclusion, Op::SymCurlF, Op::DivDiv],
        ),
        ComplexId::Koszul2d => (
            vec![
                polyspaces::full_space(2, Scalar, k - 2),
                polyspaces::full_space(2, Sym, k),
                polyspaces::full_space(2, Vector, k + 1),
                polyspaces::rt_space(2),
            ],
            vec![Op::XxT(o2.clone()), Op::DotXPerp(o2.clone()), Op::PiRT(o2)],
        ),
        ComplexId::Hessian2d => (
            vec![
                polyspaces::full_space(2, Scalar, 1),
                polyspaces::full_space(2, Scalar, k + 2),
                polyspaces::full_space(2, Sym, k),
                polyspaces::full_space(2, Vector, k - 1),
            ],
            vec![Op::Inclusion, Op::Hess, Op::RotF],
        ),
        ComplexId::HessianKoszul2d => (
            vec![
                polyspaces::full_space(2, Vector, k - 1),
                polyspaces::full_space(2, Sym, k),
                polyspaces::full_space(2, Scalar, k + 2),
                polyspaces::full_space(2, Scalar, 1),
            ],
            vec![Op::SymXPerpV(o2.clone()), Op::XtTauX(o2.clone()), Op::Pi1(o2)],
        ),
        ComplexId::Fem2dOneElement => {
            // reference triangle, shape space about its barycenter
            let bary = vec![rat(1, 3), rat(1, 3)];
            (
                vec![
                    polyspaces::rt_space(2),
                    polyspaces::full_space(2, Vector, k + 1),
                    polyspaces::sigma2(k as u32, k as u32, Some(bary))?,
                    polyspaces::full_space(2, Scalar, k - 2),
                ],
                vec![Op::Inclusion, Op::SymCurlF, Op::DivDiv],
            )
        }
    };
    Ok(ComplexSpec {
        id,
        degree: k as u32,
        nodes,
        ops,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotReport {
    pub space: String,
    pub dim: usize,
    pub rank_in: usize,
    pub nullity_out: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub name: String,
    pub degree: u32,
    pub dims: Vec<usize>,
    pub op_names: Vec<String>,
    pub op_ranks: Vec<usize>,
    pub compositions_zero: bool,
    pub first_injective: bool,
    pub last_surjective: bool,
    pub slots: Vec<SlotReport>,
    pub alternating_sum: i64,
    pub pass: bool,
}

/// Exact certificate for the built-in complex `id` at degree `k`.
pub fn verify_complex(id: ComplexId, k: u32) -> Result<ExactnessReport> {
    let spec = build_complex(id, k)?;
    verify_spec(&spec)
}

/// Same, but each node basis is first re-mixed by a random unimodular
/// integer matrix (exactness must not depend on the basis choice).
pub fn verify_complex_remixed(id: ComplexId, k: u32, seed: u64) -> Result<ExactnessReport> {
    let mut spec = build_complex(id, k)?;
    for (i, node) in spec.nodes.iter_mut().enumerate() {
        remix_basis(node, seed.wrapping_add(i as u64));
    }
    verify_spec(&spec)
}

fn verify_spec(spec: &ComplexSpec) -> Result<ExactnessReport> {
    let nodes = &spec.nodes;
    let ops = &spec.ops;
    assert_eq!(nodes.len(), ops.len() + 1, "chain arity");
    let dims: Vec<usize> = nodes.iter().map(|n| n.len()).collect();

    let mut op_ranks = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let m = operator_matrix(op, &nodes[i], &nodes[i + 1])?;
        op_ranks.push(m.rank());
    }

    // composition of consecutive arrows annihilates every basis element
    let mut compositions_zero = true;
    for i in 0..ops.len().saturating_sub(1) {
        for el in &nodes[i].elements {
            let mid = ops[i].apply(el)?;
            let out = ops[i + 1].apply(&mid)?;
            if !out.is_zero() {
                compositions_zero = false;
            }
        }
    }

    let first_injective = op_ranks.first().is_none_or(|&r| r == dims[0]);
    let last_surjective = op_ranks.last().is_none_or(|&r| r == dims[dims.len() - 1]);

    let mut slots = Vec::new();
    for i in 1..nodes.len() - 1 {
        let rank_in = op_ranks[i - 1];
        let nullity_out = dims[i] - op_ranks[i];
        slots.push(SlotReport {
            space: nodes[i].name.clone(),
            dim: dims[i],
            rank_in,
            nullity_out,
            exact: rank_in == nullity_out,
        });
    }

    let mut alternating_sum = 0i64;
    for (i, &d) in dims.iter().enumerate() {
        if i % 2 == 0 {
            alternating_sum += d as i64;
        } else {
            alternating_sum -= d as i64;
        }
    }

    let pass = compositions_zero
        && first_injective
        && last_surjective
        && slots.iter().all(|s| s.exact)
        && alternating_sum == 0;

    Ok(ExactnessReport {
        name: spec.id.name().into(),
        degree: spec.degree,
        dims,
        op_names: ops.iter().map(|o| o.name().to_string()).collect(),
        op_ranks,
        compositions_zero,
        first_injective,
        last_surjective,
        slots,
        alternating_sum,
        pass,
    })
}

/// Replace the basis by random (seeded) integer combinations with unit
/// determinant; spans and exactness certificates must be unchanged.
pub fn remix_basis(sb: &mut SpaceBasis, seed: u64) {
    use rand::{Rng, SeedableRng};
    let n = sb.elements.len();
    if n == 0 {
        return;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut mixed = sb.elements.clone();
    // unit upper pass: e_j += c * e_i for some i < j
    for j in 1..n {
        let i = rng.gen_range(0..j);
        let c = rat(rng.gen_range(-2..=2), 1);
        let add = mixed[i].scale_coeff(&c);
        mixed[j] = mixed[j].add(&add);
    }
    // unit lower pass: e_i += c * e_j for some j > i
    for i in 0..n.saturating_sub(1) {
        let j = rng.gen_range(i + 1..n);
        let c = rat(rng.gen_range(-2..=2), 1);
        let add = mixed[j].scale_coeff(&c);
        mixed[i] = mixed[i].add(&add);
    }
    sb.elements = mixed;
    sb.is_full = false;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divdiv3d_exact_at_3() {
        let rep = verify_complex(ComplexId::DivDiv3d, 3).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.dims, vec![4, 168, 280, 120, 4]);
        // kernel of div div on P_3(S) has dimension 116
        assert_eq!(rep.dims[3] - rep.op_ranks[3], 116);
    }

    #[test]
    fn koszul3d_exact_at_3() {
        let rep = verify_complex(ComplexId::Koszul3d, 3).unwrap();
        assert!(rep.pass, "{rep:?}");
        // ker((.) x x) on P_3(S) is 4-dimensional (= x x^T P_1)
        assert_eq!(rep.dims[1] - rep.op_ranks[1], 4);
    }

    #[test]
    fn derham3d_exact_at_4() {
        let rep = verify_complex(ComplexId::DeRham3d, 4).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn hessian3d_both_directions_at_3() {
        let fwd = verify_complex(ComplexId::Hessian3d, 3).unwrap();
        assert!(fwd.pass, "{fwd:?}");
        assert_eq!(fwd.dims, vec![4, 56, 120, 80, 12]);
        // div : P_2(T) -> P_1(R3) is surjective
        assert_eq!(*fwd.op_ranks.last().unwrap(), 12);
        let bwd = verify_complex(ComplexId::HessianKoszul3d, 3).unwrap();
        assert!(bwd.pass, "{bwd:?}");
    }

    #[test]
    fn two_dimensional_complexes_at_3() {
        let dd = verify_complex(ComplexId::DivDiv2d, 3).unwrap();
        assert!(dd.pass, "{dd:?}");
        assert_eq!(dd.dims, vec![3, 30, 30, 3]);
        let ko = verify_complex(ComplexId::Koszul2d, 3).unwrap();
        assert!(ko.pass, "{ko:?}");
        let h = verify_complex(ComplexId::Hessian2d, 3).unwrap();
        assert!(h.pass, "{h:?}");
        let hk = verify_complex(ComplexId::HessianKoszul2d, 3).unwrap();
        assert!(hk.pass, "{hk:?}");
        let fe = verify_complex(ComplexId::Fem2dOneElement, 3).unwrap();
        assert!(fe.pass, "{fe:?}");
        assert_eq!(fe.dims, vec![3, 30, 30, 3]);
    }

    #[test]
    fn builtin_list_is_complete() {
        assert!(builtin_complexes().len() >= 8);
    }

    #[test]
    fn exactness_invariant_under_remix() {
        let rep = verify_complex_remixed(ComplexId::DivDiv2d, 3, 42).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn degree_range_enforced() {
        assert!(verify_complex(ComplexId::DivDiv3d, 1).is_err());
    }
}
