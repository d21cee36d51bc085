//! Tetrahedron and triangle geometry: exact barycentric coordinates and
//! bubbles, deterministic global frames for edges and faces, charts for
//! entity-local integration, and seeded random cells.
//!
//! Orientation rules are global: edge tangents run from the lower to the
//! higher global vertex index, a face is identified by its sorted vertex
//! triple and carries the right-hand normal of that triple, and
//! per-element outward normals are derived with a sign flag.  Frames
//! therefore never depend on which element looks at the entity.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bigfloat::{bf0, bf_rat, BigF};
use crate::error::{Error, Result};
use crate::exactla::{rat_i, ExactMatrix, Rat};
use crate::polyring::PolyR;

/// Local vertex pairs of the six tet edges.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local vertex triples of the four tet faces; face `i` is opposite vertex `i`.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Local vertex pairs of the three triangle edges.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

#[derive(Clone, Debug)]
pub struct Tet {
    pub verts: [Vec<Rat>; 4],
    pub gids: [usize; 4],
    pub volume: Rat,
    lambdas: [PolyR; 4],
}

#[derive(Clone, Debug)]
pub struct EdgeFrame {
    pub t: Vec<BigF>,
    pub n1: Vec<BigF>,
    pub n2: Vec<BigF>,
}

#[derive(Clone, Debug)]
pub struct FaceFrame {
    /// Global unit normal (right-hand rule of the sorted vertex triple).
    pub n: Vec<BigF>,
    pub t1: Vec<BigF>,
    pub t2: Vec<BigF>,
    /// +1 if `n` points out of the owning tet, otherwise -1.
    pub outward_sign: i32,
}

fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_float(prec: u32, v: &[Rat]) -> Vec<BigF> {
    v.iter().map(|r| bf_rat(prec, r)).collect()
}

fn normalize(prec: u32, v: &[Rat]) -> Vec<BigF> {
    let vf = to_float(prec, v);
    let mut n2 = bf0(prec);
    for x in &vf {
        let mut t = x.clone();
        t.square_mut();
        n2 += &t;
    }
    let n = n2.sqrt();
    vf.into_iter()
        .map(|mut x| {
            x /= &n;
            x
        })
        .collect()
}

pub fn cross_f(prec: u32, a: &[BigF], b: &[BigF]) -> Vec<BigF> {
    let m = |i: usize, j: usize| {
        let mut t = a[i].clone();
        t *= &b[j];
        t
    };
    let mut c = vec![bf0(prec); 3];
    c[0] = m(1, 2);
    c[0] -= &m(2, 1);
    c[1] = m(2, 0);
    c[1] -= &m(0, 2);
    c[2] = m(0, 1);
    c[2] -= &m(1, 0);
    c
}

pub fn norm_f(prec: u32, v: &[BigF]) -> BigF {
    let mut n2 = bf0(prec);
    for x in v {
        let mut t = x.clone();
        t.square_mut();
        n2 += &t;
    }
    n2.sqrt()
}

impl Tet {
    pub fn new(verts: [Vec<Rat>; 4], gids: [usize; 4]) -> Result<Tet> {
        let e1 = sub(&verts[1], &verts[0]);
        let e2 = sub(&verts[2], &verts[0]);
        let e3 = sub(&verts[3], &verts[0]);
        let det = dot_rat(&cross_rat(&e1, &e2), &e3);
        if det.is_zero() {
            return Err(Error::DegenerateSimplex);
        }
        let volume = det.abs() / rat_i(6);
        // barycentric coordinates: solve [1 x y z] V = e_i
        let mat = ExactMatrix::from_fn(4, 4, |i, j| {
            if i == 0 {
                rat_i(1)
            } else {
                verts[j][i - 1].clone()
            }
        });
        let coef = mat.solve_batch(&ExactMatrix::identity(4))?;
        let lambdas: [PolyR; 4] = std::array::from_fn(|i| {
            let mut p = PolyR::constant(3, coef[(i, 0)].clone());
            for a in 0..3 {
                p = p.add(&PolyR::var(3, (), a).scale(&coef[(i, a + 1)]));
            }
            p
        });
        Ok(Tet {
            verts,
            gids,
            volume,
            lambdas,
        })
    }

    /// The unit reference tetrahedron (0, e1, e2, e3).
    pub fn reference() -> Tet {
        let z = || vec![rat_i(0), rat_i(0), rat_i(0)];
        let mut v = [z(), z(), z(), z()];
        for i in 0..3 {
            v[i + 1][i] = rat_i(1);
        }
        Tet::new(v, [0, 1, 2, 3]).expect("reference tet is non-degenerate")
    }

    /// Seed-deterministic random tetrahedron with small rational vertices
    /// and volume at least 1/100.
    pub fn random(seed: u64) -> Tet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let v: [Vec<Rat>; 4] = std::array::from_fn(|_| {
                (0..3)
                    .map(|_| {
                        Rat::new(
                            rng.gen_range(-16i64..=16).into(),
                            rng.gen_range(1i64..=16).into(),
                        )
                    })
                    .collect()
            });
            if let Ok(t) = Tet::new(v, [0, 1, 2, 3]) {
                if t.volume >= Rat::new(1.into(), 100.into()) && t.shape_measure_ok() {
                    return t;
                }
            }
        }
        panic!("internal error: no acceptable random tet in 10^4 draws");
    }

    pub fn lambda(&self, i: usize) -> &PolyR {
        &self.lambdas[i]
    }

    /// Reject slivers: volume at least diam^3 / 40 keeps DOF matrices
    /// within the pinned conditioning threshold.
    fn shape_measure_ok(&self) -> bool {
        let mut diam2 = Rat::zero();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d: Rat = (0..3)
                    .map(|a| {
                        let t = &self.verts[i][a] - &self.verts[j][a];
                        &t * &t
                    })
                    .sum();
                if d > diam2 {
                    diam2 = d;
                }
            }
        }
        let v2 = &self.volume * &self.volume * rat_i(40 * 40);
        v2 >= &diam2 * &diam2 * &diam2
    }

    pub fn barycenter(&self) -> Vec<Rat> {
        (0..3)
            .map(|a| {
                self.verts.iter().map(|v| v[a].clone()).sum::<Rat>() / rat_i(4)
            })
            .collect()
    }

    /// Local endpoints of edge `e`, ordered lower global id first.
    pub fn edge_verts(&self, e: usize) -> (usize, usize) {
        let [a, b] = TET_EDGES[e];
        if self.gids[a] <= self.gids[b] {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Local vertices of face `f`, sorted by global id.
    pub fn face_verts_sorted(&self, f: usize) -> [usize; 3] {
        let mut v = TET_FACES[f];
        v.sort_by_key(|&i| self.gids[i]);
        v
    }

    /// Cubic face bubble: the product of the face's barycentric coordinates.
    pub fn bubble_face(&self, f: usize) -> PolyR {
        let [a, b, c] = TET_FACES[f];
        self.lambdas[a].mul(&self.lambdas[b]).mul(&self.lambdas[c])
    }

    /// Quartic cell bubble.
    pub fn bubble_cell(&self) -> PolyR {
        self.lambdas
            .iter()
            .skip(1)
            .fold(self.lambdas[0].clone(), |acc, l| acc.mul(l))
    }

    /// Rational (unnormalized) edge direction, lower global id first.
    pub fn edge_dir(&self, e: usize) -> Vec<Rat> {
        let (a, b) = self.edge_verts(e);
        sub(&self.verts[b], &self.verts[a])
    }

    /// Global edge frame: unit tangent plus two unit normals with
    /// `n1 = normalize(t x a)` for the standard axis `a` minimizing
    /// `|t . a|` (ties to the lowest index) and `n2 = t x n1`.
    pub fn edge_frame(&self, e: usize, prec: u32) -> EdgeFrame {
        let d = self.edge_dir(e);
        edge_frame_from_dir(&d, prec)
    }

    /// Chart of edge `e`: 3D point as polynomials in t over [0,1].
    pub fn edge_chart(&self, e: usize) -> [PolyR; 3] {
        let (a, b) = self.edge_verts(e);
        std::array::from_fn(|i| {
            PolyR::constant(1, self.verts[a][i].clone()).add(
                &PolyR::var(1, (), 0).scale(&(&self.verts[b][i] - &self.verts[a][i])),
            )
        })
    }

    pub fn edge_len(&self, e: usize, prec: u32) -> BigF {
        let d = self.edge_dir(e);
        norm_f(prec, &to_float(prec, &d))
    }

    /// Global face frame plus the outward sign for this tet.
    pub fn face_frame(&self, f: usize, prec: u32) -> FaceFrame {
        let s = self.face_verts_sorted(f);
        let d1 = sub(&self.verts[s[1]], &self.verts[s[0]]);
        let d2 = sub(&self.verts[s[2]], &self.verts[s[0]]);
        let ndir = cross_rat(&d1, &d2);
        // outward iff n points away from the opposite vertex (local index f)
        let to_face = sub(&self.verts[s[0]], &self.verts[f]);
        let outward_sign = if dot_rat(&ndir, &to_face).is_positive() { 1 } else { -1 };
        let n = normalize(prec, &ndir);
        let t1 = normalize(prec, &d1);
        let t2 = cross_f(prec, &n, &t1);
        FaceFrame {
            n,
            t1,
            t2,
            outward_sign,
        }
    }

    /// Chart of face `f`: 3D point as polynomials in (u, v) over the
    /// reference triangle, using the globally sorted vertices.
    pub fn face_chart(&self, f: usize) -> [PolyR; 3] {
        let s = self.face_verts_sorted(f);
        std::array::from_fn(|i| {
            let mut p = PolyR::constant(2, self.verts[s[0]][i].clone());
            p = p.add(
                &PolyR::var(2, (), 0).scale(&(&self.verts[s[1]][i] - &self.verts[s[0]][i])),
            );
            p.add(&PolyR::var(2, (), 1).scale(&(&self.verts[s[2]][i] - &self.verts[s[0]][i])))
        })
    }

    pub fn face_area(&self, f: usize, prec: u32) -> BigF {
        let s = self.face_verts_sorted(f);
        let d1 = sub(&self.verts[s[1]], &self.verts[s[0]]);
        let d2 = sub(&self.verts[s[2]], &self.verts[s[0]]);
        let mut a = norm_f(prec, &to_float(prec, &cross_rat(&d1, &d2)));
        a >>= 1;
        a
    }

    pub fn face_barycenter(&self, f: usize) -> Vec<Rat> {
        let s = TET_FACES[f];
        (0..3)
            .map(|a| {
                s.iter().map(|&i| self.verts[i][a].clone()).sum::<Rat>() / rat_i(3)
            })
            .collect()
    }

    /// Boundary edges of face `f` as pairs of its sorted vertices, each with
    /// the unit in-plane outward normal of the face boundary.
    pub fn face_boundary(&self, f: usize, prec: u32) -> Vec<([usize; 2], Vec<BigF>)> {
        let s = self.face_verts_sorted(f);
        let pairs = [[s[0], s[1]], [s[0], s[2]], [s[1], s[2]]];
        pairs
            .iter()
            .map(|&[p, q]| {
                let r = s.iter().copied().find(|&x| x != p && x != q).unwrap();
                // component of (edge midpoint - r) orthogonal to the edge
                let d = sub(&self.verts[q], &self.verts[p]);
                let mid: Vec<Rat> = (0..3)
                    .map(|a| (&self.verts[p][a] + &self.verts[q][a]) / rat_i(2))
                    .collect();
                let w = sub(&mid, &self.verts[r]);
                let coef = dot_rat(&w, &d) / dot_rat(&d, &d);
                let wperp: Vec<Rat> = (0..3).map(|a| &w[a] - &coef * &d[a]).collect();
                ([p, q], normalize(prec, &wperp))
            })
            .collect()
    }

    pub fn verts_f(&self, prec: u32) -> [Vec<BigF>; 4] {
        std::array::from_fn(|i| to_float(prec, &self.verts[i]))
    }
}

/// Edge frame from a rational direction vector (lower -> higher global id).
pub fn edge_frame_from_dir(d: &[Rat], prec: u32) -> EdgeFrame {
    // axis minimizing |t . a|, ties to the lowest index
    let mut axis = 0;
    for a in 1..3 {
        if d[a].abs() < d[axis].abs() {
            axis = a;
        }
    }
    let mut avec = vec![Rat::zero(); 3];
    avec[axis] = rat_i(1);
    let n1dir = cross_rat(d, &avec);
    let t = normalize(prec, d);
    let n1 = normalize(prec, &n1dir);
    let n2 = cross_f(prec, &t, &n1);
    EdgeFrame { t, n1, n2 }
}

// ---------------------------------------------------------------------
// triangles (2D cells)
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Tri {
    pub verts: [Vec<Rat>; 3],
    pub gids: [usize; 3],
    pub area: Rat,
    lambdas: [PolyR; 3],
}

impl Tri {
    pub fn new(verts: [Vec<Rat>; 3], gids: [usize; 3]) -> Result<Tri> {
        let d1 = sub(&verts[1], &verts[0]);
        let d2 = sub(&verts[2], &verts[0]);
        let det = &d1[0] * &d2[1] - &d1[1] * &d2[0];
        if det.is_zero() {
            return Err(Error::DegenerateSimplex);
        }
        let area = det.abs() / rat_i(2);
        let mat = ExactMatrix::from_fn(3, 3, |i, j| {
            if i == 0 {
                rat_i(1)
            } else {
                verts[j][i - 1].clone()
            }
        });
        let coef = mat.solve_batch(&ExactMatrix::identity(3))?;
        let lambdas: [PolyR; 3] = std::array::from_fn(|i| {
            let mut p = PolyR::constant(2, coef[(i, 0)].clone());
            for a in 0..2 {
                p = p.add(&PolyR::var(2, (), a).scale(&coef[(i, a + 1)]));
            }
            p
        });
        Ok(Tri {
            verts,
            gids,
            area,
            lambdas,
        })
    }

    pub fn reference() -> Tri {
        Tri::new(
            [
                vec![rat_i(0), rat_i(0)],
                vec![rat_i(1), rat_i(0)],
                vec![rat_i(0), rat_i(1)],
            ],
            [0, 1, 2],
        )
        .expect("reference triangle")
    }

    pub fn random(seed: u64) -> Tri {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let v: [Vec<Rat>; 3] = std::array::from_fn(|_| {
                (0..2)
                    .map(|_| {
                        Rat::new(
                            rng.gen_range(-16i64..=16).into(),
                            rng.gen_range(1i64..=16).into(),
                        )
                    })
                    .collect()
            });
            if let Ok(t) = Tri::new(v, [0, 1, 2]) {
                if t.area >= Rat::new(1.into(), 100.into()) && t.shape_measure_ok() {
                    return t;
                }
            }
        }
        panic!("internal error: no acceptable random triangle in 10^4 draws");
    }

    pub fn lambda(&self, i: usize) -> &PolyR {
        &self.lambdas[i]
    }

    /// Reject slivers: area at least diam^2 / 10.
    fn shape_measure_ok(&self) -> bool {
        let mut diam2 = Rat::zero();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d: Rat = (0..2)
                    .map(|a| {
                        let t = &self.verts[i][a] - &self.verts[j][a];
                        &t * &t
                    })
                    .sum();
                if d > diam2 {
                    diam2 = d;
                }
            }
        }
        &self.area * rat_i(10) >= diam2
    }

    pub fn bubble(&self) -> PolyR {
        self.lambdas[0].mul(&self.lambdas[1]).mul(&self.lambdas[2])
    }

    pub fn barycenter(&self) -> Vec<Rat> {
        (0..2)
            .map(|a| {
                self.verts.iter().map(|v| v[a].clone()).sum::<Rat>() / rat_i(3)
            })
            .collect()
    }

    pub fn edge_verts(&self, e: usize) -> (usize, usize) {
        let [a, b] = TRI_EDGES[e];
        if self.gids[a] <= self.gids[b] {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn edge_dir(&self, e: usize) -> Vec<Rat> {
        let (a, b) = self.edge_verts(e);
        sub(&self.verts[b], &self.verts[a])
    }

    pub fn edge_chart(&self, e: usize) -> [PolyR; 2] {
        let (a, b) = self.edge_verts(e);
        std::array::from_fn(|i| {
            PolyR::constant(1, self.verts[a][i].clone()).add(
                &PolyR::var(1, (), 0).scale(&(&self.verts[b][i] - &self.verts[a][i])),
            )
        })
    }

    pub fn edge_len(&self, e: usize, prec: u32) -> BigF {
        norm_f(prec, &to_float(prec, &self.edge_dir(e)))
    }

    /// Unit tangent (global direction) and the counterclockwise rotation
    /// `n = (-t2, t1)` used as the edge normal in trace formulas.
    pub fn edge_frame(&self, e: usize, prec: u32) -> (Vec<BigF>, Vec<BigF>) {
        let t = normalize(prec, &self.edge_dir(e));
        let n = vec![-t[1].clone(), t[0].clone()];
        (t, n)
    }

    /// Unit outward normal of edge `e` for this triangle.
    pub fn edge_outward(&self, e: usize, prec: u32) -> Vec<BigF> {
        let (a, b) = self.edge_verts(e);
        let r = (0..3).find(|&i| i != TRI_EDGES[e][0] && i != TRI_EDGES[e][1]).unwrap();
        let d = sub(&self.verts[b], &self.verts[a]);
        let mid: Vec<Rat> = (0..2)
            .map(|i| (&self.verts[a][i] + &self.verts[b][i]) / rat_i(2))
            .collect();
        let w = sub(&mid, &self.verts[r]);
        let coef = dot2(&w, &d) / dot2(&d, &d);
        let wperp: Vec<Rat> = (0..2).map(|i| &w[i] - &coef * &d[i]).collect();
        normalize(prec, &wperp)
    }

    pub fn verts_f(&self, prec: u32) -> [Vec<BigF>; 3] {
        std::array::from_fn(|i| to_float(prec, &self.verts[i]))
    }
}

fn dot2(a: &[Rat], b: &[Rat]) -> Rat {
    &a[0] * &b[0] + &a[1] * &b[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;
    use crate::tol::DEFAULT_PREC;

    #[test]
    fn reference_tet_basics() {
        let t = Tet::reference();
        assert_eq!(t.volume, rat(1, 6));
        // lambda_0 = 1 - x - y - z
        let l0 = t.lambda(0);
        let p = vec![rat(1, 4), rat(1, 4), rat(1, 4)];
        assert_eq!(l0.eval(&p), rat(1, 4));
        // lambda_i(v_j) = delta_ij, sum = 1
        let mut sum = PolyR::zero(3, ());
        for i in 0..4 {
            sum = sum.add(t.lambda(i));
            for j in 0..4 {
                let val = t.lambda(i).eval(&t.verts[j]);
                assert_eq!(val, if i == j { rat_i(1) } else { rat_i(0) });
            }
        }
        assert_eq!(sum, PolyR::constant(3, rat_i(1)));
        // b_K at the barycenter is 1/256; degrees of bubbles
        assert_eq!(t.bubble_cell().eval(&p), rat(1, 256));
        assert_eq!(t.bubble_face(0).degree(), Some(3));
        assert_eq!(t.bubble_cell().degree(), Some(4));
    }

    #[test]
    fn random_tets_are_deterministic() {
        let a = Tet::random(7);
        let b = Tet::random(7);
        assert_eq!(a.verts, b.verts);
        assert!(a.volume >= rat(1, 100));
    }

    #[test]
    fn lambda_vanishes_on_opposite_face_and_grad_is_inward() {
        let t = Tet::random(3);
        for f in 0..4 {
            // lambda_f restricted to the chart of face f is zero
            let chart = t.face_chart(f);
            let restricted = t.lambda(f).subst(chart.as_ref());
            assert!(restricted.is_zero());
        }
    }

    #[test]
    fn edge_frame_rules() {
        let p = DEFAULT_PREC;
        // t = e3: axis a = e1, n1 = e3 x e1 = e2, n2 = e3 x e2 = -e1
        let d = vec![rat_i(0), rat_i(0), rat_i(1)];
        let fr = edge_frame_from_dir(&d, p);
        assert!((fr.n1[1].to_f64() - 1.0).abs() < 1e-60);
        assert!((fr.n2[0].to_f64() + 1.0).abs() < 1e-60);
        // t = e1: a = e2, n1 = e1 x e2 = e3, n2 = e1 x e3 = -e2
        let d = vec![rat_i(1), rat_i(0), rat_i(0)];
        let fr = edge_frame_from_dir(&d, p);
        assert!((fr.n1[2].to_f64() - 1.0).abs() < 1e-60);
        assert!((fr.n2[1].to_f64() + 1.0).abs() < 1e-60);
        // orthonormality for random edges
        for seed in 0..10 {
            let t = Tet::random(seed);
            for e in 0..6 {
                let fr = t.edge_frame(e, p);
                let pairs = [
                    (&fr.t, &fr.t, 1.0),
                    (&fr.n1, &fr.n1, 1.0),
                    (&fr.n2, &fr.n2, 1.0),
                    (&fr.t, &fr.n1, 0.0),
                    (&fr.t, &fr.n2, 0.0),
                    (&fr.n1, &fr.n2, 0.0),
                ];
                for (a, b, want) in pairs {
                    let d = crate::bigfloat::dot(p, a, b);
                    assert!((d.to_f64() - want).abs() < 1e-70);
                }
            }
        }
    }

    #[test]
    fn face_frames_and_outward_normals() {
        let p = DEFAULT_PREC;
        let t = Tet::reference();
        // face 3 is z = 0; its global normal is +/- e3 with outward -e3
        let fr = t.face_frame(3, p);
        let nz = fr.n[2].to_f64();
        assert!((nz.abs() - 1.0).abs() < 1e-60);
        let outward_z = nz * fr.outward_sign as f64;
        assert!((outward_z + 1.0).abs() < 1e-60);
        // face 0 is x+y+z=1 with outward (1,1,1)/sqrt(3)
        let fr = t.face_frame(0, p);
        let s3 = 3f64.sqrt().recip();
        for i in 0..3 {
            let o = fr.n[i].to_f64() * fr.outward_sign as f64;
            assert!((o - s3).abs() < 1e-15);
        }
        // t1 x t2 = n
        for f in 0..4 {
            let fr = t.face_frame(f, p);
            let c = cross_f(p, &fr.t1, &fr.t2);
            for i in 0..3 {
                let mut d = c[i].clone();
                d -= &fr.n[i];
                assert!(d.to_f64().abs() < 1e-70);
            }
        }
    }

    #[test]
    fn face_boundary_normals_point_outward() {
        let p = DEFAULT_PREC;
        for seed in 0..20 {
            let t = Tet::random(seed + 100);
            for f in 0..4 {
                let centroid = t.face_barycenter(f);
                for ([a, b], nfe) in t.face_boundary(f, p) {
                    // nfe . (mid(e) - centroid(F)) > 0
                    let mut acc = bf0(p);
                    for i in 0..3 {
                        let mid = (&t.verts[a][i] + &t.verts[b][i]) / rat_i(2);
                        let mut term = bf_rat(p, &(&mid - &centroid[i]));
                        term *= &nfe[i];
                        acc += &term;
                    }
                    assert!(acc.to_f64() > 0.0);
                }
            }
        }
    }

    #[test]
    fn triangle_basics() {
        let tri = Tri::reference();
        assert_eq!(tri.area, rat(1, 2));
        let t2 = Tri::random(5);
        assert!(t2.area >= rat(1, 100));
        for e in 0..3 {
            let chart = tri.edge_chart(e);
            // bubble vanishes on each edge
            let restricted = tri.bubble().subst(chart.as_ref());
            assert!(restricted.is_zero());
        }
    }
}
