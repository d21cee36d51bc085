//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with its key numbers.  Every tolerance is pinned in `tol`.

use divdivlab_core::complexlab::{builtin_complexes, ComplexId};
use divdivlab_core::femdofs::ElementKind;
use divdivlab_core::meshfem::Mesh;
use divdivlab_core::report::CheckResult;
use divdivlab_core::suites::{self, CellSpec};
use divdivlab_core::tol::DEFAULT_PREC;

fn finish(name: &str, results: &[CheckResult]) {
    let pass = results.iter().all(|r| r.pass);
    println!(
        "criterion {name}: {} ({} checks)",
        if pass { "PASS" } else { "FAIL" },
        results.len()
    );
    for r in results {
        if !r.pass {
            println!("  FAILED: {} {} {:?} {}", r.tag, r.params, r.metrics, r.notes);
        }
    }
    assert!(pass, "criterion {name} failed");
}

#[test]
fn criterion_01_polynomial_complex_exactness() {
    let t0 = std::time::Instant::now();
    let results = suites::complexes_suite(&builtin_complexes(), None).unwrap();
    // the certified ranges cover k = 2..5 in 3D and 2..6 in 2D
    assert!(results
        .iter()
        .filter(|r| r.tag == "complex/divdiv3d")
        .count() >= 4);
    assert!(results
        .iter()
        .filter(|r| r.tag == "complex/divdiv2d")
        .count() >= 5);
    finish("1 (complex exactness)", &results);
    println!("  elapsed {:?} (budget 60 s)", t0.elapsed());
    assert!(t0.elapsed().as_secs() < 60);
}

#[test]
fn criterion_02_kernel_dimension_formulas() {
    let results = suites::kernel_dims_suite(&[3, 4, 5]).unwrap();
    // k = 3 gives 116
    let r3 = results
        .iter()
        .find(|r| r.tag == "dims/kernel-divdiv" && r.params == "k=3")
        .unwrap();
    assert_eq!(r3.metrics["nullity"], "116");
    assert_eq!(r3.metrics["formula"], "116");
    finish("2 (kernel dimension formulas)", &results);
}

#[test]
fn criterion_03_direct_sums() {
    let results = suites::decomp_suite(&[3, 4, 5]).unwrap();
    let at3: Vec<&CheckResult> = results.iter().filter(|r| r.params == "k=3").collect();
    assert!(at3[0].notes.contains("116 + 4 = 120"));
    assert!(at3[1].notes.contains("52 + 68 = 120"));
    assert!(at3[2].notes.contains("116 + 164 = 280"));
    finish("3 (direct sums)", &results);
}

#[test]
fn criterion_04_green_identities() {
    // >= 10 random inputs on >= 5 random cells per identity
    let results = suites::green_suite(2, 5, 0, DEFAULT_PREC).unwrap();
    finish("4 (Green's identities)", &results);
}

#[test]
fn criterion_05_trace_relations() {
    let mut results = suites::trace_suite(10, 0, DEFAULT_PREC).unwrap();
    results.extend(suites::patching_suite(0, DEFAULT_PREC).unwrap());
    results.extend(suites::boundary_degree_suite(3, 3, 0, DEFAULT_PREC).unwrap());
    finish("5 (trace relations)", &results);
}

#[test]
fn criterion_06_unisolvence() {
    let t0 = std::time::Instant::now();
    let cells = [
        CellSpec::Reference,
        CellSpec::Random(1),
        CellSpec::Random(2),
        CellSpec::Random(3),
    ];
    let mut results = Vec::new();
    let mut expect = Vec::new();
    for (kind, l, k, size) in [
        (ElementKind::DivDiv3d, 3, 3, 120),
        (ElementKind::DivDiv3d, 3, 4, 126),
        (ElementKind::DivDiv3d, 4, 4, 210),
        (ElementKind::SymCurl3d, 3, 3, 280),
        (ElementKind::SymCurl3dLagrange, 3, 3, 280),
        (ElementKind::Hermite3d, 3, 3, 168),
        (ElementKind::DivDiv2d, 3, 3, 30),
        (ElementKind::DivDiv3dBubble, 3, 3, 120),
    ] {
        let rs = suites::unisolvence_suite(kind, l, k, &cells, DEFAULT_PREC).unwrap();
        for r in &rs {
            expect.push((r.tag.clone(), size));
        }
        results.extend(rs);
    }
    for (r, (_, size)) in results.iter().zip(&expect) {
        assert_eq!(r.metrics["size"], size.to_string(), "{} {}", r.tag, r.params);
    }
    finish("6 (unisolvence)", &results);
    println!("  elapsed {:?} (budget 300 s)", t0.elapsed());
    assert!(t0.elapsed().as_secs() < 300);
}

#[test]
fn criterion_07_08_bubble_space_and_complex() {
    let cells = [CellSpec::Reference, CellSpec::Random(1)];
    let results = suites::bubble_suite(&[(3, 3), (4, 4)], &cells, DEFAULT_PREC).unwrap();
    // dimensions 44 and 104; complex dims 12 -> 44 -> 32 -> 0 and 30 -> 104 -> 80 -> 6
    let d3 = results
        .iter()
        .find(|r| r.tag == "bubble/space" && r.params.starts_with("l=3"))
        .unwrap();
    assert_eq!(d3.metrics["dim"], "44");
    let d4 = results
        .iter()
        .find(|r| r.tag == "bubble/space" && r.params.starts_with("l=4"))
        .unwrap();
    assert_eq!(d4.metrics["dim"], "104");
    let c3 = results
        .iter()
        .find(|r| r.tag == "bubble/complex3d" && r.params.starts_with("l=3"))
        .unwrap();
    assert!(c3.notes.contains("[12, 44, 32, 0]"), "{}", c3.notes);
    let c4 = results
        .iter()
        .find(|r| r.tag == "bubble/complex3d" && r.params.starts_with("l=4"))
        .unwrap();
    assert!(c4.notes.contains("[30, 104, 80, 6]"), "{}", c4.notes);
    finish("7+8 (bubble space and complexes)", &results);
}

#[test]
fn criterion_09_global_complex() {
    let t0 = std::time::Instant::now();
    let meshes = [
        Mesh::builtin("single_tet").unwrap(),
        Mesh::builtin("two_tets").unwrap(),
        Mesh::builtin("cube6").unwrap(),
    ];
    let results = suites::mesh_suite(&meshes, 3, 3, DEFAULT_PREC).unwrap();
    let two = results
        .iter()
        .find(|r| r.params.contains("two_tets"))
        .unwrap();
    assert!(two.notes.contains("[264, 449, 197, 8]"), "{}", two.notes);
    assert_eq!(two.metrics["alternating_sum"], "4");
    finish("9 (global complex)", &results);
    println!("  elapsed {:?} (budget 600 s)", t0.elapsed());
    assert!(t0.elapsed().as_secs() < 600);
}

#[test]
fn criterion_10_identity_suite() {
    let mut results = suites::identities_suite(20, 0).unwrap();
    // vanishing-DOF consequences ride along with the identity suite
    results.extend(suites::vanishing_dof_suite(3, 3, 0, DEFAULT_PREC).unwrap());
    finish("10 (pointwise identities)", &results);
}

#[test]
fn dual_bases_biorthogonal() {
    let cells = [CellSpec::Reference];
    for (kind, l, k) in [
        (ElementKind::Hermite3d, 3, 3),
        (ElementKind::DivDiv3d, 3, 3),
        (ElementKind::SymCurl3d, 3, 3),
    ] {
        let rs = suites::dualbasis_suite(kind, l, k, &cells, DEFAULT_PREC).unwrap();
        for r in &rs {
            assert!(r.pass, "{} {} {:?}", r.tag, r.params, r.metrics);
        }
    }
}

#[test]
fn global_dimension_formulas_at_44() {
    for name in ["single_tet", "two_tets", "cube6"] {
        let mesh = Mesh::builtin(name).unwrap();
        for kind in [
            divdivlab_core::meshfem::SpaceKind::Vh,
            divdivlab_core::meshfem::SpaceKind::SigmaT,
            divdivlab_core::meshfem::SpaceKind::SigmaS,
            divdivlab_core::meshfem::SpaceKind::Qh,
        ] {
            let r = suites::dims_table(kind, &mesh, 4, 4, DEFAULT_PREC).unwrap();
            assert!(r.pass, "{} {} {:?}", r.tag, r.params, r.metrics);
        }
    }
}

#[test]
fn global_complex_survives_cell_vertex_permutations() {
    // the same two-tet mesh with scrambled per-cell vertex orders must
    // glue identically: frames and charts come from global entities only
    let verts = |m: &Mesh| m.verts.clone();
    let base = Mesh::builtin("two_tets").unwrap();
    let scrambled = Mesh::new(
        "two_tets_scrambled",
        verts(&base),
        vec![[3, 1, 0, 2], [4, 3, 2, 1]],
    )
    .unwrap();
    let rep = divdivlab_core::meshfem::verify_global_complex(&scrambled, 3, 3, DEFAULT_PREC).unwrap();
    assert_eq!(rep.dims, vec![264, 449, 197, 8]);
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn builtin_complex_list_and_remix() {
    assert!(builtin_complexes().len() >= 8);
    let rep = divdivlab_core::complexlab::verify_complex_remixed(ComplexId::Koszul2d, 3, 7).unwrap();
    assert!(rep.pass);
}
