//! End-to-end checks on the example files in `data/`.

use std::path::PathBuf;

use num_bigint::BigInt;
use sattile::addressmap::{expansion_on_j, stabilized_address_map, verify_m_properties, DEFAULT_K_MAX};
use sattile::boundary::{boundary_curve, check_compatibility};
use sattile::expansion::{build_companion_witness, check_growth_condition, check_theorem_condition, eigen_data};
use sattile::files::{parse_boundary, parse_expansion, parse_rule};
use sattile::numbers::{IntMatrix, IntPoly};
use sattile::substitution::{
    control_points, expand_patch, perron_frobenius, subdivision_matrix, verify_control_invariance, volume_consistency,
    Patch,
};
use sattile::Error;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn verdict(name: &str) -> bool {
    let spec = eigen_data(&parse_expansion(&data(name)).unwrap()).unwrap();
    check_theorem_condition(&spec).unwrap().pass
}

#[test]
fn expansion_verdicts() {
    for (f, want) in [
        ("diag-3pm-sqrt2.json", true),
        ("sqrt2.json", false),
        ("diag-sqrt2-negsqrt2.json", true),
        ("diag-sqrt2-sqrt2-negsqrt2.json", false),
        ("cubic-complex-expansion.json", true),
        ("cubic-real-expansion.json", true),
        ("golden.json", true),
    ] {
        assert_eq!(verdict(f), want, "{f}");
        let spec = eigen_data(&parse_expansion(&data(f)).unwrap()).unwrap();
        let m = build_companion_witness(&spec).unwrap();
        let w = check_growth_condition(&m, &spec).unwrap();
        assert_eq!(w.strict_max, want, "witness {f}");
    }
}

#[test]
fn jordan_block_is_a_precondition_error() {
    let e = eigen_data(&parse_expansion(&data("jordan.json")).unwrap()).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)), "{e}");
}

#[test]
fn cubic_real_rule() {
    let r = parse_rule(&data("cubic-real-rule.json")).unwrap();
    assert_eq!(subdivision_matrix(&r), IntMatrix::from_i64(&[&[0, 1, 1], &[0, 4, 1], &[3, 0, 0]]));
    let v = volume_consistency(&r).unwrap();
    assert!(v.consistent, "{v:?}");
    // x1 x2 x3 = -3, so |x1 x2| = 3 / |x3|
    let x3 = 0.7135379349683993_f64;
    assert!((v.pf_eigenvalue - 3.0 / x3).abs() < 1e-9);
    assert!(check_theorem_condition(&r.spectrum().unwrap()).unwrap().pass);
    assert!(verify_control_invariance(&r, 3).unwrap());
    let p = expand_patch(&r, &Patch::seed(&r, 0), 0).unwrap();
    assert_eq!(p, Patch::seed(&r, 0));
}

#[test]
fn cubic_complex_rule() {
    let r = parse_rule(&data("cubic-complex-rule.json")).unwrap();
    let m = subdivision_matrix(&r);
    assert_eq!(m, IntMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 1]]));
    let pf = perron_frobenius(&m).unwrap();
    assert!(pf.simple && pf.strictly_dominant);
    let v = volume_consistency(&r).unwrap();
    assert!(v.consistent, "{v:?}");
    assert!((v.pf_eigenvalue - 1.4655712318767684).abs() < 1e-9);
    assert!(verify_control_invariance(&r, 4).unwrap());
}

#[test]
fn fibonacci_address_map() {
    let r = parse_rule(&data("fibonacci.json")).unwrap();
    let cps = control_points(&r).unwrap();
    assert_eq!(cps.len(), 2);
    let map = stabilized_address_map(&r, DEFAULT_K_MAX).unwrap();
    assert_eq!(map.basis.rank(), 2);
    let e = expansion_on_j(&map, r.expansion()).unwrap();
    assert_eq!(e.m, IntMatrix::from_i64(&[&[0, 1], &[1, 1]]));
    assert!(e.phi_v_equals_v_m && e.address_equivariant);
    let rep = verify_m_properties(&r, &map, &e, &r.spectrum().unwrap()).unwrap();
    assert_eq!(rep.char_poly, IntPoly::from_i64(&[-1, -1, 1]));
    assert!(rep.diagonalizable && rep.divisibility);
}

#[test]
fn unit_square_address_map() {
    let r = parse_rule(&data("unit-square.json")).unwrap();
    assert!(volume_consistency(&r).unwrap().consistent);
    let map = stabilized_address_map(&r, DEFAULT_K_MAX).unwrap();
    assert_eq!(map.basis.rank(), 2);
    let e = expansion_on_j(&map, r.expansion()).unwrap();
    assert_eq!(e.m, IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));
}

#[test]
fn cubic_complex_address_map() {
    let r = parse_rule(&data("cubic-complex-rule.json")).unwrap();
    let map = stabilized_address_map(&r, DEFAULT_K_MAX).unwrap();
    assert_eq!(map.basis.rank(), 3);
    let e = expansion_on_j(&map, r.expansion()).unwrap();
    assert!(e.phi_v_equals_v_m && e.address_equivariant);
    let rep = verify_m_properties(&r, &map, &e, &r.spectrum().unwrap()).unwrap();
    assert_eq!(rep.char_poly, IntPoly::from_i64(&[1, 1, 0, 1]));
}

#[test]
fn cubic_real_address_map() {
    let r = parse_rule(&data("cubic-real-rule.json")).unwrap();
    let map = stabilized_address_map(&r, DEFAULT_K_MAX).unwrap();
    let e = expansion_on_j(&map, r.expansion()).unwrap();
    assert!(e.phi_v_equals_v_m && e.address_equivariant);
    let rep = verify_m_properties(&r, &map, &e, &r.spectrum().unwrap()).unwrap();
    assert!(rep.divisibility, "{:?}", rep.char_poly);
    assert!(rep.diagonalizable);
    let origin = r.zero_vector();
    assert_eq!(map.address(&origin), Some(vec![BigInt::from(0); map.basis.rank()]));
}

#[test]
fn boundary_files_close() {
    for (f, iters) in [("cubic-complex-boundary.json", 8), ("cubic-real-boundary.json", 6)] {
        let b = parse_boundary(&data(f)).unwrap();
        assert!(check_compatibility(&b.assignment, &b.endomorphism), "{f}");
        assert_eq!(b.words.len(), 3);
        for (name, w) in &b.words {
            let c = boundary_curve(&b.assignment, &b.endomorphism, w, iters).unwrap();
            assert!(c.closed, "{f} {name}");
            assert_eq!(c.points.first(), c.points.last());
        }
    }
}
