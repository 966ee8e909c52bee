use num_bigint::BigInt;
use num_rational::BigRational;

use grassdual::certificates::{
    build_and_verify, build_corank, certificate_ids, checksum, embedded_checksums, export, import, load, parse,
    verify, verify_certificate, CertificateKind,
};
use grassdual::exterior::chart_var;
use grassdual::hessian::{array_from_hessian, HessianMatrix};
use grassdual::node::{
    check_node_pair, complete_node_pair, cusp_membership, generic_node_membership, k4_partner, verify_k4_tuple,
};
use grassdual::ring::Integers;
use grassdual::Error;

#[test]
fn every_embedded_certificate_passes() {
    for id in certificate_ids() {
        let r = verify(id, 0).unwrap();
        assert!(r.pass, "{id}: {:?}", r.checks);
        assert_eq!(r.checksum, embedded_checksums()[id]);
    }
}

#[test]
fn verification_is_reproducible() {
    let a = serde_json::to_string(&verify("node-3-11", 5).unwrap()).unwrap();
    let b = serde_json::to_string(&verify("node-3-11", 5).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn export_import_roundtrip() {
    let dir = std::env::temp_dir().join(format!("grassdual-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for id in certificate_ids() {
        let c = load(id).unwrap();
        let path = dir.join(format!("{id}.json"));
        export(&c, &path).unwrap();
        let back = import(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(checksum(&back), checksum(&c));
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn wrong_row_length_is_a_dimension_error() {
    let mut c = load("corank-3-10").unwrap();
    c.blocks.get_mut("A23").unwrap()[4].push(0);
    let text = serde_json::to_string(&c).unwrap();
    let parsed = parse(&text);
    let err = parsed.and_then(|c| c.hessian().map(|_| ())).unwrap_err();
    assert!(matches!(err, Error::Dimension(ref m) if m.contains("A23 row 5")), "{err}");
}

#[test]
fn perturbed_corank_certificate_fails() {
    let mut c = load("corank-3-9").unwrap();
    c.id = "corank-3-9-perturbed".into();
    c.blocks.get_mut("A12").unwrap()[0][0] += 1;
    let r = verify_certificate(&c, 0).unwrap();
    assert!(!r.pass);
}

fn bump(h: &HessianMatrix<BigInt>, (p, t): (usize, usize), (p2, t2): (usize, usize)) -> HessianMatrix<BigInt> {
    let (k, n) = (h.k(), h.n());
    let mut m = h.matrix().clone();
    let (r, c) = (chart_var(k, n, p, t), chart_var(k, n, p2, t2));
    let v = m.get(r, c) + BigInt::from(1);
    m.set(r, c, v.clone());
    m.set(c, r, v.clone());
    let (r2, c2) = (chart_var(k, n, p, t2), chart_var(k, n, p2, t));
    m.set(r2, c2, -v.clone());
    m.set(c2, r2, -v);
    HessianMatrix::from_matrix(k, n, m).unwrap()
}

#[test]
fn changing_a_shared_b_entry_breaks_the_second_condition() {
    let c = load("node-3-10").unwrap();
    let mut pair = complete_node_pair(&c.hessian().unwrap(), 0).unwrap();
    let ok = check_node_pair(&pair).unwrap();
    assert!(ok.pass);
    pair.b = bump(&pair.b, (1, 4), (2, 7));
    pair.b.check_structure(&Integers).unwrap();
    let r = check_node_pair(&pair).unwrap();
    assert!(!r.condition_ii.holds);
    assert!(r.condition_ii.violations[0].starts_with("B_12[1,4]"), "{:?}", r.condition_ii.violations);
    assert!(r.condition_i.holds && r.condition_iii.holds && r.condition_iv.holds);
    assert!(!r.common_array);
    assert!(!r.pass);
}

#[test]
fn k4_tuple_holds_and_detects_perturbation() {
    let h0 = load("invertible-4-8").unwrap().hessian().unwrap();
    let h1 = k4_partner(&h0).unwrap();
    assert!(verify_k4_tuple(&h0, &h1).unwrap());
    let moved = bump(&h0, (1, 7), (2, 8));
    assert!(!verify_k4_tuple(&moved, &h1).unwrap());
}

#[test]
fn corank_certificate_arrays_are_cusp_points() {
    for id in ["corank-3-9", "corank-4-8"] {
        let h = load(id).unwrap().hessian().unwrap();
        let a = array_from_hessian(&Integers, &h).unwrap();
        let q = a.map(|v| BigRational::from_integer(v.clone()));
        assert!(cusp_membership(&q).unwrap(), "{id}");
    }
    let h = load("invertible-4-8").unwrap().hessian().unwrap();
    let a = array_from_hessian(&Integers, &h).unwrap();
    assert!(!cusp_membership(&a.map(|v| BigRational::from_integer(v.clone()))).unwrap());
}

#[test]
fn node_certificate_array_is_a_generic_node_point() {
    let c = load("node-3-9").unwrap();
    assert_eq!(c.kind, CertificateKind::Nodepair);
    let pair = complete_node_pair(&c.hessian().unwrap(), 0).unwrap();
    let a = array_from_hessian(&Integers, &pair.a).unwrap();
    assert!(generic_node_membership(&Integers, &a));
}

#[test]
fn builder_extends_the_embedded_bases() {
    for (k, n) in [(3, 12), (4, 10), (6, 12)] {
        let (built, report) = build_and_verify(k, n, 0).unwrap();
        assert!(report.pass, "({k},{n}) via {:?}: {:?}", built.chain, report.checks);
        assert!(built.chain.len() >= 2);
    }
    assert_eq!(build_corank(3, 8, 0).unwrap_err(), Error::MissingBase { k: 3, n: 8 });
}
