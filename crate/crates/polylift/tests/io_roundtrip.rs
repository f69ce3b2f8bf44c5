use polylift::format::{
    self, BandsFile, ChainFile, GridChainFile, GridFile, MatrixFile, PolyFile, SignalFile,
};
use polylift::generate;
use polylift_core::filterbank::{self, BankOptions, Boundary, Signal};
use polylift_core::gridfun::{iterate_factorization, GridMatrix};
use polylift_core::liftfactor::{factor_2x2, verify_chain, ChainReport, LiftingChain, DEFAULT_TOL};
use polylift_core::polymat::{LiftingStep, PolyMatrix};
use polylift_core::{Complex64, Degree, LaurentPoly};
use proptest::prelude::*;

fn through_json<T: serde::Serialize + serde::de::DeserializeOwned>(v: &T) -> T {
    serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(re, im)| Complex64::new(re, im))
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    (-4i64..4, prop::collection::vec(complex(), 0..6)).prop_map(|(e, cs)| LaurentPoly::with_tol(e, cs, 0.0))
}

proptest! {
    #[test]
    fn poly_json_is_exact(p in poly()) {
        let back = LaurentPoly::try_from(&through_json(&PolyFile::from(&p))).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn matrix_json_is_exact(entries in prop::collection::vec(poly(), 9)) {
        let a = PolyMatrix::new(3, entries).unwrap();
        let back = PolyMatrix::try_from(&through_json(&MatrixFile::from(&a))).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn steps_json_are_exact(lo in prop::collection::vec(poly(), 2), up in poly(), k in complex(), l in -5i64..5) {
        let steps = vec![
            LiftingStep::lower(lo),
            LiftingStep::Upper { offset: 2, polys: vec![up] },
            LiftingStep::DiagonalScale(k),
            LiftingStep::MonomialShift(l),
        ];
        let chain = LiftingChain { n: 3, steps, residual: PolyMatrix::identity(3) };
        let report = ChainReport {
            max_coeff_err: 1.5e-17,
            degree_profile: vec![Degree::Finite(3), Degree::NegInfinity],
            max_det_defect: 0.0,
            passed: true,
        };
        let f = through_json(&ChainFile::new(&chain, Some(&report)));
        prop_assert_eq!(f.chain().unwrap(), chain);
        prop_assert_eq!(f.report().unwrap(), report);
    }

    #[test]
    fn signal_json_and_binary_are_exact(xs in prop::collection::vec(complex(), 0..64)) {
        let s = Signal::new(xs);
        prop_assert_eq!(Signal::try_from(&through_json(&SignalFile::from(&s))).unwrap(), s.clone());
        prop_assert_eq!(format::signal_from_bytes(&format::signal_to_bytes(&s)).unwrap(), s);
    }
}

#[test]
fn factored_chain_file_round_trip() {
    let (a, _) = generate::sl_matrix(2, 5, 4, 11).unwrap();
    let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
    let report = verify_chain(&chain, &a, DEFAULT_TOL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    format::write_json(&path, &ChainFile::new(&chain, Some(&report))).unwrap();
    let (back, back_report) = format::read_chain(&path).unwrap();
    assert_eq!(back, chain);
    assert_eq!(back_report.unwrap(), report);
}

#[test]
fn grid_files_round_trip() {
    let g = generate::sl_grid(2, 4, 3, 64, 5).unwrap();
    let back = GridMatrix::try_from(&through_json(&GridFile::from(&g))).unwrap();
    assert_eq!(back, g);

    let f = iterate_factorization(&g, 8, DEFAULT_TOL).unwrap();
    let file = through_json(&GridChainFile::from(&f));
    assert_eq!(file, GridChainFile::from(&f));
    let steps = file.steps().unwrap();
    assert_eq!(steps, f.steps);
    assert_eq!(file.product().unwrap(), f.product().unwrap());
}

#[test]
fn bands_file_round_trip() {
    let (_, steps) = generate::sl_matrix(3, 3, 2, 2).unwrap();
    let chain = LiftingChain { n: 3, steps, residual: PolyMatrix::identity(3) };
    let x = generate::signal(50, true, 4);
    let opts = BankOptions { boundary: Boundary::Zero, ..Default::default() };
    let b = filterbank::analyze(&chain, &x, opts).unwrap();
    let file = through_json(&BandsFile::new(&b, Boundary::Zero));
    assert_eq!(file.band_set().unwrap(), b);
    assert_eq!(Boundary::from(file.boundary), Boundary::Zero);
}

#[test]
fn binary_signal_files_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate::signal(33, true, 9);
    for name in ["x.bin", "x.f64", "x.json"] {
        let path = dir.path().join(name);
        format::write_signal(&path, &x).unwrap();
        assert_eq!(format::read_signal(&path).unwrap(), x);
    }
    assert_eq!(std::fs::metadata(dir.path().join("x.bin")).unwrap().len(), 33 * 16);
}

#[test]
fn malformed_inputs_are_rejected() {
    let ragged = r#"{"n": 2, "entries": [[{"min_exp": 0, "coeffs": [[1, 0]]}]]}"#;
    let f: MatrixFile = serde_json::from_str(ragged).unwrap();
    assert!(PolyMatrix::try_from(&f).is_err());

    let short = GridFile { n: 2, m: 3, entries: vec![vec![vec![[1.0, 0.0]; 3], vec![[0.0, 0.0]; 2]]; 2] };
    assert!(GridMatrix::try_from(&short).is_err());

    assert!(format::signal_from_bytes(&[0u8; 17]).is_err());
    assert!(serde_json::from_str::<ChainFile>(r#"{"n":2,"steps":[{"kind":"sideways","params":1}],"residual":{"n":2,"entries":[]}}"#).is_err());
}
