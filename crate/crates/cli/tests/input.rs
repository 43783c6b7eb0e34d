use szego_cli::{parse_input, parse_input_str, CliError, InputData};
use szego_core::{HardyFunction, SzegoError, C64};

fn pointer(err: CliError) -> String {
    match err {
        CliError::Schema { pointer, .. } | CliError::Invalid { pointer, .. } => pointer,
        other => panic!("expected a located error, got {other:?}"),
    }
}

#[test]
fn coefficient_datum() {
    let data = parse_input_str(r#"{"coeffs": [[0.5,0],[1,0]]}"#).unwrap();
    assert_eq!(data, InputData::Coeffs(HardyFunction::from_real(&[0.5, 1.0]).unwrap()));
}

#[test]
fn rational_datum_matches_coefficients() {
    let data = parse_input_str(r#"{"rational": {"A": [[0.5,0],[1,0]], "B": [[1,0]], "d": 3}}"#).unwrap();
    assert!(matches!(data, InputData::Rational(_)));
    let u = data.coefficients(64);
    assert_eq!(u.len(), 64);
    assert_eq!(u.coeff(0), C64::new(0.5, 0.0));
    assert_eq!(u.coeff(1), C64::new(1.0, 0.0));
    assert!(u.coeffs()[2..].iter().all(|c| c.norm() == 0.0));
}

#[test]
fn geometric_symbol_is_rank_two() {
    // b/(1 − p e^{ix}) has rk H = rk K = 1, the pattern of V(2); d = 1 is
    // the nonzero constants
    let d1 = parse_input_str(r#"{"rational": {"A": [[1,0]], "B": [[1,0],[-0.5,0]], "d": 1}}"#).unwrap_err();
    assert!(matches!(d1, CliError::Invalid { source: SzegoError::DegreePattern { d: 1, .. }, .. }));
    assert_eq!(pointer(d1), "/rational");

    let d2 = parse_input_str(r#"{"rational": {"A": [[1,0]], "B": [[1,0],[-0.5,0]], "d": 2}}"#).unwrap();
    let u = d2.coefficients(64);
    for k in 0..10 {
        assert!((u.coeff(k) - C64::new(0.5f64.powi(k as i32), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn structural_errors_carry_pointers() {
    let cases = [
        (r#"[1, 2]"#, ""),
        (r#"{}"#, ""),
        (r#"{"coeffs": [[1,0]], "rational": {}}"#, ""),
        (r#"{"coeffs": [[1,0]], "extra": 1}"#, "/extra"),
        (r#"{"coeffs": {"re": 1}}"#, "/coeffs"),
        (r#"{"coeffs": [[1,0],[2]]}"#, "/coeffs/1"),
        (r#"{"coeffs": [[1,0],[2,"x"]]}"#, "/coeffs/1/1"),
        (r#"{"rational": {"A": [[1,0]], "B": [[1,0]]}}"#, "/rational"),
        (r#"{"rational": {"A": [[1,0]], "B": [[1,0]], "d": -1}}"#, "/rational/d"),
        (r#"{"rational": {"A": [[1,0]], "B": [[1,0]], "d": 1.5}}"#, "/rational/d"),
        (r#"{"rational": {"A": [[1,0]], "B": [[1,0],[-0.5,0]], "d": 2, "a/b": 0}}"#, "/rational/a~1b"),
        (r#"{"rational": {"A": [[1,0]], "B": [[2,0]], "d": 1}}"#, "/rational"),
        (r#"{"coeffs": []}"#, "/coeffs"),
    ];
    for (text, expected) in cases {
        let err = parse_input_str(text).unwrap_err();
        assert_eq!(err.exit_code(), szego_cli::exit::INPUT, "{text}");
        assert_eq!(pointer(err), expected, "{text}");
    }
}

#[test]
fn syntax_errors_carry_line_and_column() {
    match parse_input_str("{\n  \"coeffs\": [[1, 0],\n}") {
        Err(CliError::Json { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a JSON error, got {other:?}"),
    }
}

#[test]
fn files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    std::fs::write(&path, r#"{"coeffs": [[0,0],[1,0]]}"#).unwrap();
    assert!(matches!(parse_input(&path).unwrap(), InputData::Coeffs(_)));
    let missing = parse_input(&dir.path().join("none.json")).unwrap_err();
    assert!(matches!(missing, CliError::Read { .. }));
    assert_eq!(missing.exit_code(), szego_cli::exit::INPUT);
}

#[test]
fn random_data_are_normalized_and_reproducible() {
    for seed in 0..20 {
        let data = szego_cli::random_datum(seed);
        assert_eq!(data, szego_cli::random_datum(seed));
        let InputData::Rational(r) = &data else { panic!("expected a rational datum") };
        assert!(matches!(r.rank_index(), 3 | 4));
        assert!(r.decay_rate() <= 0.7 + 1e-12);
        assert!((data.coefficients(64).norm_l2() - 1.0).abs() < 1e-10);
    }
}
