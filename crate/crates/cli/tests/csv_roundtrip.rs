use proptest::prelude::*;
use szego_cli::output::{float, int};
use szego_cli::{read_csv, write_csv, Table};

proptest! {
    #[test]
    fn floats_round_trip_bit_exactly(values in prop::collection::vec(
        prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), Just(-0.0), Just(f64::MIN_POSITIVE / 3.0)],
        1..40,
    )) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut table = Table::new(&["k", "x"]);
        for (k, x) in values.iter().enumerate() {
            table.push(vec![int(k), float(*x)]);
        }
        write_csv(&path, &table).unwrap();
        let back = read_csv(&path).unwrap();
        prop_assert_eq!(&back, &table);
        let parsed = back.column("x").unwrap();
        for (a, b) in values.iter().zip(&parsed) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn format_is_header_plus_lf_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let mut table = Table::new(&["t", "status"]);
    table.push(vec![float(0.1), "ok".into()]);
    table.push(vec![float(-2.5e-300), String::new()]);
    write_csv(&path, &table).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text, "t,status\n1.0000000000000001e-1,ok\n-2.5000000000000000e-300,\n");
}
