use ncmetric_cli::dispatch::{closed_form, compute, MethodChoice};
use ncmetric_cli::document::TripleDocument;
use ncmetric_cli::run;
use ncmetric_commutative::{commutative_triple, four_point_special, three_point_distance};
use ncmetric_oracle::OracleOptions;
use ncmetric_triple::{evaluate_state, PureState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_commands");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn ok(args: &[&str]) -> String {
    let mut full = vec!["ncmetric"];
    full.extend_from_slice(args);
    let (code, out, err) = run(full);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

fn code(args: &[&str]) -> (i32, String) {
    let mut full = vec!["ncmetric"];
    full.extend_from_slice(args);
    let (code, _, err) = run(full);
    (code, err)
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
}

fn value(out: &str) -> f64 {
    let v = field(out, "distance");
    if v == "inf" {
        f64::INFINITY
    } else {
        v.parse().unwrap()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn distance_examples() {
    let out = ok(&["distance", &fixture("two_point.json"), "a", "b"]);
    assert_eq!(field(&out, "distance"), "1.0");
    assert_eq!(field(&out, "method"), "closed-form:two-point");
    let out = ok(&["distance", &fixture("two_point.json"), "b", "b"]);
    assert_eq!(field(&out, "distance"), "0.0");
    let out = ok(&["distance", &fixture("m2_sphere.json"), "north", "east"]);
    assert_eq!(field(&out, "distance"), "inf");
    assert_eq!(field(&out, "method"), "kernel-test");
    let out = ok(&["distance", &fixture("m2_sphere.json"), "east", "west"]);
    assert_eq!(field(&out, "distance"), "2.0");
    assert_eq!(field(&out, "method"), "closed-form:m2-sphere");
}

#[test]
fn witness_is_printed_and_certifies_the_value() {
    let out = ok(&["distance", &fixture("m2_sphere.json"), "east", "west", "--witness"]);
    assert!(field(&out, "witness").starts_with("[["));
    let doc = TripleDocument::from_json(&std::fs::read_to_string(fixture("two_point_matrix.json")).unwrap())
        .unwrap()
        .load()
        .unwrap();
    let (s1, s2) = (doc.state("mix").unwrap(), doc.state("c").unwrap());
    let d = compute(&doc.triple, s1, s2, MethodChoice::Auto, &OracleOptions::default(), true).unwrap();
    let w = d.distance.witness.expect("witness");
    let gap = (evaluate_state(s1, &w) - evaluate_state(s2, &w)).re.abs();
    assert!(doc.triple.commutator_norm(&w).unwrap() <= 1.0 + 1e-6);
    assert!(close(gap, d.distance.value, 1e-5), "{gap} vs {}", d.distance.value);
}

#[test]
fn closed_form_and_oracle_agree_on_fixtures() {
    let cases = [
        ("two_point.json", "a", "b"),
        ("m2_sphere.json", "east", "west"),
        ("m2_sphere.json", "north", "tilted"),
        ("regular4.json", "1", "3"),
        ("cycle4.json", "1", "2"),
        ("cycle4.json", "2", "4"),
        ("two_point_matrix.json", "e1", "e2"),
        ("two_point_matrix.json", "mix", "c"),
        ("two_point_matrix.json", "e1", "c"),
    ];
    for (file, a, b) in cases {
        let cf = value(&ok(&["distance", &fixture(file), a, b, "--method", "closed-form"]));
        let or = value(&ok(&["distance", &fixture(file), a, b, "--method", "oracle"]));
        assert!(close(cf, or, 1e-4), "{file} ({a},{b}): closed form {cf} vs oracle {or}");
    }
}

#[test]
fn closed_form_refused_where_none_applies() {
    let path = scratch("five_points.json");
    std::fs::write(&path, r#"{"lengths": [[0,1,2,"inf",1],[1,0,1,1,"inf"],[2,1,0,3,1],["inf",1,3,0,2],[1,"inf",1,2,0]]}"#).unwrap();
    let (c, err) = code(&["distance", path.to_str().unwrap(), "1", "4", "--method", "closed-form"]);
    assert_eq!(c, 5, "{err}");
    let out = ok(&["distance", path.to_str().unwrap(), "1", "4"]);
    assert_eq!(field(&out, "method"), "oracle");
}

#[test]
fn four_cycle_with_negative_sign_is_left_to_the_oracle() {
    let doc = TripleDocument::from_json(r#"{"algebra":["C","C","C","C"],"slots":[{"block":0,"mode":"scalar"},{"block":1,"mode":"scalar"},{"block":2,"mode":"scalar"},{"block":3,"mode":"scalar"}],
        "dirac":[[0,1,0,1],[1,0,1,0],[0,1,0,-1],[1,0,-1,0]],"states":{"p":{"block":0},"q":{"block":1}}}"#)
    .unwrap()
    .load()
    .unwrap();
    assert!(closed_form(&doc.triple, doc.state("p").unwrap(), doc.state("q").unwrap()).is_none());
}

#[test]
fn matrix_examples() {
    let out = ok(&["matrix", &fixture("regular4.json")]);
    let rows: Vec<&str> = out.lines().skip(1).take(4).collect();
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<f64> = r.split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
        for (j, v) in cells.iter().enumerate() {
            let want = if i == j { 0.0 } else { 0.5f64.sqrt() };
            assert!((v - want).abs() < 1e-15);
        }
    }
    let s = four_point_special(1.0, 1.0, 1.0, 1.0).unwrap();
    let out = ok(&["matrix", &fixture("cycle4.json"), "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], ",1,2,3,4");
    let row1: Vec<f64> = lines[1].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(row1[1], s.d12);
    assert_eq!(row1[2], s.d13);
    assert_eq!(row1[3], s.d12);
}

#[test]
fn matrix_csv_mask_and_parallel() {
    let (out, mask) = (scratch("m.csv"), scratch("m.mask.csv"));
    let serial = ok(&["matrix", &fixture("two_point_matrix.json"), "--format", "csv", "--method", "oracle"]);
    ok(&[
        "matrix",
        &fixture("two_point_matrix.json"),
        "--format",
        "csv",
        "--method",
        "oracle",
        "--parallel",
        "3",
        "--output",
        out.to_str().unwrap(),
        "--mask",
        mask.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), serial);
    assert!(serial.lines().nth(1).unwrap().ends_with(",,"), "{serial}");
    let m = std::fs::read_to_string(&mask).unwrap();
    assert_eq!(m.lines().nth(1).unwrap(), "e1,0,0,1,1");
    assert_eq!(m.lines().nth(4).unwrap(), "c,1,1,0,0");
}

#[test]
fn output_is_reproducible_for_a_seed() {
    let args = ["matrix", &fixture("cycle4.json"), "--method", "oracle", "--seed", "11"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn empty_state_list() {
    let path = scratch("empty.json");
    std::fs::write(&path, r#"{"algebra":["C","C"],"slots":[{"block":0,"mode":"scalar"},{"block":1,"mode":"scalar"}],"dirac":[[0,1],[1,0]]}"#).unwrap();
    assert_eq!(code(&["matrix", path.to_str().unwrap()]).0, 3);
    assert_eq!(code(&["distance", &fixture("two_point.json"), "a", "nope"]).0, 3);
}

#[test]
fn parse_errors_carry_locations() {
    let path = scratch("broken.json");
    std::fs::write(&path, "{\n  \"algebra\": [\"C\", \"C\"],\n  \"slots\": [\n").unwrap();
    let (c, err) = code(&["distance", path.to_str().unwrap(), "a", "b"]);
    assert_eq!(c, 2);
    assert!(err.contains("line 4"), "{err}");
    let bad = [
        r#"{"algebra":["C","C"],"slots":[{"block":0,"mode":"scalar"},{"block":1,"mode":"scalar"}],"dirac":[[0,"inf"],["inf",0]]}"#,
        r#"{"algebra":["X"],"slots":[{"block":0,"mode":"scalar"}],"dirac":[[0]]}"#,
        r#"{"algebra":["C","C"],"slots":[{"block":0,"mode":"scalar"},{"block":1,"mode":"scalar"}],"dirac":[[0,1],[2,0]]}"#,
        r#"{"algebra":["C","C"],"slots":[{"block":0,"mode":"scalar"},{"block":1,"mode":"scalar"}],"dirac":[[0,1],[1,0]],"grading":[1,1]}"#,
        r#"{"algebra":["M2"],"slots":[{"block":0,"mode":"fundamental"}],"dirac":[[0,0],[0,0]],"states":{"x":{"block":0,"vector":[0,0]}}}"#,
        r#"{"lengths":[[0,1],[1,0]],"dirac":[[0,1],[1,0]]}"#,
    ];
    for (k, text) in bad.iter().enumerate() {
        let p = scratch(&format!("bad{k}.json"));
        std::fs::write(&p, text).unwrap();
        let (c, err) = code(&["matrix", p.to_str().unwrap()]);
        assert_eq!(c, 2, "case {k}: {err}");
    }
}

#[test]
fn invert3_examples() {
    let out = ok(&["invert3", "1", "1", "1"]);
    for line in out.lines() {
        let v: f64 = line.split(" = ").nth(1).unwrap().parse().unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-12, "{line}");
    }
    let (c, err) = code(&["invert3", "3", "1", "1"]);
    assert_eq!(c, 4);
    assert!(err.contains("d(1,3)² + d(2,3)² ≥ d(1,2)²"), "{err}");
    let out = ok(&["invert3", "1", "1", &2f64.sqrt().to_string()]);
    assert!(out.lines().nth(2).unwrap().contains("deleted-link"), "{out}");
    assert_eq!(code(&["invert3", "-1", "1", "1"]).0, 1);
}

#[test]
fn realize_examples() {
    let (csv, doc) = (scratch("two.csv"), scratch("two.json"));
    std::fs::write(&csv, "0,2\n2,0\n").unwrap();
    ok(&["realize", csv.to_str().unwrap(), "--output", doc.to_str().unwrap()]);
    assert!(close(value(&ok(&["distance", doc.to_str().unwrap(), "1", "2"])), 2.0, 1e-6));
    std::fs::write(&csv, "0,1,1\n1,0,1\n1,1,0\n").unwrap();
    ok(&["realize", csv.to_str().unwrap(), "--output", doc.to_str().unwrap()]);
    for (a, b) in [("1", "2"), ("1", "3"), ("2", "3")] {
        assert!(close(value(&ok(&["distance", doc.to_str().unwrap(), a, b])), 1.0, 1e-3));
    }
    std::fs::write(&csv, "0,1,inf\n1,0,inf\ninf,inf,0\n").unwrap();
    let printed = ok(&["realize", csv.to_str().unwrap()]);
    std::fs::write(&doc, printed).unwrap();
    assert!(value(&ok(&["distance", doc.to_str().unwrap(), "1", "3"])).is_infinite());
    std::fs::write(&csv, "0,1,3\n1,0,1\n3,1,0\n").unwrap();
    assert_eq!(code(&["realize", csv.to_str().unwrap()]).0, 4);
    std::fs::write(&csv, "0,1\n2,0\n").unwrap();
    assert_eq!(code(&["realize", csv.to_str().unwrap()]).0, 2);
    std::fs::write(&csv, "0,x\nx,0\n").unwrap();
    let (c, err) = code(&["realize", csv.to_str().unwrap()]);
    assert_eq!(c, 2);
    assert!(err.contains("row 1 column 2"), "{err}");
}

#[test]
fn sm_examples() {
    let out = ok(&["sm", &fixture("sm_unit.json"), "0", "0"]);
    assert_eq!(field(&out, "gtt"), "1.0");
    assert_eq!(field(&out, "distance"), "1.0");
    let out = ok(&["sm", &fixture("sm_unit.json"), "-1", "0"]);
    assert_eq!(field(&out, "distance"), "inf");
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let h1 = format!("{},{}", rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let h2 = format!("{},{}", rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let out = ok(&["sm", &fixture("sm_three.json"), &h1, &h2, "--verify"]);
        let residual: f64 = field(&out, "residual").parse().unwrap();
        assert!(residual <= 1e-10, "{out}");
    }
    assert_eq!(code(&["sm", &fixture("sm_unit.json"), "1,2,3", "0"]).0, 2);
}

#[test]
fn graph_output() {
    let out = ok(&["graph", &fixture("cycle4.json")]);
    assert!(out.contains("1-2  length 1.0"));
    assert!(out.contains("  0.0 1.0 2.0 1.0"));
    assert_eq!(code(&["graph", &fixture("m2_sphere.json")]).0, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ncmetric");
    let st = std::process::Command::new(bin).args(["invert3", "3", "1", "1"]).output().unwrap();
    assert_eq!(st.status.code(), Some(4));
    let st = std::process::Command::new(bin).args(["distance", &fixture("two_point.json"), "a", "b"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).starts_with("distance: 1.0\n"));
    let st = std::process::Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn documents_round_trip(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cs = vec![];
        for i in 0..n {
            for j in i + 1..n {
                cs.push((i, j, rng.gen_range(-2.0..2.0)));
            }
        }
        let t = commutative_triple(n, &cs).unwrap();
        let states: Vec<(String, PureState)> = (0..n).map(|i| (format!("p{i}"), PureState::canonical(i))).collect();
        let text = TripleDocument::from_triple(&t, &states).to_json();
        let back = TripleDocument::from_json(&text).unwrap().load().unwrap();
        prop_assert_eq!(back.triple.dirac.to_complex().max_diff(&t.dirac.to_complex()), 0.0);
        prop_assert_eq!(back.states, states);
    }

    #[test]
    fn three_point_documents_dispatch_to_the_closed_form(k12 in 0.1f64..2.0, k13 in 0.1f64..2.0, k23 in 0.1f64..2.0) {
        let t = commutative_triple(3, &[(0, 1, k12), (0, 2, k13), (1, 2, k23)]).unwrap();
        let (d, name) = closed_form(&t, &PureState::canonical(2), &PureState::canonical(1)).unwrap();
        prop_assert_eq!(name, "closed-form:three-point");
        prop_assert!((d.value - three_point_distance(k23, k13, k12).value).abs() < 1e-14);
    }
}
