use std::path::PathBuf;
use std::process::Command;

use qsep_cli::{run, ReportDocument, StateDocument};
use qsep_core::states::{random_mixed, seeded_rng, werner};
use qsep_core::{DensityMatrix64, PureState64};

fn qsep(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qsep").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key:?} in\n{text}"))
}

#[test]
fn binary_exit_codes_follow_verdicts() {
    let bin = env!("CARGO_BIN_EXE_qsep");
    let st = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    assert_eq!(
        st(&["analyze", &data("singlet.json")]).status.code(),
        Some(3)
    );
    assert_eq!(
        st(&["analyze", &data("maximally_mixed.json")])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        st(&["werner", "--beta", "0.3333333333333333"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        st(&["analyze", "/nonexistent/state.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn singlet_report() {
    let (code, out, _) = qsep(&["analyze", &data("singlet.json")]);
    assert_eq!(code, 3);
    assert_eq!(field(&out, "verdict"), "entangled");
    let m: f64 = field(&out, "min m_plus").parse().unwrap();
    assert!((m + 1.0).abs() < 1e-9);
    let c: f64 = field(&out, "concurrence").parse().unwrap();
    assert!((c - 1.0).abs() < 1e-7);
}

#[test]
fn werner_half_file_matches_library_state() {
    let (code, out, _) = qsep(&["--json", "analyze", &data("werner_half.json")]);
    assert_eq!(code, 3);
    let doc = ReportDocument::from_json(&out).unwrap();
    assert!((doc.chsh_max - 2f64.sqrt()).abs() < 1e-10);
    let file = StateDocument::load(std::path::Path::new(&data("werner_half.json"))).unwrap();
    let w: DensityMatrix64 = werner(0.5).unwrap();
    let diff = file
        .to_density(1e-9)
        .unwrap()
        .matrix()
        .max_abs_diff(w.matrix())
        .unwrap();
    assert!(diff < 1e-15);
}

#[test]
fn trace_error_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(data("maximally_mixed.json"))
        .unwrap()
        .replace("0.25, 0]", "0.225, 0]");
    let p = write_temp(&dir, "trace.json", &body);
    let (code, out, err) = qsep(&["analyze", &p]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("trace error"), "{err}");
}

#[test]
fn malformed_files_report_position_or_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("short.json", "{\"kind\": \"pure\",\n \"data\": [[1,0],[0,0]]}", "line 2"),
        ("kind.json", "{\"kind\": \"mixed\", \"data\": []}", "unknown variant"),
        ("syntax.json", "{\"kind\": \"pure\", \"data\": [[1,0],", "EOF"),
        ("norm.json", "{\"kind\": \"pure\", \"data\": [[1,0],[1,0],[0,0],[0,0]]}", "normalization error"),
        (
            "herm.json",
            "{\"kind\": \"density\", \"data\": [[[0.25,0],[0.1,0],[0,0],[0,0]],[[0,0],[0.25,0],[0,0],[0,0]],[[0,0],[0,0],[0.25,0],[0,0]],[[0,0],[0,0],[0,0],[0.25,0]]]}",
            "hermiticity error",
        ),
        (
            "pos.json",
            "{\"kind\": \"density\", \"data\": [[[0.75,0],[0,0],[0,0],[0,0]],[[0,0],[-0.25,0],[0,0],[0,0]],[[0,0],[0,0],[0.25,0],[0,0]],[[0,0],[0,0],[0,0],[0.25,0]]]}",
            "positivity error",
        ),
    ];
    for (name, body, needle) in cases {
        let p = write_temp(&dir, name, body);
        let (code, _, err) = qsep(&["analyze", &p]);
        assert_eq!(code, 1, "{name}");
        assert!(err.contains(needle), "{name}: {err}");
    }
}

#[test]
fn report_document_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let rho = random_mixed::<f64, _>(&mut seeded_rng(11, 0), 3).unwrap();
    let body = serde_json::to_string(&StateDocument::from_density(&rho)).unwrap();
    let p = write_temp(&dir, "rho.json", &body);
    let (_, out, _) = qsep(&["--json", "--seed", "9", "analyze", &p]);
    let doc = ReportDocument::from_json(&out).unwrap();
    assert_eq!(doc.seed, 9);
    assert_eq!(doc.config.grid_points_per_angle, 8);
    let again = ReportDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(doc, again);
    // State files written from a matrix reproduce it bit for bit.
    let back = StateDocument::parse(&body)
        .unwrap()
        .to_density(1e-9)
        .unwrap();
    assert_eq!(back.matrix(), rho.matrix());
}

#[test]
fn pure_state_documents_round_trip() {
    let doc = StateDocument::from_pure(&PureState64::singlet());
    let text = serde_json::to_string(&doc).unwrap();
    assert!(text.starts_with("{\"kind\":\"pure\",\"data\":[[0.0,0.0],"));
    assert_eq!(StateDocument::parse(&text).unwrap(), doc);
}

#[test]
fn werner_single_beta() {
    let (code, out, _) = qsep(&["werner", "--beta", "0.5"]);
    assert_eq!(code, 3);
    let chsh: f64 = field(&out, "chsh max").parse().unwrap();
    assert!((chsh - 1.41421).abs() < 1e-5 && chsh < 2.0);

    let (code, out, _) = qsep(&["werner", "--beta", "0"]);
    assert_eq!(code, 0);
    for key in ["m_minus @ identity", "m_plus @ identity"] {
        let v: f64 = field(&out, key).parse().unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    for bad in ["2", "-0.5", "nan"] {
        let (code, _, err) = qsep(&["werner", "--beta", bad]);
        assert_eq!(code, 1, "{bad}: {err}");
    }
    assert_eq!(qsep(&["werner"]).0, 1);
    assert_eq!(qsep(&["werner", "--beta", "0.5", "--scan", "0,1,3"]).0, 1);
}

#[test]
fn werner_scan_reports_flip() {
    let (code, out, _) = qsep(&["werner", "--scan", "0,1,101"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "beta,m_plus_identity_frame,ppt_min_eig,verdict,concurrence,chsh_max"
    );
    let rows: Vec<&str> = out
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows.len(), 101);
    // 17 significant digits: d.dddddddddddddddde+x
    let first = rows[0].split(',').next().unwrap();
    assert_eq!(
        first
            .split('e')
            .next()
            .unwrap()
            .replace(['.', '-'], "")
            .len(),
        17
    );
    let flip: f64 = field(&out, "# flip_beta=").parse().unwrap();
    assert!((flip - 0.34).abs() < 1e-12);
    assert_eq!(
        field(&out, "# flip_bracket="),
        "3.3000000000000002e-1,3.4000000000000002e-1"
    );

    let (code, out, _) = qsep(&["werner", "--scan", "0,0.3,4"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "# flip_beta="), "none");

    assert_eq!(qsep(&["werner", "--scan", "0,1"]).0, 1);
    assert_eq!(qsep(&["werner", "--scan", "0,1,0"]).0, 1);
    assert_eq!(qsep(&["werner", "--scan", "-1,1,5"]).0, 1);
}

#[test]
fn werner_scan_json() {
    let (code, out, _) = qsep(&["--json", "werner", "--scan", "0.3,0.4,11"]);
    assert_eq!(code, 0);
    let doc: qsep_cli::ScanDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.rows.len(), 11);
    let flip = doc.flip_beta.unwrap();
    assert!((flip - 1.0 / 3.0).abs() <= 0.01 + 1e-12);
}

#[test]
fn bench_separable_has_no_violations() {
    let (code, out, _) = qsep(&["bench", "--ensemble", "separable", "--count", "500"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "# hefei_violations="), "0");
    assert_eq!(field(&out, "# count="), "500");
}

#[test]
fn bench_pure_agrees_outside_band() {
    let (code, out, _) = qsep(&[
        "bench",
        "--ensemble",
        "pure",
        "--count",
        "200",
        "--seed",
        "4",
    ]);
    assert_eq!(code, 0);
    let rate: f64 = field(&out, "# agreement_rate=").parse().unwrap();
    assert_eq!(rate, 1.0);
}

#[test]
fn bench_is_deterministic_and_validates_input() {
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with("# wall"))
            .map(str::to_string)
            .collect()
    };
    let a = qsep(&["bench", "--count", "12", "--seed", "3"]);
    let b = qsep(&["bench", "--count", "12", "--seed", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(strip(a.1.clone()), strip(b.1));
    let c = qsep(&["bench", "--count", "12", "--seed", "4"]);
    assert_ne!(strip(a.1), strip(c.1));

    assert_eq!(qsep(&["bench", "--count", "0"]).0, 1);
    assert_eq!(qsep(&["bench", "--ensemble", "ghz"]).0, 1);
    let (code, out, _) = qsep(&["--json", "bench", "--count", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["summary"]["ensemble"], "mixed");
}

#[test]
fn verify_passes_and_is_deterministic() {
    let (code, out, _) = qsep(&["verify", "--trials", "100"]);
    assert_eq!(code, 0, "{out}");
    let clifford: f64 = field(&out, "clifford")
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(clifford < 1e-12);
    assert!(!out.contains("FAIL"));

    let a = qsep(&["verify", "--trials", "1", "--seed", "7"]);
    let b = qsep(&["verify", "--trials", "1", "--seed", "7"]);
    assert_eq!(a, b);

    let (code, out, _) = qsep(&["verify", "--trials", "5", "--identity-only"]);
    assert_eq!(code, 0);
    let tr: f64 = field(&out, "time_reversal")
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(tr, 0.0);

    assert_eq!(qsep(&["verify", "--trials", "0"]).0, 1);
}

#[test]
fn help_documents_exit_codes() {
    let (code, out, _) = qsep(&["--help"]);
    assert_eq!(code, 0);
    for needle in [
        "analyze",
        "werner",
        "bench",
        "verify",
        "--json",
        "--seed",
        "--tol",
        "--grid",
        "--quiet",
        "3  entangled",
        "4  boundary",
    ] {
        assert!(out.contains(needle), "{needle}");
    }
    assert_eq!(qsep(&["frobnicate"]).0, 1);
}

#[test]
fn quiet_and_grid_flags() {
    let (code, out, _) = qsep(&["--quiet", "analyze", &data("singlet.json")]);
    assert_eq!((code, out.as_str()), (3, ""));
    let (code, out, _) = qsep(&["--json", "--grid", "3", "analyze", &data("singlet.json")]);
    assert_eq!(code, 3);
    assert_eq!(
        ReportDocument::from_json(&out)
            .unwrap()
            .config
            .grid_points_per_angle,
        3
    );
    assert_eq!(
        qsep(&["--grid", "1", "analyze", &data("singlet.json")]).0,
        1
    );
}
