use std::path::PathBuf;
use std::process::Command;

use ellcert::cost::TableRow;
use ellcert::testbed::RatioReport;
use ellcert::EllPlan;
use ellcert_cli::output::{parse_record, Record};
use ellcert_cli::{run, CertifyOutput, RuleOutput};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

/// Runs in-process; returns (exit code, stdout, stderr).
fn ellcert(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ellcert").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn records<T: for<'de> serde::Deserialize<'de>>(stdout: &str) -> Vec<Record<T>> {
    stdout.lines().map(|l| parse_record(l).unwrap()).collect()
}

#[test]
fn plan_all_rules() {
    let (code, out, _) = ellcert(&["plan", "--eps", "1e-2", "--rule", "all"]);
    assert_eq!(code, 0);
    for needle in ["ell_bf  ", "101", "ell_ps  ", "19", "ell_star  ", "18"] {
        assert!(out.contains(needle), "{out}");
    }
    let (_, out, _) = ellcert(&["plan", "--eps", "1e-2", "--format", "json"]);
    let rec = &records::<EllPlan>(&out)[0];
    assert_eq!(
        (rec.schema.as_str(), rec.kind.as_str()),
        ("ellcert/v1", "plan")
    );
    assert_eq!(
        (rec.data.ell_bf, rec.data.ell_ps, rec.data.ell_star),
        (101, 19, 18)
    );
}

#[test]
fn plan_single_rules() {
    let (code, out, _) = ellcert(&["plan", "--eps", "0.2", "--rule", "star"]);
    assert_eq!((code, out.as_str()), (0, "ell_star  1\n"));
    let (_, out, _) = ellcert(&["plan", "--eps", "1/20", "--rule", "ps", "--format", "json"]);
    let rec = &records::<RuleOutput>(&out)[0];
    assert_eq!((rec.data.rule.as_str(), rec.data.ell), ("ps", 4));
    let (_, out, _) = ellcert(&["plan", "--eps", "1e-3", "--rule", "bf", "--format", "csv"]);
    assert_eq!(out, "eps,rule,ell,precision_used\n1e-3,bf,1001,0\n");
}

#[test]
fn plan_rejects_bad_eps() {
    for eps in ["0", "-0.1", "abc", "1/0"] {
        let (code, _, err) = ellcert(&["plan", "--eps", eps]);
        assert_eq!(code, 3, "{eps}");
        assert!(err.starts_with("error: --eps"), "{err}");
    }
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ellcert(&[]).0, 3);
    assert_eq!(ellcert(&["bogus"]).0, 3);
    assert_eq!(ellcert(&["plan"]).0, 3);
    assert_eq!(
        ellcert(&["plan", "--eps", "0.1", "--precision-start", "4"]).0,
        3
    );
    assert_eq!(
        ellcert(&[
            "plan",
            "--eps",
            "0.1",
            "--precision-start",
            "64",
            "--precision-cap",
            "32"
        ])
        .0,
        3
    );
    assert_eq!(
        ellcert(&["verify", "--suite", "bounds", "--lmin", "0"]).0,
        3
    );
    assert_eq!(
        ellcert(&["verify", "--suite", "logs", "--grid", "0:1"]).0,
        3
    );
    assert_eq!(ellcert(&["--help"]).0, 0);
}

#[test]
fn table_golden_files() {
    let (code, out, _) = ellcert(&["table"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("table.txt"));
    let (_, out, _) = ellcert(&["table", "--format", "csv"]);
    assert_eq!(out, golden("table.csv"));
}

#[test]
fn table_check_and_extrapolation() {
    let (code, _, err) = ellcert(&["table", "--check"]);
    assert_eq!(code, 0);
    assert!(err.contains("every published cell matches"));
    let (code, out, _) = ellcert(&["table", "--eps", "1e-5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(
        out.lines()
            .nth(1)
            .unwrap()
            .starts_with("1e-5,100001,18394,"),
        "{out}"
    );
    // A list without the published rows fails the check and names what is missing.
    let (code, _, err) = ellcert(&["table", "--eps", "0.1", "--check"]);
    assert_eq!(code, 1);
    assert!(err.contains("ε = 5e-2, column row"), "{err}");
}

#[test]
fn table_json_round_trip() {
    let (_, out, _) = ellcert(&["table", "--format", "json"]);
    let rows = records::<TableRow>(&out);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[2].data.factor_star.scientific(), "9.7e24");
    for (line, rec) in out.lines().zip(&rows) {
        assert_eq!(serde_json::to_string(rec).unwrap(), line);
    }
}

#[test]
fn certify_examples() {
    let (code, out, _) = ellcert(&[
        "certify", "--ell", "19", "--eps", "1e-2", "--format", "json",
    ]);
    let c = &records::<CertifyOutput>(&out)[0].data;
    assert_eq!(code, 0);
    assert!(c.certificate);
    assert_eq!(c.direct_comparison.to_string(), "less");

    let (code, out, _) = ellcert(&[
        "certify", "--ell", "17", "--eps", "1e-2", "--format", "json",
    ]);
    assert_eq!(code, 1);
    assert_eq!(
        records::<CertifyOutput>(&out)[0]
            .data
            .direct_comparison
            .to_string(),
        "greater"
    );

    let (code, out, _) = ellcert(&["certify", "--ell", "1", "--eps", "0.15", "--format", "json"]);
    let c = &records::<CertifyOutput>(&out)[0].data;
    assert_eq!(code, 0);
    assert!(!c.certificate);
    assert_eq!(c.direct_comparison.to_string(), "less");
    assert!(c.certificate_is_sufficient_only);
}

#[test]
fn verify_suites() {
    let (code, out, _) = ellcert(&["verify", "--suite", "bounds", "--lmax", "300"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.ends_with("PASS")));

    let (code, out, _) = ellcert(&["verify", "--suite", "ordering", "--lmax", "100"]);
    assert_eq!(code, 0);
    assert!(out.contains("exception at ell = 1: sharp is greater than polya_szego"));

    let (code, out, _) = ellcert(&["verify", "--suite", "logs", "--grid", "0:10:0.125"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("points 81") && out.contains("exact equalities 3"),
        "{out}"
    );

    let (code, out, _) = ellcert(&["verify", "--suite", "expansion", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn inconclusive_exits_2() {
    // log(1+x) and x/(1+x) meet at 0 only; a 2^-80 point needs more than 8 bits to separate.
    let (code, out, _) = ellcert(&[
        "verify",
        "--suite",
        "logs",
        "--grid",
        "1/1208925819614629174706176:1/1208925819614629174706176:1",
        "--precision-start",
        "8",
        "--precision-cap",
        "8",
    ]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("INCONCLUSIVE"));
}

#[test]
fn testbed_bundled_instances() {
    let three = data("three_element.json");
    let (code, out, _) = ellcert(&[
        "testbed",
        "--instance",
        three.to_str().unwrap(),
        "--eps",
        "0.1",
        "--format",
        "json",
        "--seed",
        "9",
    ]);
    assert_eq!(code, 0);
    let r = &records::<RatioReport>(&out)[0].data;
    assert_eq!(r.opt_value, ellcert::exact::rational::ratio(3, 1));
    assert_eq!(r.greedy_value, ellcert::exact::rational::ratio(3, 1));
    assert_eq!(r.target, ellcert::exact::rational::ratio(5, 3));
    assert_eq!(r.seed, Some(9));
    assert!(r.oracle_calls.brute_force > 0);

    let gap = data("gap.json");
    let (code, out, _) = ellcert(&[
        "testbed",
        "--instance",
        gap.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let r = &records::<RatioReport>(&out)[0].data;
    assert_eq!(r.greedy_ratio.as_deref(), Some("3/4"));
}

#[test]
fn testbed_bad_inputs() {
    let (code, _, err) = ellcert(&["testbed", "--instance", "/definitely/missing.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"universe": {"a": "1"}, "ground": {"e": ["a", "zz"]}, "matroid": {"type": "uniform", "rank": 1}}"#).unwrap();
    let (code, _, err) = ellcert(&["testbed", "--instance", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown item `zz`"), "{err}");

    assert_eq!(ellcert(&["testbed", "--random", "21"]).0, 3);
    assert_eq!(ellcert(&["testbed"]).0, 3);
}

#[test]
fn worker_count_does_not_change_output() {
    for args in [
        vec!["table", "--eps", "1e-1,1e-2,1e-3,1e-4,3e-5"],
        vec![
            "verify", "--suite", "bounds", "--lmax", "200", "--format", "json",
        ],
        vec![
            "testbed", "--random", "12", "--seed", "5", "--format", "json",
        ],
    ] {
        let outputs: Vec<String> = ["1", "2", "7"]
            .iter()
            .map(|w| {
                let mut a = args.clone();
                a.extend(["--worker-count", w]);
                ellcert(&a).1
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn binary_exit_codes_and_env_override() {
    let bin = env!("CARGO_BIN_EXE_ellcert");
    let status = Command::new(bin)
        .args(["plan", "--eps", "0.1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin)
        .args(["plan", "--eps", "0"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(3));
    let status = Command::new(bin)
        .args(["certify", "--ell", "17", "--eps", "0.01"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
    // A cap below the start is rejected whether it comes from the flag or the environment.
    let status = Command::new(bin)
        .args(["plan", "--eps", "0.1", "--precision-start", "64"])
        .env("ELLCERT_PRECISION_CAP", "32")
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(3));
}
