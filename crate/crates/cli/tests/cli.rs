use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_banachlab"));
    c.env_remove("BANACHLAB_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("banachlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn schema() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.json");
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn assert_valid(json: &str) {
    let v: serde_json::Value = serde_json::from_str(json).expect("valid JSON");
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn modulus_brackets_hilbert_value() {
    let o = run(&["modulus", "--space", "catalog:lp(2,2)", "--kind", "delta_uacs", "--eps", "1.0", "--angles", "4096", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    let exact = 1.0 - 0.5f64.sqrt();
    // The attained side is evaluated at a witness, so it carries rounding.
    assert!(lo <= exact && exact <= hi + 1e-9, "[{lo}, {hi}]");
    assert!(lo <= 0.29289 && 0.29289 <= hi);
    assert_valid(&stdout(&o));
}

#[test]
fn replay_62_csv_has_eight_rows_with_sum_two() {
    let o = run(&["replay", "--example", "62", "--n", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "norm_sum").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let v: f64 = r.split(',').nth(col).unwrap().parse().unwrap();
        assert!((v - 2.0).abs() <= 1e-12, "{v}");
    }
}

#[test]
fn verify_ex61_delta_rho_has_no_violations() {
    let o = run(&[
        "verify", "--inequality", "delta_rho", "--space", "catalog:arc2d(ex61)", "--eps", "0.5,1.0", "--tau", "0.1,0.25", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "space,inequality,points,verified,violated,inconclusive,vacuous,min_margin");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..7], &["catalog:arc2d(ex61)", "delta_rho", "4", "4", "0", "0", "0"]);
}

#[test]
fn strict_turns_inconclusive_into_exit_3() {
    let args = ["verify", "--inequality", "delta_tilde_rho", "--space", "lp(2,1)", "--eps", "0.5"];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["frobnicate"],
        vec!["modulus", "--space", "catalog:nope(2)", "--kind", "delta_X", "--eps", "1"],
        vec!["modulus", "--space", "lp(2,2)", "--kind", "delta_X", "--eps", "3"],
        vec!["modulus", "--space", "lp(2,2)", "--kind", "delta_X", "--eps", "1", "--angles", "32"],
        vec!["curve", "--space", "lp(2,2)", "--kind", "delta_X", "--args", "1:0:0.5"],
        vec!["verify", "--inequality", "no_such_inequality", "--space", "lp(2,2)"],
        vec!["sum", "--space", "lp(2,2)"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_error() {
    let o = run(&["catalog", "--output", "/nonexistent-dir/x.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn identical_jobs_give_identical_bytes() {
    let args = ["verify", "--space", "lp(2,inf)", "--space", "arc2d(fig5)", "--inequality", "delta_rho", "--eps", "0.5,1", "--tau", "0.25"];
    let outs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|jobs| {
            let p = scratch(&format!("det-{jobs}.json"));
            let mut a = args.to_vec();
            a.extend(["--jobs", jobs, "--output", p.to_str().unwrap()]);
            assert_eq!(run(&a).status.code(), Some(0));
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(run(&args).stdout, outs[0]);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let cfg = scratch("defaults.toml");
    std::fs::write(&cfg, "format = \"csv\"\neps = \"0.5:1.0:0.5\"\n[resolution]\nangles = 128\n").unwrap();
    let o = bin().env("BANACHLAB_CONFIG", &cfg).args(["curve", "--space", "lp(2,2)", "--kind", "delta_X", "--args", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("kind,arg,lo,hi,certified\n"));
    let o = bin().env("BANACHLAB_CONFIG", &cfg).args(["catalog", "--format", "json"]).output().unwrap();
    assert!(stdout(&o).trim_start().starts_with('['));
    let o = bin().env("BANACHLAB_CONFIG", &cfg).args(["sum", "--space", "sum(E=lp(2,1); lp(2,inf), lp(2,inf))", "--sections", "1"]).output().unwrap();
    assert_eq!(stdout(&o).lines().count(), 3);
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(bin().env("BANACHLAB_CONFIG", &cfg).arg("catalog").output().unwrap().status.code(), Some(1));
}

#[test]
fn manifest_runs_every_job() {
    let m = scratch("jobs.toml");
    std::fs::write(
        &m,
        "[[job]]\nspace = \"lp(2,2)\"\ninequality = \"lipschitz_delta_uacs\"\neps = [0.25, 0.5]\n\n\
         [[job]]\nspace = \"lp(2,1)\"\ninequality = \"superreflexivity\"\nt = [0.25]\n",
    )
    .unwrap();
    let o = run(&["verify", "--manifest", m.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("\"lp(2,1)\",superreflexivity,1,1,0,0,0,"), "{text}");
}

#[test]
fn json_outputs_follow_the_schema() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["modulus", "--space", "lp(3,1)", "--kind", "nonsquareness"],
        vec!["curve", "--space", "arc2d(ex61)", "--kind", "rho_uacs", "--args", "0.1,0.5"],
        vec!["classify", "--space", "arc2d(fig5)"],
        vec!["dual", "--space", "lp(2,1)", "--functional", "1,-2"],
        vec!["quotient", "--space", "lp(3,2)", "--basis", "0,0,1", "--vector", "3,4,7"],
        vec!["quotient", "--space", "lp(3,1)", "--basis", "1,1,1"],
        vec!["sum", "--space", "sum(E=lp(2,2); lp(2,1), lp(2,inf))", "--eps", "1", "--sections", "1"],
        vec!["verify", "--space", "lp(2,inf)", "--inequality", "acs_characterizations"],
        vec!["replay", "--example", "65", "--n", "6"],
        vec!["catalog"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_valid(&stdout(&o));
    }
}

#[test]
fn quotient_of_euclid_is_orthogonal_projection() {
    let o = run(&["quotient", "--space", "lp(2,2)", "--basis", "1,0", "--vector", "5,3", "--format", "csv"]);
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').take(2).map(|v| v.parse().unwrap()).collect();
    assert!((row[0] - 3.0).abs() < 1e-9 && (row[1] - 3.0).abs() < 1e-9, "{row:?}");
}
