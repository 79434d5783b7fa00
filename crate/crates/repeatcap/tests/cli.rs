use std::fs;
use std::process::{Command, Output};

use repeatcap::records::{read_bound_csv, write_bound_csv};
use repeatcap_core::dual::r_p;

fn repeatcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeatcap"))
        .args(args)
        .env_remove("REPEATCAP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json payload")
}

#[test]
fn sticky_bound_matches_reference() {
    let o = repeatcap(&["bound", "--family", "sticky", "--p", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["bound_bits"].as_f64().unwrap() - 0.814464).abs() < 1e-5);
    assert!(v["meta"]["tool_version"].is_string());
}

#[test]
fn geomdel_auto_at_one_half() {
    let o = repeatcap(&[
        "bound",
        "--family",
        "geomdel",
        "--p",
        "0.5",
        "--variant",
        "auto",
        "--no-meta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["bound_bits"].as_f64().unwrap() - 0.168074).abs() < 1e-5);
    assert!(v.get("meta").is_none());
}

#[test]
fn domain_errors_exit_two() {
    let o = repeatcap(&["bound", "--family", "sticky", "--p", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.5"));
    let o = repeatcap(&[
        "bound",
        "--family",
        "sticky",
        "--p",
        "0.3",
        "--variant",
        "trunc",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = repeatcap(&[
        "bound",
        "--family",
        "geomdel",
        "--p",
        "0.3",
        "--variant",
        "elementary",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = repeatcap(&["simulate", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = repeatcap(&["bound", "--p", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn duplication_above_one_bit_is_flagged() {
    let o = repeatcap(&[
        "bound",
        "--family",
        "duplication",
        "--p",
        "0.9",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_bound_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].bound_bits.unwrap() > 1.0);
    assert_eq!(rows[0].clamped, Some(true));
}

#[test]
fn text_format_honours_nats() {
    let o = repeatcap(&[
        "bound", "--family", "sticky", "--p", "0.5", "--format", "text", "--nats",
    ]);
    let text = stdout(&o);
    assert!(text.contains("nats/channel use"), "{text}");
    assert!(
        text.contains("0.273330") || text.contains("0.27333"),
        "{text}"
    );
}

#[test]
fn two_step_sweep_has_two_rows() {
    let o = repeatcap(&[
        "sweep",
        "--family",
        "sticky",
        "--p-start",
        "0.1",
        "--p-end",
        "0.2",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,variant,bound_bits,bound_nats,q_opt,mu_opt,epsilon_used,feasible,clamped,error")
    );
    assert_eq!(lines.count(), 2);
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_rejects_bad_grids() {
    for args in [
        &[
            "sweep",
            "--family",
            "sticky",
            "--p-start",
            "0.2",
            "--p-end",
            "0.1",
            "--steps",
            "3",
        ][..],
        &[
            "sweep",
            "--family",
            "sticky",
            "--p-start",
            "0.1",
            "--p-end",
            "0.2",
            "--steps",
            "1",
        ][..],
        &[
            "sweep",
            "--family",
            "sticky",
            "--p-start",
            "0.1",
            "--p-end",
            "1.0",
            "--steps",
            "3",
        ][..],
    ] {
        assert_eq!(repeatcap(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn geomdel_sweep_emits_components_and_min() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geomdel.csv");
    let o = repeatcap(&[
        "sweep",
        "--family",
        "geomdel",
        "--p-values",
        "0.3,0.9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let bytes = fs::read(&path).unwrap();
    let rows = read_bound_csv(bytes.as_slice()).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r.variant.as_str()).collect();
    assert_eq!(
        names,
        ["conv", "trunc", "delta-d", "min", "conv", "trunc", "delta-d", "min"]
    );
    for chunk in rows.chunks(4) {
        let min = chunk[..3]
            .iter()
            .map(|r| r.bound_bits.unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(chunk[3].bound_bits.unwrap(), min);
    }
    assert!((rows[3].bound_bits.unwrap() - 0.104846).abs() < 1e-5);

    // Reading and re-emitting reproduces the file byte for byte.
    let mut again = Vec::new();
    write_bound_csv(&mut again, &rows).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn inner_curve_columns() {
    let o = repeatcap(&[
        "sweep",
        "--family",
        "sticky",
        "--emit-inner",
        "0.3",
        "--inner-points",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("variant,q,objective_nats,objective_bits,mu,feasible")
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn verify_single_table_and_perturbation() {
    let o = repeatcap(&["verify", "--only", "T2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.contains("T2 p=")).count(),
        9
    );

    let o = repeatcap(&["verify", "--only", "T2", "--perturb", "T2 p=0.3 upper=0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("T2 p=0.3 upper"));

    let o = repeatcap(&["verify", "--only", "T2", "--perturb", "T9 p=0.3 upper=0.01"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_json_report() {
    let o = repeatcap(&["verify", "--only", "T2", "--json", "--tolerance", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 9);
    assert!(entries
        .iter()
        .all(|e| e["tolerance"].as_f64() == Some(1e-3)));
}

fn klgap_rows(args: &[&str]) -> (Vec<(u64, f64)>, String) {
    let o = repeatcap(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let mut lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.remove(0), "x,gap_nats");
    let limit = lines.pop().unwrap().to_string();
    let rows = lines
        .iter()
        .map(|l| {
            let (x, g) = l.split_once(',').unwrap();
            (x.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    (rows, limit)
}

#[test]
fn sticky_klgap_is_zero() {
    let (rows, limit) = klgap_rows(&[
        "klgap", "--family", "sticky", "--p", "0.4", "--q", "0.7", "--x-max", "30",
    ]);
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|&(_, g)| g.abs() <= 1e-6));
    assert_eq!(limit, "limit,0");
}

#[test]
fn truncated_klgap_equals_r_p() {
    let (rows, limit) = klgap_rows(&[
        "klgap",
        "--family",
        "geomdel",
        "--variant",
        "trunc",
        "--delta-rule",
        "one",
        "--p",
        "0.6",
        "--q",
        "0.5",
        "--x-max",
        "12",
    ]);
    for (x, g) in rows {
        assert!((g - r_p(x, 0.6).unwrap()).abs() <= 1e-6, "x = {x}");
    }
    assert!(limit.starts_with("limit,"));
}

#[test]
fn klgap_single_row() {
    let (rows, _) = klgap_rows(&[
        "klgap",
        "--family",
        "duplication",
        "--p",
        "0.2",
        "--q",
        "0.5",
        "--x-max",
        "1",
    ]);
    assert_eq!(rows.len(), 1);
    let o = repeatcap(&[
        "klgap",
        "--family",
        "geomdel",
        "--p",
        "0.2",
        "--q",
        "0.5",
        "--delta-rule",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_is_deterministic_across_thread_counts() {
    let base = [
        "simulate",
        "--n",
        "300",
        "--lambda",
        "30",
        "--eps",
        "0.1",
        "--trials",
        "16",
        "--seed",
        "7",
        "--verbose",
        "--no-meta",
    ];
    let one = repeatcap(&[&base[..], &["--threads", "1"]].concat());
    let four = repeatcap(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    assert_eq!(v["reports"].as_array().unwrap().len(), 16);
    assert!(v["success_rate"].as_f64().unwrap() >= 0.9);
}

#[test]
fn single_trial_is_reproducible() {
    let args = [
        "simulate",
        "--n",
        "64",
        "--lambda",
        "5",
        "--trials",
        "1",
        "--seed",
        "3",
        "--no-meta",
        "--verbose",
    ];
    assert_eq!(repeatcap(&args).stdout, repeatcap(&args).stdout);
    let fixed = [
        "simulate",
        "--input",
        "bits:0110",
        "--lambda",
        "50",
        "--trials",
        "1",
        "--no-meta",
    ];
    let v = json(&repeatcap(&fixed));
    assert_eq!(v["n"], 4);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(
        &path,
        "no_meta = true\n[bound]\nfamily = \"sticky\"\np = 0.5\nformat = \"csv\"\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();

    let rows = read_bound_csv(repeatcap(&["--config", cfg, "bound"]).stdout.as_slice()).unwrap();
    assert_eq!(rows[0].p, 0.5);
    assert!((rows[0].bound_bits.unwrap() - 0.394333).abs() < 1e-5);

    let rows = read_bound_csv(
        repeatcap(&["--config", cfg, "bound", "--p", "0.05"])
            .stdout
            .as_slice(),
    )
    .unwrap();
    assert_eq!(rows[0].p, 0.05);

    fs::write(&path, "[bound]\nfamilly = \"sticky\"\n").unwrap();
    assert_eq!(
        repeatcap(&["--config", cfg, "bound"]).status.code(),
        Some(2)
    );
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["bound", "sweep", "verify", "klgap", "simulate"] {
        let o = repeatcap(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("Usage"));
    }
}
