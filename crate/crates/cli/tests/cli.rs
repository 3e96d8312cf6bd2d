use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use htype_cli::{parse_config, CliError, CommandKind, Format, Task};
use htype_core::clifford::{ModuleSpec, Signature};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_htype"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    bin().args(args).env("HTYPE_THREADS", threads).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&v).unwrap()
}

#[track_caller]
fn assert_valid(name: &str, doc: &Value) {
    let s = schema(name);
    if let Err(errs) = s.validate(doc) {
        let msgs: Vec<String> = errs.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} schema violations: {msgs:#?}");
    };
}

fn json_of(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_spec(dir: &Path, name: &str, spec: &ModuleSpec) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(spec).unwrap()).unwrap();
    p
}

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("htype").chain(args.iter().copied()).map(String::from).collect()
}

#[test]
fn parse_trace_example() {
    let c = parse_config(argv(&["trace", "--sig", "1,0", "--module", "minimal", "--t", "0.1,0.5", "--tol", "1e-10"]))
        .unwrap();
    assert_eq!(c.command, CommandKind::Trace);
    assert_eq!(c.controls.tail_tolerance, 1e-10);
    assert_eq!(c.output.format, Format::Csv);
    match c.task {
        Task::Trace { spec, t, .. } => {
            assert_eq!(spec, ModuleSpec::minimal(Signature::new(1, 0)));
            assert_eq!(t, vec![0.1, 0.5]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_family_example() {
    let c = parse_config(argv(&["family", "--sig", "3,1", "--m", "2", "--out", "fam.json"])).unwrap();
    assert_eq!(c.command, CommandKind::Family);
    assert_eq!(
        c.task,
        Task::Family {
            sig: Signature::new(3, 1),
            m: 2,
            t: vec![]
        }
    );
    assert_eq!(c.output.path, Some(PathBuf::from("fam.json")));
}

#[test]
fn parse_conflicting_sig_and_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "a.json", &ModuleSpec::minimal(Signature::new(1, 0)));
    let r = parse_config(argv(&["trace", "--sig", "1,0", "--alg", p.to_str().unwrap(), "--t", "1"]));
    match r {
        Err(e @ CliError::Usage(_)) => {
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains("--alg"), "{e}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "a.json", &ModuleSpec::minimal(Signature::new(1, 0)));
    for args in [
        vec!["trace", "--sig", "1,0", "--alg", p.to_str().unwrap(), "--t", "1"],
        vec!["trace", "--sig", "1,0", "--t", "-1"],
        vec!["trace", "--sig", "1,0", "--t", "1", "--no-such-flag"],
        vec!["trace", "--alg", "/nonexistent/spec.json", "--t", "1"],
        vec!["trace", "--sig", "3,1", "--module", "p++:1", "--t", "1"],
        vec!["classify", "--r", "1", "--s", "0", "--format", "csv"],
        vec!["bogus-command"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let o = run_env(&["trace", "--sig", "1,0", "--t", "1"], "zero");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn engine_error_exits_1() {
    // the tail at t = 1e-3 needs a far larger box than the cap allows
    let o = run(&["trace", "--sig", "1,0", "--t", "0.001", "--radius", "2", "--radius-cap", "3"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    // spectrum is only available for s = 0
    let o = run(&["spectrum", "--sig", "1,1", "--cutoff", "50"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("probe-expansion"));
}

#[test]
fn trace_csv_is_byte_deterministic_across_thread_counts() {
    let args = ["trace", "--sig", "1,3", "--t", "0.3,0.5,0.8,1.2,2"];
    let a = run_env(&args, "1");
    let b = run_env(&args, "4");
    let c = run_env(&args, "4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,trace,tail_bound,truncation_bound,rounding_bound,radius"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.3");
    // shortest round-trip decimal
    let v: f64 = first[1].parse().unwrap();
    assert_eq!(v.to_string().parse::<f64>().unwrap(), v);
}

#[test]
fn trace_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tr.json");
    let o = run(&["trace", "--sig", "2,0", "--t", "0.5,1", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid("trace", &doc);
    assert_eq!(doc["points"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "sig = \"1,0\"\nt = [0.5, 1.0]\nformat = \"json\"\n").unwrap();
    let text = std::fs::read_to_string(&cfg).unwrap();
    let as_json = serde_json::to_value(toml::from_str::<toml::Value>(&text).unwrap()).unwrap();
    assert_valid("config", &as_json);

    let doc = json_of(&["--config", cfg.to_str().unwrap(), "trace"]);
    assert_eq!(doc["points"].as_array().unwrap().len(), 2);
    let doc = json_of(&["--config", cfg.to_str().unwrap(), "trace", "--t", "0.7"]);
    assert_eq!(doc["points"][0]["t"], 0.7);

    std::fs::write(&cfg, "sig = \"1,0\"\ntee = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "trace", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dump_outputs_match_their_schemas() {
    let doc = json_of(&["dump-module", "--sig", "3,1", "--module", "p+:1,p-:1"]);
    assert_valid("module-dump", &doc);
    assert_eq!(doc["dim"], 16);
    assert_eq!(doc["axioms_verified"], true);
    let spec: ModuleSpec = serde_json::from_value(doc["spec"].clone()).unwrap();
    assert_valid("module-spec", &doc["spec"]);
    assert_eq!(spec.sign_counts(), (1, 1));

    let doc = json_of(&["dump-algebra", "--sig", "1,0"]);
    assert_valid("algebra-dump", &doc);
    // H₃: [X_0, X_1] = ±Z_0 in both orders
    assert_eq!(doc["structure_constants"].as_array().unwrap().len(), 2);
}

#[test]
fn spectrum_csv_and_json() {
    let o = run(&["spectrum", "--sig", "1,0", "--cutoff", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("eigenvalue,multiplicity,series,"));
    // β = 4π with multiplicity 2·4 = 8 for H₃
    assert!(text.lines().any(|l| l.starts_with("12.566370614359172,8,beta")), "{text}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("dim V = 2"));

    let doc = json_of(&["spectrum", "--sig", "2,0", "--t", "1", "--format", "json"]);
    assert_valid("spectrum", &doc);
    assert_eq!(doc["recovery"]["module_dim"], 4);
    assert_eq!(doc["recovery"]["consistent"], true);
}

#[test]
fn compare_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_spec(dir.path(), "a.json", &ModuleSpec::minimal(Signature::new(3, 1)));
    let b = write_spec(dir.path(), "b.json", &ModuleSpec::minimal(Signature::new(1, 3)));
    let doc = json_of(&[
        "compare",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--t",
        "0.2,0.5,1.0",
        "--tol",
        "1e-10",
    ]);
    assert_valid("report", &doc);
    assert_eq!(doc["modules"], Value::Null);
    assert_eq!(doc["structural_from_specs"]["answer"], "yes");
    assert_eq!(doc["report"]["verdict"]["kind"], "numerically-indistinguishable");
}

#[test]
fn classify_and_family() {
    let doc = json_of(&["classify", "--r", "3", "--s", "1"]);
    assert_valid("classification", &doc);
    assert_eq!(doc["entry"]["relation"], "non-isomorphic");

    let doc = json_of(&["classify", "--r", "11", "--s", "7"]);
    assert_valid("classification", &doc);
    assert_eq!(doc["entry"]["source"]["kind"], "periodicity");

    let doc = json_of(&["family", "--sig", "3,1", "--m", "2"]);
    assert_valid("family", &doc);
    assert_eq!(doc["certified"], true);
    assert_eq!(doc["family"]["specs"].as_array().unwrap().len(), 3);
    assert_eq!(doc["family"]["manifold_dim"], 4 + 32);
}

#[test]
fn asymptotics_output() {
    let doc = json_of(&["asymptotics", "--sig", "1,0"]);
    assert_valid("asymptotics", &doc);
    let c = doc["cM"].as_f64().unwrap();
    assert!((c - 0.125).abs() < 1e-10, "{c}");
    assert_eq!(doc["match"], Value::Null);

    let doc = json_of(&["asymptotics", "--sig", "1,3", "--convention", "lebesgue"]);
    assert_valid("asymptotics", &doc);
    assert_eq!(doc["match"]["n"], 7);
    assert_eq!(doc["match"]["dims"], serde_json::json!([12, 15]));
    assert_eq!(doc["zeta_check"], Value::Null);
}

#[test]
fn probe_expansion_csv_and_json() {
    let args = ["probe-expansion", "--sig", "1,3", "--t-max", "0.2", "--t-min", "0.1", "--points", "4"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("t,D,slope,noise_floor,above_floor\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("verdict:"));

    let mut j = args.to_vec();
    j.extend(["--format", "json"]);
    let doc = json_of(&j);
    assert_valid("probe", &doc);
}

fn reproduce(name: &str) -> Value {
    let o = run(&["reproduce", name]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid("reproduce", &doc);
    for f in doc["facts"].as_array().unwrap() {
        assert_eq!(f["pass"], true, "{f}");
    }
    assert_eq!(doc["all_pass"], true);
    doc
}

#[test]
fn reproduce_pair_12d() {
    let doc = reproduce("pair-12d");
    let d = &doc["data"];
    assert_eq!(d["t"].as_array().unwrap().len(), 20);
    assert_valid("classification", &d["classification"]);
    for (a, b) in [("sub_laplacian_a", "sub_laplacian_b"), ("laplacian_a", "laplacian_b")] {
        for (x, y) in d[a].as_array().unwrap().iter().zip(d[b].as_array().unwrap()) {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
        }
    }
}

#[test]
fn reproduce_family_11d() {
    let doc = reproduce("family-11d");
    let fam = &doc["data"];
    assert_valid("family", fam);
    assert_eq!(fam["family"]["manifold_dim"], 11);
    assert_eq!(fam["numeric"].as_array().unwrap().len(), 1);
}

#[test]
fn reproduce_heisenberg_match() {
    let doc = reproduce("heisenberg-match");
    let d = &doc["data"];
    assert_eq!(d["lebesgue"]["dims"], serde_json::json!([12, 15]));
    assert_eq!(d["paper"]["n"], 7);
    // Lebesgue volumes are 2^{-4} for c_M and 2^{-1} for c_H₁, so α^8 gains 2^{-3}
    let (ap, al) = (d["paper"]["alpha"].as_f64().unwrap(), d["lebesgue"]["alpha"].as_f64().unwrap());
    assert!((al / ap - 0.5f64.powf(3.0 / 8.0)).abs() < 1e-10, "{ap} {al}");
}

#[test]
fn reproduce_is_byte_deterministic() {
    let a = run(&["reproduce", "family-11d"]);
    let b = run_env(&["reproduce", "family-11d"], "1");
    assert_eq!(a.stdout, b.stdout);
}
