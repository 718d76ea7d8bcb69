use std::path::Path;
use std::process::{Command, Output};

use layerspec::catalog::{catalog, Construction};
use layerspec::config::RunConfig;
use serde_json::Value;

fn layerspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layerspec")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn run_in(dir: &Path, cmd: &str, cfg: &str) -> (i32, Value) {
    let out = dir.join("out");
    let o = layerspec(&[cmd, "--config", cfg, "--out", out.to_str().unwrap(), "--force"]);
    let code = o.status.code().unwrap();
    let report = std::fs::read_to_string(out.join(format!("{cmd}.json")))
        .map(|t| serde_json::from_str(&t).unwrap())
        .unwrap_or(Value::Null);
    (code, report)
}

/// Every number below `v` sits in an object that also carries "error" or "exact".
fn annotated(v: &Value, path: &str) -> Result<(), String> {
    match v {
        Value::Number(_) => Err(format!("bare number at {path}")),
        Value::Array(a) => a.iter().enumerate().try_for_each(|(i, x)| annotated(x, &format!("{path}[{i}]"))),
        Value::Object(m) => {
            if m.contains_key("value") && (m.contains_key("error") || m.contains_key("exact")) {
                return Ok(());
            }
            m.iter().try_for_each(|(k, x)| annotated(x, &format!("{path}.{k}")))
        }
        _ => Ok(()),
    }
}

#[test]
fn catalog_has_seven_entries() {
    let c = catalog();
    assert_eq!(c.len(), 7);
    let names: Vec<_> = c.iter().map(|e| e.name).collect();
    for n in ["hyperbolic-paraboloid", "monkey-saddle", "elliptic-paraboloid", "hyperboloid", "ex-m", "capped-cylinder", "ex-pole"] {
        assert!(names.contains(&n), "{n}");
    }
    let hyp = c.iter().find(|e| e.name == "hyperboloid").unwrap();
    assert_eq!(hyp.parameter("z0").unwrap().default, 1.0);
    let pole = c.iter().find(|e| e.name == "ex-pole").unwrap();
    assert_eq!(pole.construction, Construction::None);
    assert!(!pole.computable());
    for e in c.iter().filter(|e| e.computable()) {
        RunConfig::defaults_for(e.name).unwrap_or_else(|err| panic!("{}: {err}", e.name));
    }

    let o = layerspec(&["catalog"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 7);
}

#[test]
fn ex_pole_is_rejected_by_every_compute_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "pole.toml", "[surface]\nname = \"ex-pole\"\n");
    for cmd in ["describe", "check", "totals", "certify", "spectrum", "counterexample"] {
        let o = layerspec(&[cmd, "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(4), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("capability"), "{cmd}");
    }
}

#[test]
fn totals_on_hyperbolic_paraboloid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "hp.toml", "[surface]\nname = \"hyperbolic-paraboloid\"\n");
    let (code, r) = run_in(dir.path(), "totals", &cfg);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    let k = r["result"]["total_gauss"]["value"].as_f64().unwrap();
    assert!((k + 6.2832).abs() <= 0.01 * 6.2832, "{k}");
    assert!(r["result"]["total_gauss"]["error"].as_f64().is_some());
    assert_eq!(r["result"]["mean_sq"]["divergent"], true);
    annotated(&r["result"], "result").unwrap();
    let csv = std::fs::read_to_string(dir.path().join("out/totals_partials.csv")).unwrap();
    assert!(csv.starts_with("radius,gauss,mean_sq\n"));
}

#[test]
fn check_on_capped_cylinder_reports_failed_decay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cc.toml", "[surface]\nname = \"capped-cylinder\"\n");
    let (code, r) = run_in(dir.path(), "check", &cfg);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["sigma0"]["pass"], false);
    assert_eq!(r["result"]["omega1"]["pass"], true);
    annotated(&r["result"], "result").unwrap();
}

#[test]
fn certify_on_plane_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "plane.toml", "[surface]\nname = \"plane\"\n[certify]\nstrategies = [\"thin-layer\", \"symmetric-log\"]\n");
    let (code, r) = run_in(dir.path(), "certify", &cfg);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "not-found");
    annotated(&r["result"], "result").unwrap();
}

#[test]
fn certify_on_hyperboloid_finds_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.toml", "[surface]\nname = \"hyperboloid\"\n[certify]\nstrategies = [\"symmetric-log\"]\n");
    let (code, r) = run_in(dir.path(), "certify", &cfg);
    assert_eq!(code, 0);
    let res = &r["result"];
    assert_eq!(res["verdict"], "certified");
    assert_eq!(res["family"]["name"], "symmetric-log");
    let q = res["q_tilde"]["value"].as_f64().unwrap();
    let e = res["q_tilde"]["error"].as_f64().unwrap();
    assert!(q + e < 0.0 && q.abs() >= 3.0 * e);
    annotated(res, "result").unwrap();
}

#[test]
fn spectrum_csv_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.toml",
        "[surface]\nname = \"hyperboloid\"\ns_max = 1000.0\n[spectrum]\nm = [0, 1]\ns_end = 20.0\nn_s = 40\nn_u = 16\neigenvalues = 2\nlevels = 1\n",
    );
    let (code, r) = run_in(dir.path(), "spectrum", &cfg);
    assert_eq!(code, 0);
    annotated(&r["result"], "result").unwrap();
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum_eigenvalues.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,index,eigenvalue,threshold,below_threshold,mesh_h_s,mesh_h_u,S"));
    assert_eq!(lines.count(), 4);
    let waves = r["result"]["waves"].as_array().unwrap();
    assert!(waves[0]["eigenvalues"][0]["value"].as_f64() <= waves[1]["eigenvalues"][0]["value"].as_f64());

    let fan = write_config(dir.path(), "hp.toml", "[surface]\nname = \"hyperbolic-paraboloid\"\ns_max = 8.0\n");
    assert_eq!(run_in(dir.path(), "spectrum", &fan).0, 4);
}

#[test]
fn counterexample_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cc.toml", "[surface]\nname = \"capped-cylinder\"\n[counterexample]\ns_factors = [10.0]\nh = 0.1\n");
    let (code, r) = run_in(dir.path(), "counterexample", &cfg);
    assert_eq!(code, 0);
    let res = &r["result"];
    assert_eq!(res["sandwich"]["inside"], true);
    assert_eq!(res["nothing_below_epsilon1"], true);
    annotated(res, "result").unwrap();

    let other = write_config(dir.path(), "h.toml", "[surface]\nname = \"hyperboloid\"\n");
    assert_eq!(run_in(dir.path(), "counterexample", &other).0, 4);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.toml", "[surface]\nname = \"ex-m\"\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        assert!(layerspec(&["describe", "--config", &cfg, "--out", d.to_str().unwrap()]).status.success());
        assert!(layerspec(&["totals", "--config", &cfg, "--out", d.to_str().unwrap()]).status.success());
    }
    for f in ["describe.json", "describe_curvature.csv", "totals.json", "totals_partials.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert!(a.join("totals.timing.json").exists());

    let again = layerspec(&["totals", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(4));
    assert!(layerspec(&["totals", "--config", &cfg, "--out", a.to_str().unwrap(), "--force"]).status.success());
}

#[test]
fn config_errors_and_hypothesis_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[surface]\nname = \"hyperboloid\"\nbogus = 1\n", "totals", 4),
        ("[surface]\nname = \"torus\"\n", "totals", 4),
        ("[surface]\nname = \"hyperboloid\"\nx0 = 2.0\n", "totals", 4),
        ("[surface]\nname = \"hyperboloid\"\n[layer]\na = -1.0\n", "totals", 4),
        ("[surface]\nname = \"plane\"\n[certify]\nstrategies = [\"guess\"]\n", "certify", 4),
        ("[surface]\nname = \"hyperboloid\"\n[layer]\na = 2.0\n", "certify", 2),
        ("[surface]\nname = \"hyperboloid\"\n[layer]\na = 2.0\n", "check", 0),
    ];
    for (i, (body, cmd, code)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.toml"), body);
        assert_eq!(run_in(dir.path(), cmd, &cfg).0, *code, "{body}");
    }
    let o = layerspec(&["totals", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn defaults_round_trip() {
    let o = layerspec(&["describe", "--defaults"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cfg = RunConfig::parse(&text).unwrap();
    assert_eq!(cfg, RunConfig::defaults_for("hyperbolic-paraboloid").unwrap());
    assert!(text.contains("[solver]") && text.contains("tol"));
}
