use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gevreykit");

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_expansion(dir: &Path, name: &str, n: usize, a: f64) -> PathBuf {
    let c = run(&["coeffs", "stirling", "--n", &n.to_string()]);
    assert!(c.status.success());
    let coeffs: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    let e = serde_json::json!({"coefficients": coeffs, "m": 1.0 / 12.0, "a": a});
    let path = dir.join(name);
    std::fs::write(&path, e.to_string()).unwrap();
    path
}

#[test]
fn coeffs_stirling_json_and_csv() {
    let o = run(&["coeffs", "stirling", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "stirling");
    assert_eq!(v["values"][0], serde_json::json!(["1", "12"]));
    assert_eq!(v["values"][2], serde_json::json!(["-1", "360"]));
    assert_eq!(v["values"].as_array().unwrap().len(), 5);

    let o = run(&["coeffs", "bernoulli", "--n", "4", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "index,numerator,denominator\n0,1,1\n1,-1,2\n2,1,6\n3,0,1\n4,-1,30\n"
    );
}

#[test]
fn bad_kind_and_missing_file_exit_2() {
    assert_eq!(run(&["coeffs", "foo", "--n", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["borel-sum", "/nonexistent/coeffs.json", "--z", "1,0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["stirling-table", "--radii", "5,x"]).status.code(), Some(2));
}

#[test]
fn borel_sum_round_trip_matches_binet() {
    let dir = scratch("borel");
    let file = dir.join("stirling.json");
    let o = run(&["coeffs", "stirling", "--n", "30", "--out", file.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["borel-sum", file.to_str().unwrap(), "--z", "10,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let re = v["value"][0].as_f64().unwrap();
    assert!((re - 0.008330563433362871).abs() < 1e-8, "{re}");
    assert!(v["error_estimate"].as_f64().unwrap() < 1e-8);
}

#[test]
fn borel_sum_obstructed_ray_exits_3() {
    let dir = scratch("obstructed");
    let file = dir.join("stirling.json");
    run(&["coeffs", "stirling", "--n", "30", "--out", file.to_str().unwrap()]);
    // the continued transform has poles at +-2 pi i
    let o = run(&["borel-sum", file.to_str().unwrap(), "--z", "10,0", "--ray", "1.5707963267948966"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_binet_passes_and_wrong_rate_fails() {
    let dir = scratch("verify");
    let good = write_expansion(&dir, "good.json", 10, std::f64::consts::TAU);
    let o = run(&["verify", good.to_str().unwrap(), "--sampler", "binet", "--grid", "5:10:3@0.3", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert!(csv.starts_with("re_z,im_z,n,remainder,bound,ratio,pass\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 11);

    let bad = write_expansion(&dir, "bad.json", 10, 7.0);
    let o = run(&["verify", bad.to_str().unwrap(), "--sampler", "binet", "--grid", "5:10:3@0", "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",false\n"));
}

#[test]
fn verify_counterexample_and_file_samplers() {
    let dir = scratch("samplers");
    let zero = dir.join("zero.json");
    let e = serde_json::json!({
        "coefficients": {"kind": "user", "values": [["0", "1"], ["0", "1"], ["0", "1"], ["0", "1"]]},
        "m": 1.0,
        "a": 1.0,
    });
    std::fs::write(&zero, e.to_string()).unwrap();
    let o = run(&["verify", zero.to_str().unwrap(), "--sampler", "counterexample:0.5", "--grid", "2:10:5@0.2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    // e^{-z}/z sampled on the real axis
    let samples = dir.join("samples.csv");
    let mut text = String::from("re_z,im_z,re_p,im_p\n");
    for x in [2.0f64, 4.0, 8.0] {
        text.push_str(&format!("{x},0,{:e},0\n", (-x).exp() / x));
    }
    std::fs::write(&samples, text).unwrap();
    let sampler = format!("file:{}", samples.display());
    let o = run(&["verify", zero.to_str().unwrap(), "--sampler", &sampler, "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 4);

    let o = run(&["verify", zero.to_str().unwrap(), "--sampler", "nonsense", "--grid", "2@0", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn uniqueness_verdicts() {
    let dir = scratch("uniqueness");
    let m = dir.join("m.json");
    std::fs::write(&m, r#"{"variant":"constant","m":10}"#).unwrap();
    let verdict = |sector: &str| -> serde_json::Value {
        let o = run(&["uniqueness", m.to_str().unwrap(), &format!("--sector={sector}"), "--k", "1"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice(&o.stdout).unwrap()
    };
    assert_eq!(verdict("-2,2")["unique"], "yes");
    assert_eq!(verdict("-1,1")["unique"], "no");
    let critical = verdict("-1.5707963267948966,1.5707963267948966");
    assert_eq!(critical["criticality"], "critical");
    assert_eq!(critical["unique"], "yes");
}

#[test]
fn stirling_table_and_repeat_runs_are_byte_identical() {
    let args = ["stirling-table", "--radii", "5,10"];
    let first = run(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("abs_z,n_opt,bound,actual,error_constant"));
    let n_opts: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(n_opts, ["14", "30"]);
    assert_eq!(run(&args).stdout, first.stdout);

    let dir = scratch("repeat");
    let e = write_expansion(&dir, "e.json", 10, std::f64::consts::TAU);
    let verify = ["verify", e.to_str().unwrap(), "--sampler", "binet", "--grid", "5:10:3@0.3", "--n", "10"];
    let a = Command::new(BIN).args(verify).env("GEVREYKIT_THREADS", "1").output().unwrap();
    let b = Command::new(BIN).args(verify).env("GEVREYKIT_THREADS", "4").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}
