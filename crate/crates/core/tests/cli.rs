use std::path::Path;
use std::process::{Command, Output};

fn knotcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotcg")).args(args).output().expect("spawn knotcg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn cover_homology_table_and_json() {
    let o = knotcg(&["cover-homology", "--m", "1", "--q", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Z_7 ⊕ Z_7\na = 7\n");
    let o = knotcg(&["cover-homology", "--m", "-3", "--q", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["a"], "5");
    assert_eq!(v["smith_diagonal"], serde_json::json!(["5", "5"]));
    let o = knotcg(&["cover-homology", "--knot", "trefoil", "--q", "2"]);
    assert_eq!(stdout(&o), "Z_3\n");
}

#[test]
fn primes_list() {
    let o = knotcg(&["primes", "--count", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ps: Vec<&str> = v.as_array().unwrap().iter().map(|w| w["p"].as_str().unwrap()).collect();
    assert_eq!(ps, ["7", "13", "19", "31", "37"]);
}

#[test]
fn deck_and_signature() {
    let o = knotcg(&["deck", "--m", "5", "--p", "13"]);
    assert!(stdout(&o).starts_with("lambda+ = 9"));
    let o = knotcg(&["signature", "--J", "-trefoil", "--p", "7", "--c", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["signature"], "2");
}

#[test]
fn exit_codes() {
    let o = knotcg(&["deck", "--m", "1", "--p", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("≡ 2 mod 3"), "{}", stderr(&o));

    assert_eq!(knotcg(&["obstruct", "--m", "1"]).status.code(), Some(1));
    assert_eq!(knotcg(&["no-such-verb"]).status.code(), Some(1));
    assert_eq!(knotcg(&["--help"]).status.code(), Some(0));

    let o = Command::new(env!("CARGO_BIN_EXE_knotcg"))
        .args(["obstruct", "--m", "1", "--J", "trefoil", "--p", "7", "--n", "2"])
        .env("KNOTCG_ENUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    // an INCONCLUSIVE verdict is still a completed computation
    let o = knotcg(&["obstruct", "--m", "1", "--J", "unknot", "--p", "7", "--mode", "refined"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("INCONCLUSIVE"));
}

#[test]
fn output_is_independent_of_jobs() {
    let args =
        ["obstruct", "--m", "1", "--J", "trefoil", "--p", "7", "--n", "2", "--mode", "refined", "--format", "json"];
    let one = knotcg(&[&args[..], &["--jobs", "1"]].concat());
    let four = knotcg(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn both_modes_and_verify_round_trip() {
    let dir = std::env::temp_dir().join(format!("knotcg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("both.json");
    let o = knotcg(&[
        "obstruct",
        "--m",
        "1",
        "--J",
        "trefoil",
        "--p",
        "7",
        "--C",
        "1",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["mode"], serde_json::json!({"kind": "bounded", "C": "1"}));
    let o = knotcg(&["verify", "--cert", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 2);

    let text = std::fs::read_to_string(&out).unwrap().replacen("\"-8\"", "\"-9\"", 1);
    let tampered = dir.join("tampered.json");
    std::fs::write(&tampered, text).unwrap();
    assert_eq!(knotcg(&["verify", "--cert", tampered.to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn independence_from_family_file() {
    let family = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/family.json");
    let o = knotcg(&["independence", "--family", family.to_str().unwrap(), "--coeffs", "1,1", "--mode", "refined"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("member 1 (m=2): a = 19 ≡ 5 mod 7"), "{text}");
    assert!(text.contains("verdict      NONSLICE"));
    let o = knotcg(&["independence", "--family", family.to_str().unwrap(), "--coeffs", "0,-2", "--mode", "refined"]);
    assert!(stdout(&o).contains("p, q, u      19, 3, 1"), "{}", stdout(&o));
}
