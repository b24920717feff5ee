use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_weakcomm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut a = args.to_vec();
    a.extend(["--json", "-"]);
    let o = run(&a);
    (code(&o), serde_json::from_slice(&o.stdout).expect("json on stdout"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weakcomm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_c2() {
    let o = run(&["verify", "-p", "<a|a^2>"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("|X(G)| = 4"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn engel_q8() {
    let (c, v) = json(&["engel", "-p", "<i,j | i^4, i^2 j^-2, j^-1 i j i>"]);
    assert_eq!(c, 0);
    let r = &v["result"];
    assert_eq!((r["n"].as_u64(), r["d"].as_u64(), r["verdict"].as_bool()), (Some(2), Some(2), Some(true)));
    assert_eq!(r["m"].as_u64().unwrap(), 2 + 2 + r["s"].as_u64().unwrap() + 3);
}

#[test]
fn growth_of_double_of_z() {
    let (c, v) = json(&["growth", "-p", "<a|>", "--double", "--radius", "6"]);
    assert_eq!(c, 0);
    let sizes: Vec<u64> = v["result"]["sizes"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![1, 5, 13, 25, 41, 61, 85]);
    assert_eq!(v["result"]["classification"]["degree"], 2);
    assert_eq!(v["result"]["heuristic_flag"], true);
}

#[test]
fn reports_are_deterministic_and_carry_config() {
    let args = ["modules", "-p", "<a,b | a^2, b^2, (a b)^3>", "--json"];
    let (p1, p2) = (tmp("m1.json"), tmp("m2.json"));
    for p in [&p1, &p2] {
        let mut a = args.to_vec();
        a.push(p.to_str().unwrap());
        assert_eq!(code(&run(&a)), 0);
    }
    let (t1, t2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(t1, t2);
    let v: serde_json::Value = serde_json::from_slice(&t1).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["schema_version"], 1);
    assert_eq!(v["config"]["presentation"], "< a, b | a^2, b^2, a*b*a*b*a*b >");
    assert_eq!(v["command"], "modules");
}

#[test]
fn config_file_supplies_flags() {
    let cfg = tmp("run.toml");
    std::fs::write(&cfg, "presentation = \"<a|>\"\ndouble = true\nradius = 4\n").unwrap();
    let (c, v) = json(&["growth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["config"]["radius"], 4);
    assert_eq!(v["result"]["sizes"].as_array().unwrap().len(), 5);
    // flags win over the file
    let (_, v) = json(&["growth", "--config", cfg.to_str().unwrap(), "--radius", "2"]);
    assert_eq!(v["result"]["sizes"].as_array().unwrap().len(), 3);
    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(code(&run(&["parse", "--config", cfg.to_str().unwrap()])), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["parse", "-p", "<a | a^2"])), 3);
    assert_eq!(code(&run(&["parse"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&["realize", "-p", "<a,b | >", "--max-cosets", "50"])), 2);
    assert_eq!(code(&run(&["area", "-p", "<a,b | [a,b]>", "[a^3,b^3]", "--budget", "2", "--radius", "1"])), 2);
    // S3 is not nilpotent, so it is not Engel
    assert_eq!(code(&run(&["engel", "-p", "<a,b | a^2, b^2, (a b)^3>"])), 1);
}

#[test]
fn wp_examples() {
    let (c, v) = json(&["wp", "-p", "<a|a^2>", "[a, a~]", "a a~"]);
    assert_eq!(c, 0);
    let w = v["result"]["words"].as_array().unwrap();
    assert_eq!(w[0]["verdict"], "trivial");
    assert_eq!(w[1]["verdict"], "nontrivial");
    assert!(w[1]["evidence"]["Nontrivial"]["RhoCoordinate"].is_object());
}

#[test]
fn area_commands() {
    let (c, v) = json(&["area", "--grid", "2", "--extension", "heisenberg"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["certificate"]["area"], 4);
    assert_eq!(v["result"]["lifted"]["central_part"], "c^-4");
    assert_eq!(v["result"]["lifted"]["valid"], true);
    let (c, v) = json(&["area", "--cn", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["c_n"][3]["length"], 24);
    let (c, v) = json(&["area", "-p", "<a,b|[a,b]>", "[a^2,b^2]"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["minimum"], 4);
}

#[test]
fn parse_double_and_realize() {
    let (c, v) = json(&["parse", "-p", "<a,b | a^2 = b^3>"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["abelianization"], "Z");
    let (c, v) = json(&["double", "-p", "<a|a^3>"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["double"]["generators"], serde_json::json!(["a", "a~"]));
    let (c, v) = json(&["realize", "-p", "<a|a^3>", "--double"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["order"], 9);
    let file = tmp("s3.txt");
    std::fs::write(&file, "<a,b | a^2, b^2, (a b)^3>\n").unwrap();
    let (_, v) = json(&["realize", "--file", file.to_str().unwrap()]);
    assert_eq!(v["result"]["order"], 6);
}
