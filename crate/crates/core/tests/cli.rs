use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clusterrank::synthetic::PlantedModes;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterrank"))
        .args(args)
        .env("CLUSTERRANK_LOG", "off")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn sample(dir: &Path) -> PathBuf {
    let path = dir.join("ratings.csv");
    let d = PlantedModes {
        users: 60,
        items: 20,
        ..Default::default()
    }
    .generate()
    .unwrap();
    d.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn rank_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = sample(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = cli(&["rank", "-d", data.to_str().unwrap(), "-o", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rankings = read(out_dir.join("rankings.csv"));
    assert!(rankings.starts_with("item,ranking\n"));
    assert_eq!(rankings.lines().count(), 21);
    assert!(read(out_dir.join("run.csv")).contains("bipartite"));
    assert_eq!(read(out_dir.join("reputations.csv")).lines().count(), 61);
}

#[test]
fn multipartite_writes_cluster_files() {
    let tmp = tempfile::tempdir().unwrap();
    let data = sample(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = cli(&[
        "rank",
        "-d",
        data.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--mode",
        "multipartite",
        "--alpha",
        "0.9",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(out_dir.join("clusters.csv")).lines().count(), 61);
    assert!(out_dir.join("cluster_rankings.csv").exists());
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    sample(tmp.path());
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "dataset = \"ratings.csv\"\noutput = \"from_config\"\n[ranker]\nlambda = 0.2\n",
    )
    .unwrap();
    let out = cli(&["stats", "-c", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["users"], 60);
    assert!(tmp.path().join("from_config/stats.csv").exists());

    let out_dir = tmp.path().join("flag");
    let out = cli(&["rank", "-c", cfg.to_str().unwrap(), "-o", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("rankings.csv").exists());
}

#[test]
fn config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let data = sample(tmp.path());
    let d = data.to_str().unwrap();
    let o = tmp.path().join("o");
    let o = o.to_str().unwrap();
    // lambda above the contraction bound
    assert_eq!(code(&cli(&["rank", "-d", d, "-o", o, "--lambda", "0.9"])), 1);
    assert_eq!(code(&cli(&["rank", "-o", o])), 1);
    assert_eq!(code(&cli(&["rank", "-d", d, "--r-min", "5", "--r-max", "1"])), 1);
    assert_eq!(
        code(&cli(&[
            "attack-eval",
            "-d",
            d,
            "-o",
            o,
            "--attack",
            "love-hate",
            "--fraction",
            "0.9"
        ])),
        1
    );

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "dataset = \"ratings.csv\"\nno_such_key = 1\n").unwrap();
    let out = cli(&["rank", "-c", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(
        code(&cli(&[
            "stats",
            "-c",
            tmp.path().join("missing.toml").to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn runtime_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.csv");
    assert_eq!(code(&cli(&["stats", "-d", missing.to_str().unwrap()])), 2);

    let malformed = tmp.path().join("bad.csv");
    std::fs::write(&malformed, "u1,o1,4,1\nu2,o1,seven,2\n").unwrap();
    let out = cli(&["stats", "-d", malformed.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    // one refinement is not enough to converge; outputs are still written
    let data = sample(tmp.path());
    let o = tmp.path().join("o");
    let out = cli(&[
        "rank",
        "-d",
        data.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
        "--max-iters",
        "1",
    ]);
    assert_eq!(code(&out), 2);
    assert!(read(o.join("run.csv")).contains("false"));
}

#[test]
fn undefined_tau_is_na() {
    // every item has the same ratings, so clean rankings are all tied
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("flat.csv");
    let mut text = String::new();
    for u in 0..8 {
        for o in 0..4 {
            text.push_str(&format!("u{u},o{o},3,{}\n", u * 4 + o));
        }
    }
    std::fs::write(&data, text).unwrap();
    let o = tmp.path().join("o");
    let out = cli(&[
        "attack-eval",
        "-d",
        data.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
        "--attack",
        "random-spam",
        "--sweep",
        "0,0.5",
        "--methods",
        "AA,BWA",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(o.join("attack_eval.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("NA")), "{csv}");
}

#[test]
fn sweep_rows_and_timings() {
    let tmp = tempfile::tempdir().unwrap();
    let data = sample(tmp.path());
    let o = tmp.path().join("o");
    let out = cli(&[
        "attack-eval",
        "-d",
        data.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
        "--attack",
        "reputation-attack",
        "--sweep",
        "0.1,0.3",
        "--methods",
        "AA,BWA,LD",
        "--filler-count",
        "5",
        "--timings",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(o.join("attack_eval.csv"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 12);
    assert_eq!(read(o.join("timings.csv")).lines().count(), 1 + 2 * 3);
}
