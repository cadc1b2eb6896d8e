//! Command-line behavior: exit codes, formats, and the ingest/rank/fit loop
//! over generated data.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn homeadv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homeadv"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!(
            "homeadv-cli-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn usage_errors_exit_one() {
    let scratch = Scratch::new("usage");
    let out = homeadv(&["frobnicate"], &scratch.0);
    assert_eq!(code(&out), 1);
    let out = homeadv(&["fit", "--data", "x", "--format", "yaml"], &scratch.0);
    assert_eq!(code(&out), 1, "unknown format is a usage error");
    let out = homeadv(&["recover", "--replications", "0"], &scratch.0);
    assert_eq!(code(&out), 1);
    let out = homeadv(&["--help"], &scratch.0);
    assert_eq!(code(&out), 0);
}

#[test]
fn data_errors_exit_two() {
    let scratch = Scratch::new("data");
    let out = homeadv(&["ingest", "--data", "missing-dir"], &scratch.0);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    // A present directory with a malformed header is also a data error.
    std::fs::write(scratch.0.join("matches.csv"), "bogus,header\n1,2\n").unwrap();
    std::fs::write(
        scratch.0.join("teams.csv"),
        "id,name,home_city,home_stadium,fan_share\n",
    )
    .unwrap();
    std::fs::write(
        scratch.0.join("stadiums.csv"),
        "id,name,city,capacity,latitude,longitude\n",
    )
    .unwrap();
    let out = homeadv(&["ingest", "--data", "."], &scratch.0);
    assert_eq!(code(&out), 2);

    // Bad config file.
    let sim = homeadv(
        &[
            "simulate",
            "--teams",
            "4",
            "--seasons",
            "2",
            "--seed",
            "1",
            "--out",
            "d",
        ],
        &scratch.0,
    );
    assert_eq!(code(&sim), 0);
    std::fs::write(scratch.0.join("bad.conf"), "mystery_key = 1\n").unwrap();
    let out = homeadv(&["fit", "--data", "d", "--config", "bad.conf"], &scratch.0);
    assert_eq!(code(&out), 2);
}

#[test]
fn numerical_failures_exit_three() {
    let scratch = Scratch::new("numeric");
    // Two teams, one season: two observations per replication, far fewer
    // rows than model columns, so every replication fails.
    let out = homeadv(
        &[
            "recover",
            "--teams",
            "2",
            "--seasons",
            "1",
            "--replications",
            "2",
        ],
        &scratch.0,
    );
    assert_eq!(
        code(&out),
        3,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("every replication failed"));
}

#[test]
fn ingest_rank_fit_loop_on_generated_data() {
    let scratch = Scratch::new("loop");
    let sim = homeadv(
        &[
            "simulate",
            "--teams",
            "6",
            "--seasons",
            "6",
            "--seed",
            "11",
            "--beta-home",
            "0.5",
            "--draw-share",
            "0.25",
            "--out",
            "data",
        ],
        &scratch.0,
    );
    assert_eq!(code(&sim), 0);
    std::fs::write(
        scratch.0.join("study.conf"),
        "quality_window_start = 2001\nquality_window_end = 2006\ncoach_min_matches = 5\n",
    )
    .unwrap();

    let ingest = homeadv(&["ingest", "--data", "data"], &scratch.0);
    assert_eq!(code(&ingest), 0);
    let text = String::from_utf8_lossy(&ingest.stdout);
    assert!(text.contains("rows rejected:  0"), "{text}");
    assert!(text.contains("180 analyzable matches"), "{text}");

    let ingest_json = homeadv(
        &["ingest", "--data", "data", "--format", "json"],
        &scratch.0,
    );
    let parsed: serde_json::Value =
        serde_json::from_slice(&ingest_json.stdout).expect("ingest json parses");
    assert_eq!(parsed["rows_rejected"], 0);
    assert_eq!(parsed["neutral_excluded"], 0);

    let rank = homeadv(
        &[
            "rank",
            "--data",
            "data",
            "--config",
            "study.conf",
            "--format",
            "csv",
        ],
        &scratch.0,
    );
    assert_eq!(code(&rank), 0);
    let csv = String::from_utf8_lossy(&rank.stdout);
    assert!(csv.starts_with("ranking,rank,team,name,value"), "{csv}");
    // Three rankings over six teams.
    assert_eq!(csv.lines().count(), 1 + 18, "{csv}");

    let fit = homeadv(
        &[
            "fit",
            "--data",
            "data",
            "--config",
            "study.conf",
            "--format",
            "json",
            "--out",
            "report",
        ],
        &scratch.0,
    );
    assert_eq!(code(&fit), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(scratch.0.join("report/report.json")).unwrap())
            .expect("report parses");
    assert_eq!(report["strata"].as_array().unwrap().len(), 4);
    assert_eq!(report["observations_total"], 180);

    let recover = homeadv(
        &[
            "recover",
            "--teams",
            "6",
            "--seasons",
            "6",
            "--seed",
            "3",
            "--beta-home",
            "0.4",
            "--replications",
            "3",
            "--format",
            "csv",
        ],
        &scratch.0,
    );
    assert_eq!(
        code(&recover),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&recover.stderr)
    );
    let csv = String::from_utf8_lossy(&recover.stdout);
    assert!(csv.starts_with("variable,truth,mean_estimate"), "{csv}");
}
