use std::io::Write;
use std::process::{Command, Output};

fn guesswork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guesswork"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value of `column` in the first data row of a CSV table.
fn first_value(text: &str, column: &str) -> String {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].to_string()
}

#[test]
fn centralized_bec_exponent() {
    let out = guesswork(&[
        "exponent", "--channel", "bec", "--param", "0.5", "--m", "2", "--rho", "1", "--strategy", "centralized",
    ]);
    assert!(out.status.success());
    assert_eq!(first_value(&stdout(&out), "value"), "0.321928095");
}

#[test]
fn useless_bsc_exponent_is_one_bit() {
    let out = guesswork(&[
        "exponent", "--channel", "bsc", "--param", "0.5", "--m", "3", "--rho", "1", "--strategy", "decentralized",
    ]);
    assert!(out.status.success());
    assert_eq!(first_value(&stdout(&out), "value"), "1");
}

#[test]
fn centralized_bec_moment() {
    let out = guesswork(&[
        "moment", "--channel", "bec", "--param", "0.5", "--n", "1", "--m", "2", "--rho", "1", "--strategy",
        "centralized",
    ]);
    assert!(out.status.success());
    assert_eq!(first_value(&stdout(&out), "moment"), "1.125");
}

#[test]
fn output_is_self_describing() {
    let out = guesswork(&["moment", "--channel", "bsc", "--param", "0.2", "--n-grid", "1:3", "--m", "2"]);
    let text = stdout(&out);
    let meta = text.lines().next().unwrap().strip_prefix("# ").unwrap();
    let meta: serde_json::Value = serde_json::from_str(meta).unwrap();
    assert_eq!(meta["tool"], "guesswork");
    assert_eq!(meta["config"]["m"], 2);
    assert_eq!(text.lines().count(), 2 + 3);

    let json = guesswork(&[
        "moment", "--channel", "bsc", "--param", "0.2", "--n-grid", "1:3", "--m", "2", "--output", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 3);
    assert_eq!(doc["metadata"]["command"], "moment");
}

#[test]
fn bec_sweep_puts_pooling_lowest_in_the_interior() {
    let out = guesswork(&["exponent", "--channel", "bec", "--sweep", "--m", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 11 * 5);
    for chunk in rows.chunks(5) {
        let eps: f64 = chunk[0][1].parse().unwrap();
        let central: f64 = chunk[0][5].parse().unwrap();
        assert_eq!(chunk[0][2], "centralized");
        if eps > 0.0 && eps < 1.0 {
            for row in &chunk[1..] {
                assert!(central < row[5].parse::<f64>().unwrap(), "eps = {eps}");
            }
        }
    }
}

#[test]
fn simulation_is_byte_identical_across_runs() {
    let args = [
        "simulate", "--channel", "bsc", "--param", "0.25", "--m", "2", "--n-grid", "4:8:2", "--trials", "5000",
        "--seed", "7",
    ];
    let a = guesswork(&args);
    let b = guesswork(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("exponent_fit"));
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(guesswork(&["moment", "--channel", "bec", "--param", "0.5"]).status.code(), Some(1));
    assert_eq!(guesswork(&["exponent", "--channel", "bec"]).status.code(), Some(1));
    assert_eq!(
        guesswork(&["exponent", "--channel", "bec", "--param", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(guesswork(&["check", "--suite", "nope"]).status.code(), Some(1));
    // Guards.
    let capped = guesswork(&["moment", "--channel", "bsc", "--param", "0.2", "--n", "30"]);
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap is 16777216"));
    let guard = guesswork(&["exponent", "--channel", "bsc", "--param", "0.2", "--m", "3", "--strategy", "centralized"]);
    assert_eq!(guard.status.code(), Some(2));
    assert_eq!(guesswork(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_exit_code_follows_the_verdicts() {
    let pass = guesswork(&["check", "--suite", "closed-forms"]);
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(stdout(&pass).matches(",PASS,").count(), 2);

    let soft = guesswork(&["check", "--suite", "soft-elimination"]);
    let failed = stdout(&soft).contains(",FAIL,");
    assert_eq!(soft.status.code(), Some(if failed { 3 } else { 0 }));
}

#[test]
fn toy_csv_and_metadata() {
    let out = guesswork(&["toy", "--top-k", "200", "--budgets", "1,100,10000", "--seed", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let meta: serde_json::Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    for key in ["seed", "flip_prob", "m", "top_k"] {
        assert!(meta.get(key).is_some(), "{key}");
    }
    assert_eq!(lines.next(), Some("strategy,budget,fraction_recovered"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn toy_reads_a_corpus_file() {
    let dir = std::env::temp_dir().join(format!("guesswork-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "password\npassword\nrockyou\nPassword1\n3\tabcdef").unwrap();
    drop(f);
    let out = guesswork(&["toy", "--corpus", path.to_str().unwrap(), "--flip-prob", "0", "--budgets", "1"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(2) {
        assert!(line.ends_with(",1"), "{line}");
    }
    let missing = guesswork(&["toy", "--corpus", dir.join("absent.txt").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn custom_channel_file() {
    let dir = std::env::temp_dir().join(format!("guesswork-custom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("channel.json");
    std::fs::write(
        &path,
        r#"{"px": [0.5, 0.5], "alphabet_x": ["0", "1"], "alphabet_y": ["0", "1", "?"],
            "w": [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = guesswork(&["moment", "--channel", "custom", "--channel-file", p, "--n", "1", "--m", "2", "--strategy", "centralized"]);
    assert_eq!(first_value(&stdout(&out), "moment"), "1.125");
    let out = guesswork(&["exponent", "--channel", "custom", "--channel-file", p, "--m", "2", "--strategy", "centralized"]);
    assert_eq!(first_value(&stdout(&out), "value"), "0.321928095");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn rank_subcommand() {
    let out = guesswork(&["rank", "--channel", "bec", "--param", "0.4", "--x", "0110", "--y", "0??0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(first_value(&text, "rank"), "4");
    assert_eq!(first_value(&text, "tie_last"), "4");
    let bad = guesswork(&["rank", "--channel", "bec", "--param", "0.4", "--x", "01", "--y", "0?0"]);
    assert_eq!(bad.status.code(), Some(1));
}
