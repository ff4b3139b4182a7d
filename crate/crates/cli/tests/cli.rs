use std::io::Write;
use std::process::{Command, Output, Stdio};

fn memgym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memgym")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn info_matches_golden_tables() {
    let o = memgym(&["info"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("../../core/tests/golden/info.txt"));
}

#[test]
fn info_grid_overrides() {
    let out = stdout(&memgym(&["info", "MortarMayhemGrid"]));
    assert!(out.contains("  Execution Duration*           [2]\n"));
    assert!(out.contains("  Execution Delay*              [6]\n"));
    let json = stdout(&memgym(&["info", "MysteryPathGrid", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["MysteryPathGrid"]["max_episode_length"], 128);
}

#[test]
fn unknown_env_fails() {
    let o = memgym(&["info", "Pong"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Pong"));
    assert!(!memgym(&["run", "--env", "Pong"]).status.success());
}

#[test]
fn bad_flag_combinations_fail() {
    assert!(!memgym(&["run", "--env", "MysteryPath", "--every", "3"]).status.success());
    assert!(!memgym(&["serve", "--stdio", "--tcp", "127.0.0.1:0"]).status.success());
    assert!(!memgym(&["run", "--env", "MysteryPath", "--policy", "greedy"]).status.success());
}

#[test]
fn run_mystery_path_grid() {
    let o = memgym(&["run", "--env", "MysteryPathGrid", "--seed", "7", "--steps", "128"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("env            MysteryPathGrid"));
}

#[test]
fn record_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ep.rpl");
    let frames = dir.path().join("frames");
    let f = file.to_str().unwrap();
    let o = memgym(&[
        "run", "--env", "SearingSpotlights", "--seed", "4", "--steps", "40", "--policy", "oracle", "--record", f, "--frames",
        frames.to_str().unwrap(), "--every", "10", "--ground-truth",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(frames.join("obs_00000.png").exists());
    assert!(frames.join("gt_00010.png").exists());
    let o = memgym(&["replay", f]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("match:"));

    // Flip the third action byte: header is 4 + 2 + 1 + 17 + 8 + 4 + config,
    // then 8 initial checksum and 8 record count.
    let mut bytes = std::fs::read(&file).unwrap();
    let cfg_len = u32::from_be_bytes(bytes[32..36].try_into().unwrap()) as usize;
    let records = 36 + cfg_len + 16;
    let at = records + 2 * 18;
    bytes[at] = (bytes[at] + 4) % 9;
    std::fs::write(&file, &bytes).unwrap();
    let o = memgym(&["replay", f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("mismatch at step 3"), "{}", stdout(&o));

    std::fs::write(&file, &bytes[..bytes.len() - 3]).unwrap();
    assert_eq!(memgym(&["replay", f]).status.code(), Some(2));
}

#[test]
fn oracle_policy_run() {
    let o = memgym(&["run", "--env", "MortarMayhem", "--seed", "3", "--steps", "400", "--policy", "oracle"]);
    let out = stdout(&o);
    assert!(out.contains("steps          263"), "{out}");
    let total: f64 = out.lines().find_map(|l| l.strip_prefix("total_reward")).unwrap().trim().parse().unwrap();
    assert!((total - 1.0).abs() < 1e-9, "{out}");
}

#[test]
fn mathcheck_suite_and_batch() {
    let o = memgym(&["mathcheck"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));

    let mut child = Command::new(env!("CARGO_BIN_EXE_memgym"))
        .args(["mathcheck", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"op": "iqm", "samples": [1, 2, 3, 4]}"#).unwrap();
    let o = child.wait_with_output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], 2.5);
}

#[test]
fn play_steps_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_memgym"))
        .args(["play", "--env", "MysteryPathGrid", "--seed", "1", "--out", dir.path().to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"wad.\ng\nx\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("step 4 "), "{out}");
    assert!(out.contains("unknown key 'x'"));
    assert!(dir.path().join("gt.png").exists());
}

#[test]
fn serve_stdio_session() {
    use memgym_core::protocol::{read_message, write_message, Message, Tag};
    let mut input = Vec::new();
    write_message(&mut input, &Message::json(Tag::Hello, &serde_json::json!({"version": 1}))).unwrap();
    write_message(&mut input, &Message::json(Tag::Info, &serde_json::json!({"env": "EndlessMysteryPath"}))).unwrap();
    write_message(&mut input, &Message::json(Tag::Bye, &serde_json::json!({}))).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_memgym"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let mut r = o.stdout.as_slice();
    assert_eq!(read_message(&mut r).unwrap().kind(), Some(Tag::Hello));
    let info = read_message(&mut r).unwrap().body_json().unwrap();
    assert_eq!(info["config"]["stamina_level"], 20);
    assert_eq!(read_message(&mut r).unwrap().kind(), Some(Tag::Bye));
}
