use std::io::{BufReader, BufWriter, Cursor};
use std::net::TcpStream;
use std::thread;

use memgym_core::policy::{Policy, RandomPolicy};
use memgym_core::protocol::{
    read_message, serve_stream, write_message, Client, ClientError, Message, Server, ServerHandle, Tag,
    ENGINE_VERSION,
};
use memgym_core::{EnvConfig, EnvId, EpisodeState};

fn start(max_sessions: usize) -> ServerHandle {
    let server = Server::bind("127.0.0.1:0", max_sessions).unwrap();
    server.spawn().unwrap().0
}

/// Checksums, rewards and done flags of `steps` random steps, in process.
fn local_trajectory(env: EnvId, seed: u64, steps: usize) -> Vec<(u64, u64, bool)> {
    let (mut s, frame) = EpisodeState::reset_default(env, seed).unwrap();
    let mut out = vec![(frame.checksum(), 0f64.to_bits(), false)];
    let mut p = RandomPolicy::new(seed);
    for _ in 0..steps {
        if s.is_done() {
            break;
        }
        let a = p.act(&s);
        let r = s.step(a).unwrap();
        out.push((r.observation.checksum(), r.reward.to_bits(), r.done));
    }
    out
}

fn remote_trajectory(addr: std::net::SocketAddr, env: EnvId, seed: u64, steps: usize) -> Vec<(u64, u64, bool)> {
    let mut c = Client::connect(addr).unwrap();
    let obs = c.reset(env, seed, None).unwrap();
    let mut out = vec![(obs.frame.checksum(), obs.reward.to_bits(), obs.done)];
    let mut p = RandomPolicy::new(seed);
    let space = env.action_space();
    let mut done = false;
    for _ in 0..steps {
        if done {
            break;
        }
        let o = c.step(p.sample(space)).unwrap();
        done = o.done;
        out.push((o.frame.checksum(), o.reward.to_bits(), o.done));
    }
    c.bye().unwrap();
    out
}

#[test]
fn hello_reports_engine_version() {
    let h = start(4);
    let c = Client::connect(h.addr()).unwrap();
    assert_eq!(c.engine_version(), ENGINE_VERSION);
    c.bye().unwrap();
    h.shutdown();
}

#[test]
fn loopback_matches_in_process_run() {
    let h = start(4);
    for env in [EnvId::MysteryPath, EnvId::MortarMayhemGrid, EnvId::SearingSpotlights] {
        let local = local_trajectory(env, 11, 512);
        let remote = remote_trajectory(h.addr(), env, 11, 512);
        assert_eq!(local, remote, "{env}");
    }
    h.shutdown();
}

#[test]
fn loopback_512_steps_byte_identical() {
    let h = start(2);
    // Endless Mystery Path under a random policy ends fast; a long timeout
    // keeps Mystery Path alive for the full 512 steps.
    let mut c = Client::connect(h.addr()).unwrap();
    let (mut s, frame) = EpisodeState::reset_default(EnvId::MysteryPath, 3).unwrap();
    let obs = c.reset(EnvId::MysteryPath, 3, Some(s.config())).unwrap();
    assert_eq!(obs.frame, frame);
    let mut p = RandomPolicy::new(9);
    for _ in 0..512 {
        if s.is_done() {
            break;
        }
        let a = p.act(&s);
        let local = s.step(a).unwrap();
        let remote = c.step(a).unwrap();
        assert_eq!(remote.frame.as_bytes(), local.observation.as_bytes());
        assert_eq!(remote.reward.to_bits(), local.reward.to_bits());
        assert_eq!(remote.done, local.done);
        assert_eq!(remote.info, local.info);
        assert_eq!(c.ground_truth().unwrap().frame, s.render_ground_truth());
    }
    assert_eq!(s.steps(), 512);
    h.shutdown();
}

#[test]
fn concurrent_sessions_are_isolated() {
    let h = start(8);
    let addr = h.addr();
    let runs: Vec<_> = (0..4)
        .map(|_| thread::spawn(move || remote_trajectory(addr, EnvId::EndlessSearingSpotlights, 5, 300)))
        .collect();
    let results: Vec<_> = runs.into_iter().map(|t| t.join().unwrap()).collect();
    for r in &results[1..] {
        assert_eq!(r, &results[0]);
    }
    assert_eq!(results[0], local_trajectory(EnvId::EndlessSearingSpotlights, 5, 300));
    h.shutdown();
}

#[test]
fn unknown_tag_gets_error_and_connection_survives() {
    let h = start(2);
    let mut c = Client::connect(h.addr()).unwrap();
    let reply = c.exchange(&Message { tag: 42, body: b"{}".to_vec() }).unwrap();
    assert_eq!(reply.kind(), Some(Tag::Error));
    assert!(reply.body_json().unwrap()["message"].as_str().unwrap().contains("42"));
    let reply = c.exchange(&Message { tag: Tag::Step as u8, body: b"not json".to_vec() }).unwrap();
    assert_eq!(reply.kind(), Some(Tag::Error));
    let obs = c.reset(EnvId::MortarMayhem, 1, None).unwrap();
    assert_eq!(obs.step, 0);
    c.bye().unwrap();
    h.shutdown();
}

#[test]
fn engine_errors_are_reported() {
    let h = start(2);
    let mut c = Client::connect(h.addr()).unwrap();
    assert!(matches!(c.step_byte(0), Err(ClientError::Server(m)) if m.contains("reset")));
    let bad = c.exchange(&Message::json(Tag::Reset, &serde_json::json!({"env": "Nope", "seed": 1}))).unwrap();
    assert_eq!(bad.kind(), Some(Tag::Error));
    let mut config = EnvConfig::defaults(EnvId::EndlessMysteryPath);
    if let EnvConfig::EndlessMysteryPath(c) = &mut config {
        c.stamina_level = 1;
    }
    c.reset(EnvId::EndlessMysteryPath, 1, Some(&config)).unwrap();
    let o = c.step_byte(4).unwrap();
    assert!(o.done);
    match c.step_byte(4) {
        Err(ClientError::Server(m)) => assert!(m.contains("finished")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(c.step_byte(200), Err(ClientError::Server(_))));
    let info = c.info().unwrap();
    assert_eq!(info["env"], "EndlessMysteryPath");
    assert_eq!(info["config"]["stamina_level"], 1);
    let defaults = c.env_info(EnvId::MortarMayhemGrid).unwrap();
    assert_eq!(defaults["config"]["execution_duration"], serde_json::json!([2]));
    h.shutdown();
}

#[test]
fn session_limit_is_enforced() {
    let h = start(1);
    let first = Client::connect(h.addr()).unwrap();
    let mut second = TcpStream::connect(h.addr()).unwrap();
    let reply = read_message(&mut second).unwrap();
    assert_eq!(reply.kind(), Some(Tag::Error));
    first.bye().unwrap();
    // The slot frees up once the first session closes.
    let mut ok = false;
    for _ in 0..50 {
        if let Ok(c) = Client::connect(h.addr()) {
            c.bye().unwrap();
            ok = true;
            break;
        }
        thread::sleep(std::time::Duration::from_millis(20));
    }
    assert!(ok);
    h.shutdown();
}

#[test]
fn stdio_mode_serves_a_script() {
    let mut input = Vec::new();
    write_message(&mut input, &Message::json(Tag::Hello, &serde_json::json!({"version": 1}))).unwrap();
    write_message(&mut input, &Message::json(Tag::Reset, &serde_json::json!({"env": "MysteryPathGrid", "seed": 7})))
        .unwrap();
    write_message(&mut input, &Message::json(Tag::Step, &serde_json::json!({"action": 1}))).unwrap();
    write_message(&mut input, &Message::json(Tag::Bye, &serde_json::json!({}))).unwrap();
    let mut output = Vec::new();
    serve_stream(Cursor::new(input), &mut output).unwrap();
    let mut r = output.as_slice();
    let tags: Vec<_> = std::iter::from_fn(|| read_message(&mut r).ok()).map(|m| m.kind()).collect();
    assert_eq!(tags, [Some(Tag::Hello), Some(Tag::Reset), Some(Tag::Step), Some(Tag::Bye)]);
}

#[test]
fn client_over_pipes() {
    let (mut s, _) = EpisodeState::reset_default(EnvId::MortarMayhem, 2).unwrap();
    let (server_in, client_out) = std::io::pipe().unwrap();
    let (client_in, server_out) = std::io::pipe().unwrap();
    let server = thread::spawn(move || serve_stream(BufReader::new(server_in), BufWriter::new(server_out)));
    let mut c = Client::handshake(BufReader::new(client_in), BufWriter::new(client_out)).unwrap();
    c.reset(EnvId::MortarMayhem, 2, None).unwrap();
    let mut p = RandomPolicy::new(1);
    while !s.is_done() {
        let a = p.act(&s);
        assert_eq!(c.step(a).unwrap().frame, s.step(a).unwrap().observation);
    }
    c.bye().unwrap();
    server.join().unwrap().unwrap();
}
