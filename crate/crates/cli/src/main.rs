//! `memgym`: run, serve, replay and inspect Memory Gym episodes.

mod play;

use std::fs;
use std::io::{self, BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use memgym_core::config::{info_document, INFO_ENVS};
use memgym_core::mathcheck;
use memgym_core::policy::PolicyKind;
use memgym_core::protocol::{serve_stream, Server};
use memgym_core::replay::{Recorder, ReplayLog, Verdict};
use memgym_core::{EnvConfig, EnvId, EpisodeState, Frame};

#[derive(Parser)]
#[command(name = "memgym", version, about = "Deterministic Memory Gym engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roll out a policy and print a summary.
    Run(RunArgs),
    /// Serve the wire protocol over TCP or stdin/stdout.
    Serve(ServeArgs),
    /// Re-simulate a recording and check every step.
    Replay { file: PathBuf },
    /// Print default reset parameters.
    Info {
        /// Environment id; all tables when omitted.
        env: Option<String>,
        /// Print the full parameter set as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Step an episode by hand from stdin, dumping each frame.
    Play(play::PlayArgs),
    /// Run the numeric oracle suite, or evaluate a JSON batch.
    Mathcheck {
        /// JSON request (object or array); `-` reads stdin.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
pub(crate) struct EnvArgs {
    #[arg(long)]
    env: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file with parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl EnvArgs {
    pub(crate) fn resolve(&self) -> Result<(EnvId, EnvConfig)> {
        let env: EnvId = self.env.parse()?;
        let config = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                EnvConfig::from_json(env, &text)?
            }
            None => EnvConfig::defaults(env),
        };
        Ok((env, config))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// Step budget; the episode may end earlier.
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    #[arg(long, default_value = "random")]
    policy: String,
    /// Seed of the random policy (defaults to the episode seed).
    #[arg(long)]
    policy_seed: Option<u64>,
    /// Write a replay file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Directory for PNG frame dumps.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Dump every n-th frame.
    #[arg(long, default_value_t = 1, requires = "frames")]
    every: u64,
    /// Also dump ground-truth frames.
    #[arg(long, requires = "frames")]
    ground_truth: bool,
}

#[derive(Args)]
struct ServeArgs {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:7878", conflicts_with = "stdio")]
    tcp: String,
    /// Serve a single session on stdin/stdout.
    #[arg(long)]
    stdio: bool,
    #[arg(long, default_value_t = 16)]
    max_sessions: usize,
}

pub(crate) fn dump(frame: &Frame, dir: &Path, name: &str) -> Result<()> {
    let path = dir.join(name);
    frame.write_png(&path).with_context(|| format!("writing {}", path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let (env, config) = args.env.resolve()?;
    let kind: PolicyKind = args.policy.parse()?;
    if args.every == 0 {
        bail!("--every must be at least 1");
    }
    let mut policy = kind.build(args.policy_seed.unwrap_or(args.env.seed));
    let (mut state, frame) = EpisodeState::reset(env, config, args.env.seed)?;
    if let Some(dir) = &args.frames {
        fs::create_dir_all(dir)?;
        dump(&frame, dir, "obs_00000.png")?;
        if args.ground_truth {
            dump(&state.render_ground_truth(), dir, "gt_00000.png")?;
        }
    }
    let mut recorder = Recorder::new(&state, &frame);
    let mut last = frame.checksum();
    while !state.is_done() && state.steps() < args.steps {
        let action = policy.act(&state);
        let result = state.step(action)?;
        recorder.record(action, &result);
        last = result.observation.checksum();
        if let Some(dir) = &args.frames {
            if state.steps() % args.every == 0 || result.done {
                dump(&result.observation, dir, &format!("obs_{:05}.png", state.steps()))?;
                if args.ground_truth {
                    dump(&state.render_ground_truth(), dir, &format!("gt_{:05}.png", state.steps()))?;
                }
            }
        }
    }
    println!("env            {env}");
    println!("seed           {}", args.env.seed);
    println!("steps          {}", state.steps());
    println!("done           {}", state.is_done());
    println!("total_reward   {}", state.total_reward());
    println!("final_checksum {last:016x}");
    for (k, v) in state.info() {
        println!("info.{k:<9} {v}");
    }
    if let Some(path) = &args.record {
        recorder.finish().write(path).with_context(|| format!("writing {}", path.display()))?;
        println!("recorded       {}", path.display());
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    if args.stdio {
        return Ok(serve_stream(BufReader::new(io::stdin().lock()), BufWriter::new(io::stdout().lock()))?);
    }
    let server = Server::bind(&args.tcp, args.max_sessions).with_context(|| format!("binding {}", args.tcp))?;
    eprintln!("listening on {} (max {} sessions)", server.local_addr()?, args.max_sessions);
    Ok(server.run()?)
}

fn replay(file: &Path) -> Result<ExitCode> {
    let log = ReplayLog::read(file).with_context(|| format!("reading {}", file.display()))?;
    match log.verify() {
        Verdict::Match { steps, final_checksum } => {
            println!("match: {} seed {} {steps} steps, final checksum {final_checksum:016x}", log.env, log.seed);
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Mismatch { step, reason } => {
            println!("mismatch at step {step}: {reason}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn info(env: Option<&str>, json: bool) -> Result<()> {
    let envs: Vec<EnvId> = match env {
        Some(name) => vec![name.parse()?],
        None => INFO_ENVS.to_vec(),
    };
    if json {
        let all: serde_json::Map<String, serde_json::Value> =
            envs.iter().map(|&e| (e.name().to_string(), EnvConfig::defaults(e).to_value())).collect();
        println!("{}", serde_json::to_string_pretty(&all)?);
    } else {
        print!("{}", info_document(&envs));
    }
    Ok(())
}

fn math(input: Option<&Path>, seed: u64) -> Result<ExitCode> {
    if let Some(path) = input {
        let text = if path == Path::new("-") {
            io::read_to_string(io::stdin())?
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        };
        let batch: serde_json::Value = serde_json::from_str(&text).context("parsing request")?;
        println!("{}", serde_json::to_string_pretty(&mathcheck::evaluate(&batch))?);
        return Ok(ExitCode::SUCCESS);
    }
    let checks = mathcheck::self_check(seed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {:<22} {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} checks, {failed} failed", checks.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| ExitCode::SUCCESS),
        Command::Serve(args) => serve(args).map(|_| ExitCode::SUCCESS),
        Command::Replay { file } => replay(&file),
        Command::Info { env, json } => info(env.as_deref(), json).map(|_| ExitCode::SUCCESS),
        Command::Play(args) => play::play(args).map(|_| ExitCode::SUCCESS),
        Command::Mathcheck { input, seed } => math(input.as_deref(), seed),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
