//! Line-driven manual stepping. Each input line is a string of keys, one
//! step per key:
//!
//! ```text
//! continuous:  q w e      grid:  w  forward
//!              a . d             a  rotate left
//!              z s c             d  rotate right
//!                                .  no-op
//! g  dump the ground-truth frame     r  reset with the same seed
//! ```

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use memgym_core::{Action, ActionGrid, ActionMultiDiscrete, ActionSpace, EnvConfig, EnvId, EpisodeState};

use crate::{dump, EnvArgs};

#[derive(Args)]
pub(crate) struct PlayArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// Directory for frame dumps.
    #[arg(long, default_value = "frames")]
    out: PathBuf,
}

fn key_action(key: char, space: ActionSpace) -> Option<Action> {
    match space {
        ActionSpace::Grid => Some(
            match key {
                'w' => ActionGrid::Forward,
                'a' => ActionGrid::RotateLeft,
                'd' => ActionGrid::RotateRight,
                '.' => ActionGrid::NoOp,
                _ => return None,
            }
            .into(),
        ),
        ActionSpace::MultiDiscrete => {
            let (dx, dy) = match key {
                'q' => (-1, -1),
                'w' => (0, -1),
                'e' => (1, -1),
                'a' => (-1, 0),
                '.' => (0, 0),
                'd' => (1, 0),
                'z' => (-1, 1),
                's' => (0, 1),
                'c' => (1, 1),
                _ => return None,
            };
            Some(ActionMultiDiscrete::from_velocity(dx, dy).into())
        }
    }
}

fn reset(env: EnvId, config: &EnvConfig, seed: u64, args: &PlayArgs) -> Result<EpisodeState> {
    let (state, frame) = EpisodeState::reset(env, config.clone(), seed)?;
    dump(&frame, &args.out, "obs.png")?;
    println!("reset {env} seed {seed}; frame written to {}", args.out.join("obs.png").display());
    Ok(state)
}

pub(crate) fn play(args: PlayArgs) -> Result<()> {
    let (env, config) = args.env.resolve()?;
    fs::create_dir_all(&args.out)?;
    let mut state = reset(env, &config, args.env.seed, &args)?;
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    write!(stdout, "> ")?;
    stdout.flush()?;
    for line in stdin.lock().lines() {
        for key in line?.chars().filter(|c| !c.is_whitespace()) {
            match key {
                'r' => state = reset(env, &config, args.env.seed, &args)?,
                'g' => {
                    dump(&state.render_ground_truth(), &args.out, "gt.png")?;
                    println!("ground truth written to {}", args.out.join("gt.png").display());
                }
                _ => {
                    let Some(action) = key_action(key, state.action_space()) else {
                        println!("unknown key {key:?}");
                        continue;
                    };
                    if state.is_done() {
                        println!("episode finished; press r to reset");
                        continue;
                    }
                    let r = state.step(action)?;
                    dump(&r.observation, &args.out, "obs.png")?;
                    let info: Vec<String> = r.info.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!("step {} reward {} done {} {}", state.steps(), r.reward, r.done, info.join(" "));
                }
            }
        }
        write!(stdout, "> ")?;
        stdout.flush()?;
    }
    println!();
    Ok(())
}
