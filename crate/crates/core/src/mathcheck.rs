//! Oracle checks for the numeric kit, and a JSON batch evaluator so other
//! tools can cross-check the same functions.

use serde_json::{json, Value};

use crate::math::{self, LossParts, LossWeights, MathError};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

/// Brute-force advantage: sum over k of (gamma lambda)^k delta_{t+k},
/// stopping after the first done.
fn gae_brute(r: &[f64], v: &[f64], d: &[bool], boot: f64, g: f64, l: f64) -> Vec<f64> {
    let n = r.len();
    let delta = |t: usize| {
        let next = if t + 1 < n { v[t + 1] } else { boot };
        r[t] + if d[t] { 0.0 } else { g * next } - v[t]
    };
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            for k in t..n {
                sum += (g * l).powi((k - t) as i32) * delta(k);
                if d[k] {
                    break;
                }
            }
            sum
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every oracle check. `seed` drives the random instances.
pub fn self_check(seed: u64) -> Vec<Check> {
    let mut rng = Rng::new(seed);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + rng.below(64) as usize;
        let r: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let d: Vec<bool> = (0..n).map(|_| rng.below(8) == 0).collect();
        let boot = rng.uniform(-5.0, 5.0);
        let (g, l) = (rng.uniform(0.8, 1.0), rng.uniform(0.0, 1.0));
        let fast = math::gae(&r, &v, &d, boot, g, l).expect("aligned inputs");
        worst = worst.max(max_abs_diff(&fast.advantages, &gae_brute(&r, &v, &d, boot, g, l)));
    }
    out.push(Check::new("gae_brute_force", worst <= 1e-9, format!("max error {worst:.3e} over 1000 instances")));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + rng.below(200) as usize;
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-100.0, 100.0)).collect();
        let mut m: Vec<f64> = (0..n).map(|_| rng.below(2) as f64).collect();
        m[rng.below(n as u64) as usize] = 1.0;
        let kept: Vec<f64> = x.iter().zip(&m).filter(|(_, &k)| k == 1.0).map(|(&a, _)| a).collect();
        let plain = kept.iter().sum::<f64>() / kept.len() as f64;
        worst = worst.max((math::masked_mean(&x, &m).expect("valid mask") - plain).abs());
    }
    out.push(Check::new("masked_mean_filter", worst <= 1e-12, format!("max error {worst:.3e}")));

    let mut bad = 0usize;
    for w in 1..=512usize {
        for t in 0..=600usize {
            let win = math::memory_window(t, w);
            let naive: Vec<usize> = (0..t).filter(|&i| i + w >= t).collect();
            let mask_ok = match &win.mask {
                Some(m) => t < w && m.len() == w && m.iter().enumerate().all(|(j, &b)| b == (j < t)),
                None => t >= w,
            };
            if win.indices().collect::<Vec<_>>() != naive || !mask_ok {
                bad += 1;
            }
        }
    }
    out.push(Check::new("memory_window_naive", bad == 0, format!("{bad} of {} (t, W) pairs differ", 601 * 512)));

    let mut bad = 0usize;
    for _ in 0..1000 {
        let t = 1 + rng.below(2000) as usize;
        let l = 1 + rng.below(256) as usize;
        let c = math::chunk_episode(t, l).expect("positive sizes");
        if c.mask_mass() != t || c.sequences.len() != t.div_ceil(l) {
            bad += 1;
        }
    }
    out.push(Check::new("chunk_mask_mass", bad == 0, format!("{bad} of 1000 (T, L) pairs wrong")));

    let v = math::iqm(&[1.0, 2.0, 3.0, 4.0]).expect("four samples");
    out.push(Check::new("iqm_1234", v == 2.5, format!("{v}")));

    let v = math::ppo_clip_loss(&[1.5f64.ln()], &[0.0], &[1.0], 0.1).expect("finite");
    out.push(Check::new("clip_loss_hand", (v + 1.1).abs() <= 1e-12, format!("{v}")));

    let u = [1.0 / 3.0; 3];
    let v = math::entropy_multidiscrete(&[&u, &u]).expect("normalized");
    out.push(Check::new("entropy_uniform", (v - 2.0 * 3f64.ln()).abs() <= 1e-12, format!("{v}")));

    let v = math::bce_reconstruction(&[0.5], &[1.0]).expect("unit range");
    out.push(Check::new("bce_half", (v - 2f64.ln()).abs() <= 1e-12, format!("{v}")));

    let w = LossWeights::default();
    let v = math::combined_loss(LossParts { clip: 1.0, value: 1.0, entropy: 1.0, reconstruction: 1.0 }, &w).expect("finite");
    out.push(Check::new("combined_loss_ones", (v - 1.5999).abs() <= 1e-12, format!("{v}")));

    let pe = math::positional_encoding(2, 4).expect("even dim");
    let ok = pe[0] == [0.0, 1.0, 0.0, 1.0] && (pe[1][0] - 1f64.sin()).abs() <= 1e-15;
    out.push(Check::new("positional_encoding", ok, format!("{:?}", pe[1])));

    out
}

fn floats(v: &Value, key: &str) -> Result<Vec<f64>, String> {
    v[key]
        .as_array()
        .ok_or_else(|| format!("`{key}` must be an array of numbers"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| format!("`{key}` must be an array of numbers")))
        .collect()
}

fn number(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("`{key}` must be a number"))
}

fn count(v: &Value, key: &str) -> Result<usize, String> {
    v[key].as_u64().map(|x| x as usize).ok_or_else(|| format!("`{key}` must be a non-negative integer"))
}

fn math_err(e: MathError) -> String {
    e.to_string()
}

fn evaluate_one(req: &Value) -> Result<Value, String> {
    let op = req["op"].as_str().ok_or("request needs an `op` string")?;
    Ok(match op {
        "gae" => {
            let dones: Vec<bool> = floats(req, "dones")?.into_iter().map(|d| d != 0.0).collect();
            let g = math::gae(
                &floats(req, "rewards")?,
                &floats(req, "values")?,
                &dones,
                number(req, "bootstrap")?,
                number(req, "gamma")?,
                number(req, "lambda")?,
            )
            .map_err(math_err)?;
            json!({ "advantages": g.advantages, "returns": g.returns })
        }
        "ppo_clip_loss" => json!(math::ppo_clip_loss(
            &floats(req, "logp_new")?,
            &floats(req, "logp_old")?,
            &floats(req, "advantages")?,
            number(req, "clip_range")?,
        )
        .map_err(math_err)?),
        "value_loss" => json!(math::value_loss(&floats(req, "values")?, &floats(req, "targets")?).map_err(math_err)?),
        "entropy" => {
            let dims: Vec<Vec<f64>> = req["probs"]
                .as_array()
                .ok_or("`probs` must be an array of arrays")?
                .iter()
                .map(|d| floats(&json!({ "p": d }), "p"))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&[f64]> = dims.iter().map(Vec::as_slice).collect();
            json!(math::entropy_multidiscrete(&refs).map_err(math_err)?)
        }
        "bce" => json!(math::bce_reconstruction(&floats(req, "output")?, &floats(req, "target")?).map_err(math_err)?),
        "combined_loss" => {
            let parts: LossParts = serde_json::from_value(req["parts"].clone()).map_err(|e| e.to_string())?;
            let weights = match req.get("weights") {
                Some(w) => serde_json::from_value(w.clone()).map_err(|e| e.to_string())?,
                None => LossWeights::default(),
            };
            json!(math::combined_loss(parts, &weights).map_err(math_err)?)
        }
        "masked_mean" => json!(math::masked_mean(&floats(req, "losses")?, &floats(req, "mask")?).map_err(math_err)?),
        "chunk_episode" => {
            serde_json::to_value(math::chunk_episode(count(req, "length")?, count(req, "sequence_length")?).map_err(math_err)?)
                .expect("plain data")
        }
        "memory_window" => {
            serde_json::to_value(math::memory_window(count(req, "t")?, count(req, "window")?)).expect("plain data")
        }
        "positional_encoding" => {
            json!(math::positional_encoding(count(req, "length")?, count(req, "dim")?).map_err(math_err)?)
        }
        "iqm" => json!(math::iqm(&floats(req, "samples")?).map_err(math_err)?),
        "bootstrap_ci" => {
            let runs: Vec<Vec<f64>> = serde_json::from_value(req["runs"].clone()).map_err(|e| e.to_string())?;
            let conf = req.get("confidence").and_then(Value::as_f64).unwrap_or(0.95);
            let reps = req.get("replicates").and_then(Value::as_u64).unwrap_or(2000) as usize;
            let seed = req.get("seed").and_then(Value::as_u64).unwrap_or(0);
            let (lo, hi) = math::stratified_bootstrap_ci(&runs, conf, reps, seed).map_err(math_err)?;
            json!([lo, hi])
        }
        other => return Err(format!("unknown op `{other}`")),
    })
}

/// Evaluates one request object or an array of them. Each request becomes
/// `{"op", "result"}` or `{"op", "error"}`.
pub fn evaluate(batch: &Value) -> Value {
    let one = |req: &Value| {
        let op = req["op"].clone();
        match evaluate_one(req) {
            Ok(result) => json!({ "op": op, "result": result }),
            Err(error) => json!({ "op": op, "error": error }),
        }
    };
    match batch {
        Value::Array(items) => Value::Array(items.iter().map(one).collect()),
        other => one(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_check_passes() {
        for c in self_check(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn batch_requests() {
        let out = evaluate(&json!([
            { "op": "masked_mean", "losses": [2, 4, 100], "mask": [1, 1, 0] },
            { "op": "iqm", "samples": [1, 2, 3] },
            { "op": "memory_window", "t": 5, "window": 3 },
            { "op": "nope" },
        ]));
        assert_eq!(out[0]["result"], 3.0);
        assert!(out[1]["error"].as_str().unwrap().contains("at least 4"));
        assert_eq!(out[2]["result"]["start"], 2);
        assert_eq!(out[2]["result"]["end"], 5);
        assert!(out[3]["error"].is_string());
    }
}
