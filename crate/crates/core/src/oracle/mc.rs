//! Exact stage-wise Monte Carlo.
//!
//! Paths are simulated from the model's own renewal structure: between
//! jumps the position moves by explicit Wiener-Hopf factors (exponential
//! drop and rise for a Brownian part, a deterministic-rate rise without
//! one), so no time discretization is involved and every estimate is
//! unbiased up to explicitly reported truncation.
//!
//! Reproducibility contract: path i draws from a generator keyed by
//! (seed, stream_id, i), paths are partitioned into `SUBSTREAMS` fixed
//! substreams by index, and partial results are combined in substream
//! order. The thread count therefore never affects the output.

use super::orbit::OrbitModel;
use super::{McEstimate, SimConfig};
use crate::error::{Error, Result};
use crate::levy::{laplace_exponent_at, phi_q, LevyModel};
use crate::linalg::Matrix;
use crate::medist::MeSampler;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed number of accumulation substreams.
pub const SUBSTREAMS: usize = 64;

/// -ln(1e-12): early-exit distance is sized so the abandoned mass is
/// below 1e-12, far under any Monte Carlo standard error.
const EXIT_LOG_BOUND: f64 = 27.631_021_115_928_547;

/// Fluid paths this far above their target are abandoned; the abandoned
/// return mass decays exponentially in this distance.
const ORBIT_EXIT_LEVEL: f64 = 50.0;

/// Entry tolerance when checking blocks for a Markov-chain reading.
const MARKOV_TOL: f64 = 1e-9;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one path, a pure function of (seed, stream, index).
fn path_rng(seed: u64, stream_id: u64, index: u64) -> ChaCha8Rng {
    let mut state = splitmix(seed);
    state = splitmix(state ^ stream_id.rotate_left(17));
    state = splitmix(state ^ index.rotate_left(31));
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = splitmix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn exp_draw(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Runs every path, folding them into per-substream accumulators that are
/// returned in substream order.
fn reduce_substreams<A, I, S>(cfg: &SimConfig, init: I, step: S) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut ChaCha8Rng, &mut A) -> Result<()> + Sync,
{
    if cfg.n_paths == 0 {
        return Err(Error::Domain("simulation needs at least one path".into()));
    }
    let run = |substream: usize| -> Result<A> {
        let mut acc = init();
        let mut index = substream;
        while index < cfg.n_paths {
            let mut rng = path_rng(cfg.seed, cfg.stream_id, index as u64);
            step(&mut rng, &mut acc)?;
            index += SUBSTREAMS;
        }
        Ok(acc)
    };

    let threads = cfg.threads.clamp(1, SUBSTREAMS);
    if threads == 1 {
        return (0..SUBSTREAMS).map(run).collect();
    }
    let chunk = SUBSTREAMS.div_ceil(threads);
    let starts: Vec<usize> = (0..SUBSTREAMS).step_by(chunk).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|&start| {
                let run = &run;
                scope.spawn(move || {
                    (start..(start + chunk).min(SUBSTREAMS))
                        .map(run)
                        .collect::<Result<Vec<A>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(SUBSTREAMS);
        for handle in handles {
            let part = handle
                .join()
                .map_err(|_| Error::Numerical("simulation worker panicked".into()))??;
            out.extend(part);
        }
        Ok(out)
    })
}

#[derive(Clone, Copy, Default)]
struct WeightAcc {
    sum: f64,
    sumsq: f64,
    truncated: usize,
}

fn finalize_weights(accs: &[WeightAcc], n: usize) -> McEstimate {
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut truncated = 0;
    for acc in accs {
        sum += acc.sum;
        sumsq += acc.sumsq;
        truncated += acc.truncated;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let stderr = if n > 1 {
        let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean,
        stderr,
        n,
        truncated,
    }
}

/// Distance beyond which a level path with upward drift is abandoned: a
/// negative theta with psi(theta) < 0 bounds the probability of ever
/// dropping by g by e^{theta g}.
fn escape_gap(m: &LevyModel) -> Option<f64> {
    let abscissa = m.jump().abscissa();
    for k in (1..=15).rev() {
        let theta = abscissa * k as f64 / 16.0;
        if let Ok(value) = laplace_exponent_at(m, theta) {
            if value < -1e-12 {
                return Some(EXIT_LOG_BOUND / -theta);
            }
        }
    }
    None
}

/// Estimates E[e^{-phi Z} 1{passage below -x before killing}], the
/// point-hitting probability of -x, by exact stage simulation.
pub fn mc_hitting_probability(
    m: &LevyModel,
    q: f64,
    x: f64,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("hitting level must be nonnegative, got {x}")));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("killing rate must be nonnegative, got {q}")));
    }
    let root = phi_q(m, q)?.root;
    let sampler = MeSampler::new(m.jump())?;
    let escape = if q == 0.0 { escape_gap(m) } else { None };
    let lam = m.rate();
    let kill_prob = q / (lam + q);

    let accs = if m.is_bounded_variation() {
        let rise_rate = (lam + q) / m.drift();
        reduce_substreams(cfg, WeightAcc::default, |rng, acc| {
            let (w, truncated) =
                bv_path(rng, rise_rate, kill_prob, root, &sampler, x, escape, cfg.max_stages)?;
            acc.sum += w;
            acc.sumsq += w * w;
            acc.truncated += truncated as usize;
            Ok(())
        })?
    } else {
        let sigma2 = m.sigma() * m.sigma();
        let disc = (m.drift() * m.drift() + 2.0 * sigma2 * (lam + q)).sqrt();
        let omega = (disc + m.drift()) / sigma2;
        let eta = (disc - m.drift()) / sigma2;
        reduce_substreams(cfg, WeightAcc::default, |rng, acc| {
            let (w, truncated) = uv_path(
                rng,
                omega,
                eta,
                kill_prob,
                root,
                &sampler,
                x,
                escape,
                cfg.max_stages,
            )?;
            acc.sum += w;
            acc.sumsq += w * w;
            acc.truncated += truncated as usize;
            Ok(())
        })?
    };
    Ok(finalize_weights(&accs, cfg.n_paths))
}

/// One drift-and-jumps path: rise, maybe kill, jump, check passage.
#[allow(clippy::too_many_arguments)]
fn bv_path(
    rng: &mut ChaCha8Rng,
    rise_rate: f64,
    kill_prob: f64,
    root: f64,
    sampler: &MeSampler,
    x: f64,
    escape: Option<f64>,
    max_stages: usize,
) -> Result<(f64, bool)> {
    let mut level = 0.0_f64;
    for _ in 0..max_stages {
        level += exp_draw(rng, rise_rate);
        if kill_prob > 0.0 && rng.random::<f64>() < kill_prob {
            return Ok((0.0, false));
        }
        level -= sampler.sample(1.0 - rng.random::<f64>())?;
        if level <= -x {
            // level + x = -Z, the (negated) overshoot below the target.
            return Ok(((root * (level + x)).exp(), false));
        }
        if let Some(gap) = escape {
            if level + x >= gap {
                return Ok((0.0, false));
            }
        }
    }
    Ok((0.0, true))
}

/// One Brownian-part path: exponential drop (passage is creeping, weight
/// one), exponential rise, maybe kill, jump, check passage by overshoot.
#[allow(clippy::too_many_arguments)]
fn uv_path(
    rng: &mut ChaCha8Rng,
    omega: f64,
    eta: f64,
    kill_prob: f64,
    root: f64,
    sampler: &MeSampler,
    x: f64,
    escape: Option<f64>,
    max_stages: usize,
) -> Result<(f64, bool)> {
    let mut level = 0.0_f64;
    for _ in 0..max_stages {
        let down = exp_draw(rng, omega);
        // The drop happens before the stage-ending event, so passage here
        // counts even if the kill clock ends the stage.
        if level - down <= -x {
            return Ok((1.0, false));
        }
        level += exp_draw(rng, eta) - down;
        if kill_prob > 0.0 && rng.random::<f64>() < kill_prob {
            return Ok((0.0, false));
        }
        level -= sampler.sample(1.0 - rng.random::<f64>())?;
        if level <= -x {
            return Ok(((root * (level + x)).exp(), false));
        }
        if let Some(gap) = escape {
            if level + x >= gap {
                return Ok((0.0, false));
            }
        }
    }
    Ok((0.0, true))
}

/// How a fluid path resolved.
enum Outcome {
    /// Crossed the target level in the given minus phase.
    Hit(usize),
    /// Terminated or escaped upward before crossing.
    Lost,
    /// Stage budget exhausted.
    Truncated,
}

/// Checks that every block supports a Markov-chain reading.
fn validate_markovian(om: &OrbitModel) -> Result<()> {
    for (name, c) in [("plus", om.c_plus()), ("minus", om.c_minus())] {
        for i in 0..c.rows() {
            for j in 0..c.cols() {
                if i == j && c[(i, j)] > MARKOV_TOL {
                    return Err(Error::Unsupported(format!(
                        "{name} flow block has a positive diagonal at {i}"
                    )));
                }
                if i != j && c[(i, j)] < -MARKOV_TOL {
                    return Err(Error::Unsupported(format!(
                        "{name} flow block has a negative rate at ({i}, {j})"
                    )));
                }
            }
        }
    }
    for (name, d) in [("plus-to-minus", om.d_pm()), ("minus-to-plus", om.d_mp())] {
        if d.data().iter().any(|&v| v < -MARKOV_TOL) {
            return Err(Error::Unsupported(format!(
                "{name} jump block has a negative rate"
            )));
        }
    }
    if om.initial_plus().data().iter().any(|&v| v < -MARKOV_TOL) {
        return Err(Error::Unsupported(
            "initial orbit has a negative coordinate".into(),
        ));
    }
    Ok(())
}

fn sample_categorical(rng: &mut ChaCha8Rng, row: &Matrix) -> Result<usize> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for j in 0..row.cols() {
        let w = row[(0, j)].max(0.0);
        if w > 0.0 {
            last = Some(j);
        }
        acc += w;
        if u < acc {
            return Ok(j);
        }
    }
    last.ok_or_else(|| Error::InvalidModel("initial orbit has no positive mass".into()))
}

/// One fluid path; the level starts at 0, rises in plus phases, falls in
/// minus phases, and the outcome is the phase crossing level -x.
fn record_path(
    om: &OrbitModel,
    x: f64,
    max_stages: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let mut level = 0.0_f64;
    let mut in_plus = true;
    let mut phase = sample_categorical(rng, om.initial_plus())?;
    for _ in 0..max_stages {
        let (c, d) = if in_plus {
            (om.c_plus(), om.d_pm())
        } else {
            (om.c_minus(), om.d_mp())
        };
        let total = -c[(phase, phase)];
        if total <= 0.0 {
            // Absorbing phase: the level runs away upward, or sweeps down
            // through every level.
            return Ok(if in_plus {
                Outcome::Lost
            } else {
                Outcome::Hit(phase)
            });
        }
        let hold = exp_draw(rng, total);
        if in_plus {
            level += hold;
            if level + x >= ORBIT_EXIT_LEVEL {
                return Ok(Outcome::Lost);
            }
        } else {
            if hold >= level + x {
                return Ok(Outcome::Hit(phase));
            }
            level -= hold;
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for j in 0..c.cols() {
            if j == phase {
                continue;
            }
            acc += c[(phase, j)].max(0.0);
            if u < acc {
                chosen = Some((false, j));
                break;
            }
        }
        if chosen.is_none() {
            for j in 0..d.cols() {
                acc += d[(phase, j)].max(0.0);
                if u < acc {
                    chosen = Some((true, j));
                    break;
                }
            }
        }
        match chosen {
            Some((true, j)) => {
                in_plus = !in_plus;
                phase = j;
            }
            Some((false, j)) => phase = j,
            // Remaining mass is the termination intensity.
            None => return Ok(Outcome::Lost),
        }
    }
    Ok(Outcome::Truncated)
}

struct RecordAcc {
    hits: Vec<f64>,
    truncated: usize,
}

fn simulate_records(om: &OrbitModel, x: f64, cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    validate_markovian(om)?;
    let nm = om.n_minus();
    let accs = reduce_substreams(
        cfg,
        || RecordAcc {
            hits: vec![0.0; nm],
            truncated: 0,
        },
        |rng, acc| {
            match record_path(om, x, cfg.max_stages, rng)? {
                Outcome::Hit(j) => acc.hits[j] += 1.0,
                Outcome::Lost => {}
                Outcome::Truncated => acc.truncated += 1,
            }
            Ok(())
        },
    )?;
    let n = cfg.n_paths;
    let nf = n as f64;
    let mut hits = vec![0.0; nm];
    let mut truncated = 0;
    for acc in &accs {
        for j in 0..nm {
            hits[j] += acc.hits[j];
        }
        truncated += acc.truncated;
    }
    Ok((0..nm)
        .map(|j| {
            let mean = hits[j] / nf;
            // Indicator data: sample variance is n p(1-p) / (n-1).
            let stderr = if n > 1 {
                (mean * (1.0 - mean) * nf / (nf - 1.0) / nf).sqrt()
            } else {
                0.0
            };
            McEstimate {
                mean,
                stderr,
                n,
                truncated,
            }
        })
        .collect())
}

/// Estimates the expected minus-phase indicator at the first return of the
/// fluid level to its starting point: coordinate j approximates
/// (initial row * Psi)_j.
pub fn mc_orbit_psi(om: &OrbitModel, cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    simulate_records(om, 0.0, cfg)
}

/// Same simulation continued to the first passage of level -x; coordinate
/// j approximates the downward record expectation from the plus start.
pub fn mc_orbit_record(om: &OrbitModel, x: f64, cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("record level must be nonnegative, got {x}")));
    }
    simulate_records(om, x, cfg)
}
