//! Stochastic cross-check of the analytic observables: photon pairs routed
//! through the bench trial by trial, coincidence-gated, and accumulated
//! into estimates with binomial error bars.
//!
//! Determinism contract: every trial draws from its own counter-based
//! substream keyed by (seed, pair_id), with a fixed draw order inside the
//! trial (inter-arrival time, then routing, then clicks). Accumulation is
//! integer counting merged associatively, so estimates are bit-identical
//! for a given (config, n, seed) regardless of how the trial range is
//! partitioned across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bench::BenchConfig;
use crate::correlation::{
    chsh_s, coincidence_table, detector_params, orthogonal_port_config, ChshSettings,
    CoincidencePair,
};
use crate::error::{Error, Result};

/// Where the two photons of one pair went at the sending splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Routing {
    Split,
    BothAlice,
    BothBob,
}

/// One simulated photon pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub routing: Routing,
    /// Detector 1 or 2, when the first party's side registered a click.
    pub alice_click: Option<u8>,
    /// Detector 3 or 4, when the second party's side registered a click.
    pub bob_click: Option<u8>,
    /// Passed the coincidence gate: split routing with clicks on both
    /// sides. Only gated trials enter estimators.
    pub gated: bool,
}

/// Frequency tags present at a detector for one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyContent {
    pub f_plus: bool,
    pub f_minus: bool,
}

impl FrequencyContent {
    pub fn is_empty(self) -> bool {
        !self.f_plus && !self.f_minus
    }
}

/// A time-tagged detection event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub timestamp: f64,
    pub detector: u8,
    pub pair_id: u64,
    pub frequency_content: FrequencyContent,
}

/// A Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub n_gated: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    trials: u64,
    gated: u64,
    /// Gated joint clicks per pair, `CoincidencePair::ALL` order.
    joint: [u64; 4],
}

impl Counts {
    fn record(&mut self, outcome: &TrialOutcome) {
        self.trials += 1;
        if outcome.gated {
            self.gated += 1;
            if let (Some(a), Some(b)) = (outcome.alice_click, outcome.bob_click) {
                if let Ok(pair) = CoincidencePair::from_ids(a, b) {
                    self.joint[pair.index()] += 1;
                }
            }
        }
    }

    fn merge(self, other: Counts) -> Counts {
        let mut joint = self.joint;
        for (slot, v) in joint.iter_mut().zip(other.joint) {
            *slot += v;
        }
        Counts {
            trials: self.trials + other.trials,
            gated: self.gated + other.gated,
            joint,
        }
    }
}

fn joint_cumulative(cfg: &BenchConfig) -> Result<[f64; 4]> {
    let table = coincidence_table(cfg)?;
    let sum: f64 = table.iter().sum();
    // Also catches NaN from a poisoned table.
    if sum.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateDistribution);
    }
    let mut cum = [0.0; 4];
    let mut acc = 0.0;
    for (slot, r) in cum.iter_mut().zip(table) {
        acc += r / sum;
        *slot = acc;
    }
    cum[3] = 1.0;
    Ok(cum)
}

fn pick_pair(cum: &[f64; 4], u: f64) -> CoincidencePair {
    for (k, pair) in CoincidencePair::ALL.into_iter().enumerate() {
        if u < cum[k] {
            return pair;
        }
    }
    CoincidencePair::D24
}

/// Samples one gated joint click (alice detector, bob detector) with
/// probabilities R_ij / sum R from the analytic coincidence table.
pub fn sample_joint_click<R: Rng>(cfg: &BenchConfig, rng: &mut R) -> Result<(u8, u8)> {
    let cum = joint_cumulative(cfg)?;
    Ok(pick_pair(&cum, rng.random::<f64>()).detectors())
}

/// Trial generator with precomputed routing and click distributions.
pub struct TrialSampler {
    seed_bytes: [u8; 32],
    cum: [f64; 4],
    /// P(detector 1 | both photons on the first party's side), None if
    /// both of that side's detectors are dark.
    alice_single: Option<f64>,
    bob_single: Option<f64>,
    mean_interarrival: f64,
}

impl TrialSampler {
    pub fn new(cfg: &BenchConfig, seed: u64) -> Result<TrialSampler> {
        cfg.validate_heterodyne()?;
        if cfg.mean_photon_number <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_photon_number",
                reason: "trial generation needs a positive pair rate".into(),
            });
        }
        let cum = joint_cumulative(cfg)?;
        let single = |i: f64, j: f64| {
            let sum = i + j;
            if sum > 0.0 {
                Some(i / sum)
            } else {
                None
            }
        };
        let i1 = crate::correlation::local_intensity(1, cfg)?;
        let i2 = crate::correlation::local_intensity(2, cfg)?;
        let i3 = crate::correlation::local_intensity(3, cfg)?;
        let i4 = crate::correlation::local_intensity(4, cfg)?;
        Ok(TrialSampler {
            seed_bytes: ChaCha8Rng::seed_from_u64(seed).get_seed(),
            cum,
            alice_single: single(i1, i2),
            bob_single: single(i3, i4),
            // One pair per coherence window on average means a mean
            // inter-arrival of one beat period; scale by 1/<n>.
            mean_interarrival: cfg.beat_period() / cfg.mean_photon_number,
        })
    }

    /// Runs one trial on its own substream. Returns the inter-arrival time
    /// since the previous pair and the outcome.
    pub fn simulate(&self, pair_id: u64) -> (f64, TrialOutcome) {
        let mut rng = ChaCha8Rng::from_seed(self.seed_bytes);
        rng.set_stream(pair_id);

        let u_dt: f64 = rng.random();
        let dt = -self.mean_interarrival * (1.0 - u_dt).ln();

        let u_route: f64 = rng.random();
        let routing = if u_route < 0.5 {
            Routing::Split
        } else if u_route < 0.75 {
            Routing::BothAlice
        } else {
            Routing::BothBob
        };

        let outcome = match routing {
            Routing::Split => {
                let pair = pick_pair(&self.cum, rng.random::<f64>());
                let (a, b) = pair.detectors();
                TrialOutcome {
                    routing,
                    alice_click: Some(a),
                    bob_click: Some(b),
                    gated: true,
                }
            }
            Routing::BothAlice => TrialOutcome {
                routing,
                alice_click: self
                    .alice_single
                    .map(|p| if rng.random::<f64>() < p { 1 } else { 2 }),
                bob_click: None,
                gated: false,
            },
            Routing::BothBob => TrialOutcome {
                routing,
                alice_click: None,
                bob_click: self
                    .bob_single
                    .map(|p| if rng.random::<f64>() < p { 3 } else { 4 }),
                gated: false,
            },
        };
        (dt, outcome)
    }

    fn tally(&self, n: u64, id_offset: u64) -> Counts {
        (0..n)
            .into_par_iter()
            .fold(Counts::default, |mut c, i| {
                let (_, outcome) = self.simulate(id_offset + i);
                c.record(&outcome);
                c
            })
            .reduce(Counts::default, Counts::merge)
    }
}

fn require_positive_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need at least one trial".into(),
        });
    }
    Ok(())
}

/// Materializes `n` trial outcomes in pair order.
pub fn generate_trials(cfg: &BenchConfig, n: u64, seed: u64) -> Result<Vec<TrialOutcome>> {
    require_positive_n(n)?;
    let sampler = TrialSampler::new(cfg, seed)?;
    Ok((0..n).map(|i| sampler.simulate(i).1).collect())
}

/// Time-tagged event stream for `n` pairs. Split pairs yield one event on
/// each side at the same timestamp; same-side pairs yield a single event
/// carrying both frequency tags.
pub fn event_records(cfg: &BenchConfig, n: u64, seed: u64) -> Result<Vec<EventRecord>> {
    require_positive_n(n)?;
    let sampler = TrialSampler::new(cfg, seed)?;
    let mut t = 0.0;
    let mut events = Vec::new();
    for pair_id in 0..n {
        let (dt, outcome) = sampler.simulate(pair_id);
        t += dt;
        match outcome.routing {
            Routing::Split => {
                if let Some(d) = outcome.alice_click {
                    events.push(EventRecord {
                        timestamp: t,
                        detector: d,
                        pair_id,
                        frequency_content: FrequencyContent {
                            f_plus: true,
                            f_minus: false,
                        },
                    });
                }
                if let Some(d) = outcome.bob_click {
                    events.push(EventRecord {
                        timestamp: t,
                        detector: d,
                        pair_id,
                        frequency_content: FrequencyContent {
                            f_plus: false,
                            f_minus: true,
                        },
                    });
                }
            }
            Routing::BothAlice | Routing::BothBob => {
                let click = outcome.alice_click.or(outcome.bob_click);
                if let Some(d) = click {
                    events.push(EventRecord {
                        timestamp: t,
                        detector: d,
                        pair_id,
                        frequency_content: FrequencyContent {
                            f_plus: true,
                            f_minus: true,
                        },
                    });
                }
            }
        }
    }
    Ok(events)
}

/// The coincidence gate: true only for split pairs with clicks on both
/// sides. Both-same-side pairs carry both frequency tags to one detector
/// and are rejected by their beat signature.
pub fn heterodyne_gate(trial: &TrialOutcome, cfg: &BenchConfig) -> Result<bool> {
    cfg.validate_heterodyne()?;
    Ok(trial.routing == Routing::Split && trial.alice_click.is_some() && trial.bob_click.is_some())
}

/// Instantaneous photocurrent at one detector when both frequency tags
/// beat against each other:
/// I_k(t) = (I0/2)(1 +- sin 2 a_k cos(2 pi delta_f t - phase_k)).
pub fn beat_waveform(detector: u8, cfg: &BenchConfig, t_grid: &[f64]) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (angle, phase, sign) = detector_params(cfg, detector)?;
    let depth = sign * (2.0 * angle).sin();
    let omega = 2.0 * std::f64::consts::PI * cfg.delta_f;
    t_grid
        .iter()
        .map(|&t| {
            if !t.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "t_grid",
                    reason: format!("must be finite, got {t}"),
                });
            }
            Ok(0.5 * cfg.intensity_i0 * (1.0 + depth * (omega * t - phase).cos()))
        })
        .collect()
}

/// Estimates the gated share of one pair, R_ij / sum R.
pub fn estimate_r(
    pair: CoincidencePair,
    cfg: &BenchConfig,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    require_positive_n(n)?;
    let sampler = TrialSampler::new(cfg, seed)?;
    let counts = sampler.tally(n, 0);
    if counts.gated == 0 {
        return Err(Error::InsufficientStatistics);
    }
    let m = counts.gated as f64;
    let p = counts.joint[pair.index()] as f64 / m;
    Ok(McEstimate {
        value: p,
        stderr: (p * (1.0 - p) / m).sqrt(),
        n_trials: n,
        n_gated: counts.gated,
    })
}

fn estimate_e_offset(
    a: f64,
    b: f64,
    cfg: &BenchConfig,
    n: u64,
    seed: u64,
    id_offset: u64,
) -> Result<McEstimate> {
    require_positive_n(n)?;
    let ports = orthogonal_port_config(a, b, cfg);
    let sampler = TrialSampler::new(&ports, seed)?;
    let counts = sampler.tally(n, id_offset);
    if counts.gated == 0 {
        return Err(Error::InsufficientStatistics);
    }
    let m = counts.gated as f64;
    let like = (counts.joint[0] + counts.joint[1]) as f64;
    let unlike = (counts.joint[2] + counts.joint[3]) as f64;
    let e = (like - unlike) / m;
    Ok(McEstimate {
        value: e,
        stderr: ((1.0 - e * e).max(0.0) / m).sqrt(),
        n_trials: n,
        n_gated: counts.gated,
    })
}

/// Estimates the normalized correlation E(a, b) under the two-channel
/// analyzer layout.
pub fn estimate_e(a: f64, b: f64, cfg: &BenchConfig, n: u64, seed: u64) -> Result<McEstimate> {
    estimate_e_offset(a, b, cfg, n, seed, 0)
}

/// Estimates |S| at fixed settings, spending n/4 trials on each of the
/// four setting pairs (disjoint substream ranges) and combining with the
/// sign arrangement the analytic evaluation selects.
pub fn estimate_s(
    settings: &ChshSettings,
    cfg: &BenchConfig,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    require_positive_n(n)?;
    let analytic = chsh_s(settings, cfg)?;
    let signs = analytic.sign_arrangement.signs();
    let per_pair = (n / 4).max(1);
    let combos = [
        (settings.a, settings.b),
        (settings.a, settings.b_prime),
        (settings.a_prime, settings.b),
        (settings.a_prime, settings.b_prime),
    ];
    let mut s = 0.0;
    let mut var = 0.0;
    let mut gated = 0;
    for (k, (a, b)) in combos.into_iter().enumerate() {
        let est = estimate_e_offset(a, b, cfg, per_pair, seed, (k as u64) * per_pair)?;
        s += signs[k] * est.value;
        var += est.stderr * est.stderr;
        gated += est.n_gated;
    }
    Ok(McEstimate {
        value: s.abs(),
        stderr: var.sqrt(),
        n_trials: 4 * per_pair,
        n_gated: gated,
    })
}
