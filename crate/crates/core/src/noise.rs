//! Two-state Markov-Gaussian noise.
//!
//! Each discrete-time noise sample is circularly symmetric complex Gaussian
//! whose variance is selected by a hidden two-state Markov chain: a quiescent
//! state `Good` with variance `good_var`, and an impulsive state `Bad` with
//! variance `power_ratio * good_var`. The chain is parameterized by the
//! stationary probability of the impulsive state, `p_bad`, and a memory
//! factor `memory` = 1 / (p_gb + p_bg), where `p_gb` and `p_bg` are the
//! Good->Bad and Bad->Good transition probabilities. `memory == 1` makes the
//! state sequence i.i.d.; larger values yield bursts whose mean length grows
//! proportionally.
//!
//! The inverse map used throughout is
//!
//! ```text
//! p_gb = p_bad / memory,          p_bg = (1 - p_bad) / memory,
//! ```
//!
//! which reproduces both defining identities exactly:
//! `p_gb / (p_gb + p_bg) = p_bad` and `1 / (p_gb + p_bg) = memory`.

use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Hidden state of the noise process at one symbol time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseState {
    /// Quiescent background state with variance `good_var`.
    Good,
    /// Impulsive state with variance `power_ratio * good_var`.
    Bad,
}

impl NoiseState {
    /// Trellis index: Good = 0, Bad = 1.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            NoiseState::Good => 0,
            NoiseState::Bad => 1,
        }
    }

    /// Inverse of [`NoiseState::index`].
    #[inline]
    pub fn from_index(i: usize) -> NoiseState {
        match i {
            0 => NoiseState::Good,
            1 => NoiseState::Bad,
            _ => panic!("noise state index must be 0 or 1, got {i}"),
        }
    }
}

/// Sequence of hidden noise states, one per symbol.
pub type StateSeq = Vec<NoiseState>;

/// Sequence of complex noise samples, one per symbol.
pub type SampleSeq = Vec<Complex64>;

/// Distribution shape of the noise process, without an absolute scale.
///
/// The Monte Carlo harness sets `good_var` per SNR point, so experiment
/// descriptions carry only the shape.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
pub struct NoiseShape {
    /// Stationary probability of the impulsive state, in [0, 1].
    pub p_bad: f64,
    /// Memory factor; 1 = i.i.d. states, >1 = bursty. Must be >= 1.
    pub memory: f64,
    /// Impulsive-to-background variance ratio R >= 1.
    pub power_ratio: f64,
}

impl NoiseShape {
    /// Attach an absolute background variance, producing full parameters.
    pub fn with_good_var(self, good_var: f64) -> Result<NoiseParams> {
        NoiseParams::new(self.p_bad, self.memory, self.power_ratio, good_var)
    }
}

/// Full parameter set of the noise process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Stationary probability of the impulsive state.
    pub p_bad: f64,
    /// Memory factor, >= 1.
    pub memory: f64,
    /// Variance ratio bad/good, >= 1.
    pub power_ratio: f64,
    /// Variance of the background (Good) state, > 0.
    pub good_var: f64,
}

impl NoiseParams {
    /// Validated constructor.
    pub fn new(p_bad: f64, memory: f64, power_ratio: f64, good_var: f64) -> Result<NoiseParams> {
        if !(0.0..=1.0).contains(&p_bad) || !p_bad.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p_bad must lie in [0, 1], got {p_bad}"
            )));
        }
        if memory < 1.0 || !memory.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "memory must be >= 1, got {memory}"
            )));
        }
        if power_ratio < 1.0 || !power_ratio.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power_ratio must be >= 1, got {power_ratio}"
            )));
        }
        if good_var <= 0.0 || !good_var.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "good_var must be positive, got {good_var}"
            )));
        }
        Ok(NoiseParams {
            p_bad,
            memory,
            power_ratio,
            good_var,
        })
    }

    /// Stationary probability of the Good state.
    #[inline]
    pub fn p_good(&self) -> f64 {
        1.0 - self.p_bad
    }

    /// Variance of the impulsive state.
    #[inline]
    pub fn bad_var(&self) -> f64 {
        self.power_ratio * self.good_var
    }

    /// Variance of the state with the given trellis index.
    #[inline]
    pub fn var(&self, state: NoiseState) -> f64 {
        match state {
            NoiseState::Good => self.good_var,
            NoiseState::Bad => self.bad_var(),
        }
    }

    /// Mean noise power averaged over the stationary state distribution.
    #[inline]
    pub fn average_var(&self) -> f64 {
        self.p_good() * self.good_var + self.p_bad * self.bad_var()
    }

    /// Stationary distribution as [p_good, p_bad].
    #[inline]
    pub fn stationary(&self) -> [f64; 2] {
        [self.p_good(), self.p_bad]
    }

    /// Transition probabilities `(p_gb, p_bg)` implied by `(p_bad, memory)`.
    ///
    /// Both probabilities lie in [0, 1] because `memory >= 1`; the stationary
    /// distribution and memory factor round-trip exactly.
    #[inline]
    pub fn transition_probs(&self) -> (f64, f64) {
        (self.p_bad / self.memory, (1.0 - self.p_bad) / self.memory)
    }

    /// 2x2 transition matrix `m[from][to]` in trellis-index order.
    #[inline]
    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        let (p_gb, p_bg) = self.transition_probs();
        [[1.0 - p_gb, p_gb], [p_bg, 1.0 - p_bg]]
    }

    /// Draw a stationary state sequence of length `len`.
    ///
    /// The first state is drawn from the stationary distribution, so any
    /// window of the sequence is itself stationary.
    pub fn sample_state_seq<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> StateSeq {
        let (p_gb, p_bg) = self.transition_probs();
        let mut states = Vec::with_capacity(len);
        if len == 0 {
            return states;
        }
        let mut s = if rng.gen::<f64>() < self.p_bad {
            NoiseState::Bad
        } else {
            NoiseState::Good
        };
        states.push(s);
        for _ in 1..len {
            let flip = match s {
                NoiseState::Good => rng.gen::<f64>() < p_gb,
                NoiseState::Bad => rng.gen::<f64>() < p_bg,
            };
            if flip {
                s = match s {
                    NoiseState::Good => NoiseState::Bad,
                    NoiseState::Bad => NoiseState::Good,
                };
            }
            states.push(s);
        }
        states
    }

    /// Draw complex Gaussian samples conditioned on a state sequence.
    ///
    /// Each sample is circularly symmetric with total variance given by the
    /// state: real and imaginary parts are independent N(0, var/2).
    pub fn sample_noise<R: Rng + ?Sized>(&self, states: &[NoiseState], rng: &mut R) -> SampleSeq {
        states
            .iter()
            .map(|&s| {
                let sd = (self.var(s) / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * sd, im * sd)
            })
            .collect()
    }

    /// Log density of a complex noise sample under the given state:
    /// `-ln(pi var) - |n|^2 / var`.
    #[inline]
    pub fn log_pdf(&self, n: Complex64, state: NoiseState) -> f64 {
        let var = self.var(state);
        -(std::f64::consts::PI * var).ln() - n.norm_sqr() / var
    }
}
