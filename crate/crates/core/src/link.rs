//! Point-to-point link: distance-dependent Rayleigh block fading plus
//! Markov-Gaussian noise.
//!
//! The fading coefficient is circularly symmetric complex Gaussian,
//! `h ~ CN(0, omega)` with `omega = distance^{-path_loss_exp}`, held constant
//! over a frame (block fading). A transmitted unit-energy symbol `x` with
//! link power `p` is received as
//!
//! ```text
//! y_k = sqrt(p) * h * x_k + n_k,
//! ```
//!
//! where `n_k` follows the two-state noise process of [`crate::noise`].

use crate::noise::{NoiseParams, SampleSeq, StateSeq};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Geometry of one link on the source/relay/destination layout.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
pub struct LinkGeometry {
    /// Distance normalized to the source-destination separation.
    pub distance: f64,
    /// Path-loss exponent.
    pub path_loss_exp: f64,
}

impl LinkGeometry {
    /// Validated constructor.
    pub fn new(distance: f64, path_loss_exp: f64) -> Result<LinkGeometry> {
        if distance <= 0.0 || !distance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "link distance must be positive, got {distance}"
            )));
        }
        if !path_loss_exp.is_finite() || path_loss_exp < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent must be nonnegative, got {path_loss_exp}"
            )));
        }
        Ok(LinkGeometry {
            distance,
            path_loss_exp,
        })
    }

    /// Mean fading power gain `omega = distance^{-path_loss_exp}`.
    #[inline]
    pub fn mean_gain(&self) -> f64 {
        self.distance.powf(-self.path_loss_exp)
    }

    /// Draw one block-fading coefficient `h ~ CN(0, mean_gain)`.
    pub fn sample_fading<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let sd = (self.mean_gain() / 2.0).sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * sd, im * sd)
    }
}

/// One frame's worth of channel state for a single link: the fading draw,
/// hidden noise states, noise samples, and the transmit power applied on it.
#[derive(Debug, Clone)]
pub struct LinkRealization {
    pub h: Complex64,
    pub states: StateSeq,
    pub noise: SampleSeq,
    pub power: f64,
}

impl LinkRealization {
    /// Draw fading, states, and noise for a `len`-symbol frame.
    ///
    /// Draw order (fading, then states, then noise) is part of the
    /// reproducibility contract: a given RNG stream always produces the same
    /// realization.
    pub fn sample<R: Rng + ?Sized>(
        geometry: LinkGeometry,
        power: f64,
        params: &NoiseParams,
        len: usize,
        rng: &mut R,
    ) -> LinkRealization {
        assert!(power > 0.0, "link power must be positive, got {power}");
        let h = geometry.sample_fading(rng);
        let states = params.sample_state_seq(len, rng);
        let noise = params.sample_noise(&states, rng);
        LinkRealization {
            h,
            states,
            noise,
            power,
        }
    }

    /// Apply the channel equation to a symbol frame.
    ///
    /// Panics if the frame length differs from the sampled noise length;
    /// that is a programming error, not a runtime condition.
    pub fn transmit(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            symbols.len(),
            self.noise.len(),
            "frame length {} does not match sampled noise length {}",
            symbols.len(),
            self.noise.len()
        );
        let amp = self.power.sqrt();
        symbols
            .iter()
            .zip(&self.noise)
            .map(|(x, n)| amp * self.h * x + n)
            .collect()
    }

    /// Transmit with some symbols silenced (relay idle on those positions).
    ///
    /// Silent positions carry noise only.
    pub fn transmit_masked(&self, symbols: &[Complex64], active: &[bool]) -> Vec<Complex64> {
        assert_eq!(symbols.len(), self.noise.len());
        assert_eq!(symbols.len(), active.len());
        let amp = self.power.sqrt();
        symbols
            .iter()
            .zip(active)
            .zip(&self.noise)
            .map(|((x, &on), n)| if on { amp * self.h * x + n } else { *n })
            .collect()
    }
}
