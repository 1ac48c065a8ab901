use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Iterate;

/// Per-worker adaptive learning rate.
///
/// Keeps `η = D·α / sqrt(G0² + Σ Z²)` where each completed step adds
/// `Z² = (‖half − anchor‖² + ‖half − full‖²) / (5·η²)` evaluated with the
/// step size that step used.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveState {
    d: f64,
    g0: f64,
    alpha: f64,
    accumulator: f64,
    eta: f64,
}

impl AdaptiveState {
    pub fn new(d: f64, g0: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("D", d), ("G0", g0), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            d,
            g0,
            alpha,
            accumulator: 0.0,
            eta: d * alpha / g0,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn accumulator(&self) -> f64 {
        self.accumulator
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `D·α`, the constant `η·sqrt(G0² + accumulator)` must equal.
    pub fn d_alpha(&self) -> f64 {
        self.d * self.alpha
    }

    /// Folds in the step just completed and returns its `Z²`.
    pub fn update(&mut self, half: &Iterate, anchor: &Iterate, full: &Iterate) -> f64 {
        let moved = half.dist_sq(anchor) + half.dist_sq(full);
        let z_sq = moved / (5.0 * self.eta * self.eta);
        self.accumulator += z_sq;
        self.eta = self.d_alpha() / (self.g0 * self.g0 + self.accumulator).sqrt();
        z_sq
    }

    /// Value-returning form of [`update`](Self::update).
    pub fn eta_update(mut self, half: &Iterate, anchor: &Iterate, full: &Iterate) -> Self {
        self.update(half, anchor, full);
        self
    }
}

/// How the base learning rate `α` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// `α = 1`.
    Nonsmooth,
    /// `α = 1/√M`.
    Smooth,
    /// `α = T^ε/√M`, `ε ∈ (0, ½)`.
    SmoothEps(f64),
}

impl AlphaMode {
    pub fn alpha(&self, workers: usize, horizon: u64) -> f64 {
        let m = workers as f64;
        match *self {
            AlphaMode::Nonsmooth => 1.0,
            AlphaMode::Smooth => 1.0 / m.sqrt(),
            AlphaMode::SmoothEps(eps) => (horizon as f64).powf(eps) / m.sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AlphaMode::SmoothEps(eps) if !(eps > 0.0 && eps < 0.5) => Err(Error::Config(format!(
                "smooth_eps needs epsilon in (0, 0.5), got {eps}"
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Iterate {
        Iterate::new(vec![x], vec![y])
    }

    #[test]
    fn initial_eta() {
        let s = AdaptiveState::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.eta(), 1.0);
        let s = AdaptiveState::new(10f64.sqrt(), 2.0, 0.5).unwrap();
        assert_eq!(s.eta(), 10f64.sqrt() * 0.5 / 2.0);
    }

    #[test]
    fn no_movement_keeps_eta() {
        let s = AdaptiveState::new(1.0, 1.0, 1.0).unwrap();
        let z = pt(0.3, -0.2);
        let next = s.clone().eta_update(&z, &z, &z);
        assert_eq!(next.eta(), s.eta());
        assert_eq!(next.accumulator(), 0.0);
    }

    #[test]
    fn unit_z_squared_halves_the_square() {
        // ‖half − anchor‖² + ‖half − full‖² = 5 with η = 1 gives Z² = 1.
        let s = AdaptiveState::new(1.0, 1.0, 1.0).unwrap();
        let anchor = pt(0.0, 0.0);
        let half = pt(2.0, 0.0);
        let full = pt(2.0, 1.0);
        let next = s.eta_update(&half, &anchor, &full);
        assert_eq!(next.accumulator(), 1.0);
        assert!((next.eta() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(next.eta(), 1.0 / 2f64.sqrt());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AdaptiveState::new(0.0, 1.0, 1.0).is_err());
        assert!(AdaptiveState::new(1.0, -1.0, 1.0).is_err());
        assert!(AdaptiveState::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn alpha_modes() {
        assert_eq!(AlphaMode::Nonsmooth.alpha(4, 100), 1.0);
        assert_eq!(AlphaMode::Smooth.alpha(4, 100), 0.5);
        assert!((AlphaMode::SmoothEps(0.25).alpha(4, 10_000) - 5.0).abs() < 1e-12);
        assert!(AlphaMode::SmoothEps(0.5).validate().is_err());
        assert!(AlphaMode::SmoothEps(0.1).validate().is_ok());
    }
}
