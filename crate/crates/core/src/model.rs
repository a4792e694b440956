//! The commuting-ensemble source model.
//!
//! A source emits one of `M` states per letter with prior probabilities
//! `alpha`; measuring state `i` yields outcome `j` with probability
//! `p[i][j]`. The encoder observes either the state sequence itself
//! (visible mode) or only the measurement outcomes (hidden mode).

use alloc::vec;
use alloc::vec::Vec;

use crate::prob::{compose, entropy, mutual_information, Channel, JointPmf, Pmf};
use crate::{Error, Result};

/// What the encoder gets to see.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// The encoder observes the state sequence `X`.
    Visible,
    /// The encoder observes only the measurement outcomes `Z`.
    Hidden,
}

/// An ensemble of commuting mixed states: prior over states, measurement
/// channel from states to outcomes, and the observation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CdoSource {
    prior: Pmf,
    measurement: Channel,
    mode: Mode,
}

/// The encoder's view `V`: its alphabet size and the channel from states
/// to observations (identity in visible mode, the measurement in hidden
/// mode).
#[derive(Debug, Clone, PartialEq)]
pub struct ViewSpec {
    pub v_size: usize,
    pub v_channel: Channel,
}

impl CdoSource {
    pub fn new(prior: Pmf, measurement: Channel, mode: Mode) -> Result<Self> {
        if measurement.num_inputs() != prior.len() {
            return Err(Error::LengthMismatch {
                expected: prior.len(),
                got: measurement.num_inputs(),
            });
        }
        Ok(CdoSource {
            prior,
            measurement,
            mode,
        })
    }

    /// Two biased coins: state `c1` with prior `p` lands heads with
    /// probability `a1`, state `c2` with prior `1 - p` lands heads with
    /// probability `a2`. Outcome 0 is heads.
    pub fn coin_ensemble(p: f64, a1: f64, a2: f64, mode: Mode) -> Result<Self> {
        for (what, v) in [("p", p), ("a1", a1), ("a2", a2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { what, value: v });
            }
        }
        CdoSource::new(
            Pmf::new(vec![p, 1.0 - p])?,
            Channel::from_rows(&[vec![a1, 1.0 - a1], vec![a2, 1.0 - a2]])?,
            mode,
        )
    }

    pub fn prior(&self) -> &Pmf {
        &self.prior
    }

    pub fn measurement(&self) -> &Channel {
        &self.measurement
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of states `M`.
    pub fn num_states(&self) -> usize {
        self.prior.len()
    }

    /// Number of measurement outcomes `N`.
    pub fn num_outcomes(&self) -> usize {
        self.measurement.num_outputs()
    }

    /// The joint distribution of (state, outcome): `alpha_i * p[i][j]`.
    pub fn joint_xz(&self) -> JointPmf {
        compose(&self.prior, &self.measurement).expect("validated at construction")
    }

    /// The channel from states to the encoder's observation alphabet.
    pub fn view(&self) -> ViewSpec {
        match self.mode {
            Mode::Visible => ViewSpec {
                v_size: self.num_states(),
                v_channel: Channel::identity(self.num_states()),
            },
            Mode::Hidden => ViewSpec {
                v_size: self.num_outcomes(),
                v_channel: self.measurement.clone(),
            },
        }
    }

    /// Cost of transmitting the state sequence verbatim: `H(X)`.
    pub fn state_entropy_bound(&self) -> f64 {
        entropy(&self.prior)
    }

    /// Cost of transmitting the outcome sequence verbatim: `H(Z)`.
    pub fn outcome_entropy_bound(&self) -> f64 {
        entropy(&self.joint_xz().col_marginal())
    }

    /// The erasure-coding improvement on `H(Z)`: outcome symbols whose
    /// probability is the same under every state (within `tol`) carry no
    /// information about the state, so they are merged into a single
    /// erasure symbol before taking the entropy. The decoder regenerates
    /// them from shared randomness.
    pub fn erasure_bound(&self, tol: f64) -> f64 {
        assert!(tol >= 0.0, "tolerance must be non-negative");
        let m = self.num_states();
        let n = self.num_outcomes();
        let pz = self.joint_xz().col_marginal();

        let mut merged = 0.0;
        let mut kept: Vec<f64> = Vec::with_capacity(n);
        for j in 0..n {
            let first = self.measurement.prob(0, j);
            let common = (1..m)
                .all(|i| (self.measurement.prob(i, j) - first).abs() <= tol);
            if common {
                merged += pz.prob(j);
            } else {
                kept.push(pz.prob(j));
            }
        }
        if merged > 0.0 || kept.len() < n {
            kept.push(merged);
        }
        -kept
            .iter()
            .map(|&p| if p > 0.0 { p * crate::prob::log2(p) } else { 0.0 })
            .sum::<f64>()
    }

    /// The converse bound `I(X;Z) = H(Z) - H(Z|X)`.
    pub fn mi_lower_bound(&self) -> f64 {
        mutual_information(&self.joint_xz())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn coin_ensemble_examples() {
        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        assert_eq!(s.prior().as_slice(), &[0.5, 0.5]);
        assert_eq!(s.measurement().row(0), &[0.1, 1.0 - 0.1]);
        assert_eq!(s.measurement().row(1), &[0.9, 1.0 - 0.9]);

        let s = CdoSource::coin_ensemble(1.0, 0.3, 0.7, Mode::Visible).unwrap();
        assert_eq!(s.prior().prob(1), 0.0);

        let s = CdoSource::coin_ensemble(0.5, 1.0 / 3.0, 1.0 / 3.0, Mode::Hidden)
            .unwrap();
        assert_eq!(s.measurement().row(0), s.measurement().row(1));

        assert!(CdoSource::coin_ensemble(1.5, 0.1, 0.9, Mode::Visible).is_err());
        assert!(CdoSource::coin_ensemble(0.5, -0.1, 0.9, Mode::Visible).is_err());
    }

    #[test]
    fn joint_xz_examples() {
        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        let j = s.joint_xz();
        assert!((j.prob(0, 0) - 0.05).abs() < TOL);
        assert!((j.prob(0, 1) - 0.45).abs() < TOL);
        assert!((j.prob(1, 0) - 0.45).abs() < TOL);
        assert!((j.prob(1, 1) - 0.05).abs() < TOL);

        // Deterministic measurement permutes and scales the prior.
        let s = CdoSource::new(
            Pmf::new(vec![0.3, 0.7]).unwrap(),
            Channel::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            Mode::Visible,
        )
        .unwrap();
        let j = s.joint_xz();
        assert_eq!(j.prob(0, 1), 0.3);
        assert_eq!(j.prob(1, 0), 0.7);

        let s = CdoSource::coin_ensemble(0.5, 1.0 / 3.0, 1.0 / 3.0, Mode::Visible)
            .unwrap();
        let j = s.joint_xz();
        assert!((j.prob(0, 0) - 1.0 / 6.0).abs() < TOL);
        assert!((j.prob(0, 1) - 1.0 / 3.0).abs() < TOL);
        assert!((j.prob(1, 0) - 1.0 / 6.0).abs() < TOL);
        assert!((j.prob(1, 1) - 1.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn view_examples() {
        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        let v = s.view();
        assert_eq!(v.v_size, 2);
        assert_eq!(v.v_channel, Channel::identity(2));

        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Hidden).unwrap();
        let v = s.view();
        assert_eq!(v.v_channel, *s.measurement());

        let s = CdoSource::coin_ensemble(0.5, 1.0 / 3.0, 2.0 / 3.0, Mode::Hidden)
            .unwrap();
        let v = s.view();
        assert!((v.v_channel.prob(0, 0) - 1.0 / 3.0).abs() < TOL);
        assert!((v.v_channel.prob(0, 1) - 2.0 / 3.0).abs() < TOL);
        assert!((v.v_channel.prob(1, 0) - 2.0 / 3.0).abs() < TOL);
        assert!((v.v_channel.prob(1, 1) - 1.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn entropy_bounds() {
        let s = CdoSource::new(
            Pmf::uniform(4),
            Channel::identity(4),
            Mode::Visible,
        )
        .unwrap();
        assert!((s.state_entropy_bound() - 2.0).abs() < TOL);

        let s = CdoSource::new(
            Pmf::new(vec![1.0, 0.0]).unwrap(),
            Channel::identity(2),
            Mode::Visible,
        )
        .unwrap();
        assert!(s.state_entropy_bound().abs() < TOL);

        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        assert!((s.state_entropy_bound() - 1.0).abs() < TOL);
        assert!((s.outcome_entropy_bound() - 1.0).abs() < TOL);

        // Identical deterministic rows: H(Z) = 0.
        let s = CdoSource::new(
            Pmf::new(vec![0.5, 0.5]).unwrap(),
            Channel::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap(),
            Mode::Visible,
        )
        .unwrap();
        assert!(s.outcome_entropy_bound().abs() < TOL);

        // h(1/3) for the identical-coin ensemble.
        let s = CdoSource::coin_ensemble(0.5, 1.0 / 3.0, 1.0 / 3.0, Mode::Visible)
            .unwrap();
        assert!(
            (s.outcome_entropy_bound() - 0.918_295_834_054_489_6).abs() < TOL
        );
    }

    #[test]
    fn erasure_bound_examples() {
        // All columns common: the whole output is shared randomness.
        let s = CdoSource::new(
            Pmf::uniform(3),
            Channel::from_rows(&[
                vec![0.25; 4],
                vec![0.25; 4],
                vec![0.25; 4],
            ])
            .unwrap(),
            Mode::Hidden,
        )
        .unwrap();
        assert_eq!(s.erasure_bound(1e-9), 0.0);

        // No common column: falls back to the outcome entropy.
        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        assert!(
            (s.erasure_bound(1e-9) - s.outcome_entropy_bound()).abs() < TOL
        );

        // Column 0 is common; merge it and evaluate H(1/2, 3/16, 5/16).
        let s = CdoSource::new(
            Pmf::new(vec![0.5, 0.5]).unwrap(),
            Channel::from_rows(&[
                vec![0.5, 0.25, 0.25],
                vec![0.5, 0.125, 0.375],
            ])
            .unwrap(),
            Mode::Hidden,
        )
        .unwrap();
        assert!((s.erasure_bound(1e-9) - 1.477_217_001_462_482_6).abs() < TOL);
    }

    #[test]
    fn mi_lower_bound_examples() {
        let s = CdoSource::coin_ensemble(0.5, 0.1, 0.9, Mode::Visible).unwrap();
        assert!((s.mi_lower_bound() - 0.531_004_406_410_718_9).abs() < TOL);
        assert!((s.mi_lower_bound() - 0.5310).abs() < 1e-4);

        let s = CdoSource::coin_ensemble(0.5, 0.4, 0.4, Mode::Visible).unwrap();
        assert!(s.mi_lower_bound().abs() < TOL);

        let s = CdoSource::coin_ensemble(0.5, 1.0 / 3.0, 2.0 / 3.0, Mode::Visible)
            .unwrap();
        assert!((s.mi_lower_bound() - 0.081_704_165_945_510_44).abs() < TOL);
    }

    #[test]
    fn bound_ordering() {
        for (p, a1, a2) in [
            (0.5, 0.1, 0.9),
            (0.3, 0.2, 0.6),
            (0.8, 0.45, 0.5),
            (0.5, 0.3333, 0.3334),
        ] {
            let s = CdoSource::coin_ensemble(p, a1, a2, Mode::Hidden).unwrap();
            assert!(s.erasure_bound(1e-9) <= s.outcome_entropy_bound() + 1e-12);
            assert!(
                s.mi_lower_bound()
                    <= s.state_entropy_bound().min(s.outcome_entropy_bound())
                        + 1e-12
            );
        }
    }

    #[test]
    fn hidden_view_reproduces_outcome_marginal() {
        let s = CdoSource::coin_ensemble(0.3, 0.2, 0.7, Mode::Hidden).unwrap();
        let v = s.view();
        let via_view = compose(s.prior(), &v.v_channel).unwrap().col_marginal();
        let direct = s.joint_xz().col_marginal();
        for i in 0..2 {
            assert!((via_view.prob(i) - direct.prob(i)).abs() < TOL);
        }
    }
}
