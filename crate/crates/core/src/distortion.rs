//! Convex string-distortion measures on joint distributions over
//! (state, reconstruction) pairs.
//!
//! Both quantum-motivated measures compare a joint `pxy` against the
//! model joint `P_XZ` of the source and depend on a string pair only
//! through its empirical joint distribution:
//!
//! - Bhattacharyya-Wootters: `1 - [sum sqrt(P_XZ * pxy)]^2`, in `[0, 1]`;
//! - informational divergence: `D(P^e_X P_Z|X || pxy)`, in `[0, +inf]`.
//!
//! The expected-letter variant is the classical average of a letter cost
//! matrix and exists for validating the solver against closed forms.

use alloc::vec::Vec;

use crate::model::CdoSource;
use crate::prob::{empirical_joint, log2, sqrt, JointPmf, Matrix};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

/// Which distortion to apply.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionMeasure {
    BhattacharyyaWootters,
    InformationalDivergence,
    /// Average of a non-negative letter cost matrix `d(x, y)`.
    ExpectedLetter(Matrix),
}

impl DistortionMeasure {
    /// The reconstruction alphabet size this measure expects for `s`.
    pub fn output_size(&self, s: &CdoSource) -> usize {
        match self {
            DistortionMeasure::ExpectedLetter(d) => d.cols(),
            _ => s.num_outcomes(),
        }
    }

    fn check_shape(&self, s: &CdoSource, shape: (usize, usize)) -> Result<()> {
        let expected = (s.num_states(), self.output_size(s));
        if shape != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: shape,
            });
        }
        if let DistortionMeasure::ExpectedLetter(d) = self {
            for &v in d.as_slice() {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::OutOfRange {
                        what: "letter distortion entry",
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Squared Bhattacharyya overlap `[sum sqrt(ref * emp)]^2`, clamped to `[0, 1]`.
pub fn overlap_squared(emp: &JointPmf, reference: &JointPmf) -> Result<f64> {
    if emp.shape() != reference.shape() {
        return Err(Error::ShapeMismatch {
            expected: reference.shape(),
            got: emp.shape(),
        });
    }
    let mut s = 0.0;
    for a in 0..emp.rows() {
        for b in 0..emp.cols() {
            s += sqrt(reference.prob(a, b) * emp.prob(a, b));
        }
    }
    Ok((s * s).clamp(0.0, 1.0))
}

/// Distortion of a joint distribution relative to the source model.
pub fn evaluate(m: &DistortionMeasure, s: &CdoSource, pxy: &JointPmf) -> Result<f64> {
    m.check_shape(s, pxy.shape())?;
    let d = evaluate_unchecked(m, s, pxy.matrix());
    // On the simplex the measures are non-negative (and BW is at most 1);
    // strip float noise at the boundaries.
    Ok(match m {
        DistortionMeasure::BhattacharyyaWootters => d.clamp(0.0, 1.0),
        _ => d.max(0.0),
    })
}

/// The measure extended to arbitrary non-negative matrices.
///
/// On the probability simplex this agrees with [`evaluate`]; off it, the
/// same formulas apply, which is what [`gradient`] differentiates and what
/// finite-difference verification evaluates.
pub fn evaluate_matrix(m: &DistortionMeasure, s: &CdoSource, pxy: &Matrix) -> Result<f64> {
    m.check_shape(s, pxy.shape())?;
    for &v in pxy.as_slice() {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::OutOfRange {
                what: "joint entry",
                value: v,
            });
        }
    }
    Ok(evaluate_unchecked(m, s, pxy))
}

fn evaluate_unchecked(m: &DistortionMeasure, s: &CdoSource, pxy: &Matrix) -> f64 {
    match m {
        DistortionMeasure::BhattacharyyaWootters => {
            let p_xz = s.joint_xz();
            let mut overlap = 0.0;
            for x in 0..pxy.rows() {
                for z in 0..pxy.cols() {
                    overlap += sqrt(p_xz.prob(x, z) * pxy[(x, z)]);
                }
            }
            1.0 - overlap * overlap
        }
        DistortionMeasure::InformationalDivergence => {
            let w = s.measurement();
            let mut d = 0.0;
            for x in 0..pxy.rows() {
                let px: f64 = pxy.row(x).iter().sum();
                if px <= 0.0 {
                    continue;
                }
                for z in 0..pxy.cols() {
                    let r = px * w.prob(x, z);
                    if r > 0.0 {
                        let p = pxy[(x, z)];
                        if p <= 0.0 {
                            return f64::INFINITY;
                        }
                        d += r * log2(r / p);
                    }
                }
            }
            d
        }
        DistortionMeasure::ExpectedLetter(cost) => {
            let mut d = 0.0;
            for x in 0..pxy.rows() {
                for y in 0..pxy.cols() {
                    d += pxy[(x, y)] * cost[(x, y)];
                }
            }
            d
        }
    }
}

/// Distortion between two strings: the measure applied to their empirical
/// joint distribution.
pub fn string_distortion(
    m: &DistortionMeasure,
    s: &CdoSource,
    x_str: &[usize],
    y_str: &[usize],
) -> Result<f64> {
    if x_str.len() != y_str.len() {
        return Err(Error::LengthMismatch {
            expected: x_str.len(),
            got: y_str.len(),
        });
    }
    let pairs: Vec<(usize, usize)> = x_str
        .iter()
        .copied()
        .zip(y_str.iter().copied())
        .collect();
    let emp = empirical_joint(&pairs, s.num_states(), m.output_size(s))?;
    evaluate(m, s, &emp)
}

/// Partial derivatives of the measure with respect to each joint entry.
///
/// Wherever the reference distribution carries mass the joint must be
/// strictly positive; the solver guarantees this by construction.
pub fn gradient(m: &DistortionMeasure, s: &CdoSource, pxy: &JointPmf) -> Result<Matrix> {
    gradient_matrix(m, s, pxy.matrix())
}

/// [`gradient`] on the raw-matrix extension of the measure.
pub fn gradient_matrix(m: &DistortionMeasure, s: &CdoSource, pxy: &Matrix) -> Result<Matrix> {
    m.check_shape(s, pxy.shape())?;
    let (rows, cols) = pxy.shape();
    let mut g = Matrix::zeros(rows, cols);
    match m {
        DistortionMeasure::BhattacharyyaWootters => {
            let p_xz = s.joint_xz();
            let mut overlap = 0.0;
            for x in 0..rows {
                for z in 0..cols {
                    let r = p_xz.prob(x, z);
                    let p = pxy[(x, z)];
                    if r > 0.0 && p <= 0.0 {
                        return Err(Error::ZeroWhereReferencePositive { row: x, col: z });
                    }
                    overlap += sqrt(r * p);
                }
            }
            for x in 0..rows {
                for z in 0..cols {
                    let r = p_xz.prob(x, z);
                    if r > 0.0 {
                        g[(x, z)] = -overlap * sqrt(r / pxy[(x, z)]);
                    }
                }
            }
        }
        DistortionMeasure::InformationalDivergence => {
            let w = s.measurement();
            for x in 0..rows {
                let px: f64 = pxy.row(x).iter().sum();
                if px <= 0.0 {
                    // No mass on this state: the measure does not depend on
                    // the row, and the solver never moves mass into it.
                    continue;
                }
                let mut row_term = 0.0;
                for z in 0..cols {
                    let wz = w.prob(x, z);
                    if wz > 0.0 {
                        let p = pxy[(x, z)];
                        if p <= 0.0 {
                            return Err(Error::ZeroWhereReferencePositive { row: x, col: z });
                        }
                        row_term += wz * log2(px * wz / p);
                    }
                }
                for y in 0..cols {
                    let r_y = px * w.prob(x, y);
                    let direct = if r_y > 0.0 {
                        r_y / (pxy[(x, y)] * LN_2)
                    } else {
                        0.0
                    };
                    g[(x, y)] = row_term + 1.0 / LN_2 - direct;
                }
            }
        }
        DistortionMeasure::ExpectedLetter(cost) => {
            g = cost.clone();
        }
    }
    Ok(g)
}
