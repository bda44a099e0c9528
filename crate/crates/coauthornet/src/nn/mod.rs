//! Minimal dense numerical kernel.
//!
//! Row-major `f64` matrices, the handful of activations and losses the
//! trainers need, an Adam optimizer, and a central-difference gradient
//! checker. Everything is 64-bit: the gradient checks downstream demand
//! tolerances that 32-bit arithmetic cannot meet.

mod adam;
mod gradcheck;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use gradcheck::{finite_diff_check, finite_diff_errors};
pub use tensor::{dot, l2_norm, l2_normalize, Tensor2D};

use crate::error::{Error, Result};

/// Numerically stable logistic function, computed in the branch form that
/// never exponentiates a positive argument.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(sigmoid(x))` without intermediate underflow.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Sigmoid,
    Relu,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Linear => x,
            Activation::Sigmoid => sigmoid(x),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed in terms of the activation output `y`.
    /// Well-defined for these activations since each is output-invertible
    /// where the derivative is nonzero.
    pub fn derivative_from_output(&self, y: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn tag(&self) -> u32 {
        match self {
            Activation::Linear => 0,
            Activation::Sigmoid => 1,
            Activation::Relu => 2,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Sigmoid),
            2 => Some(Activation::Relu),
            _ => None,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Activation::Linear),
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Activation::Linear => "linear",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        };
        f.write_str(s)
    }
}

/// One dense layer: `activation(W·h + b)`.
pub fn dense_forward(w: &Tensor2D, b: &[f64], h: &[f64], activation: Activation) -> Result<Vec<f64>> {
    if w.cols() != h.len() {
        return Err(Error::Dimension(format!(
            "dense layer expects input of length {}, got {}",
            w.cols(),
            h.len()
        )));
    }
    if w.rows() != b.len() {
        return Err(Error::Dimension(format!(
            "dense layer bias has length {}, weight matrix has {} rows",
            b.len(),
            w.rows()
        )));
    }
    let mut out = w.matvec(h);
    for (o, bi) in out.iter_mut().zip(b) {
        *o = activation.apply(*o + bi);
    }
    Ok(out)
}

/// Probability clamp for the cross-entropy loss; log(0) is undefined.
pub const BCE_EPS: f64 = 1e-12;

/// Mean binary cross-entropy, `-(1/N)·Σ[y·log p + (1−y)·log(1−p)]`, with
/// predictions clamped to `[BCE_EPS, 1−BCE_EPS]`.
pub fn bce_loss(labels: &[f64], probs: &[f64]) -> Result<f64> {
    if labels.len() != probs.len() {
        return Err(Error::Dimension(format!(
            "bce_loss: {} labels vs {} probabilities",
            labels.len(),
            probs.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Dimension("bce_loss: empty input".into()));
    }
    let mut total = 0.0;
    for (&y, &p) in labels.iter().zip(probs) {
        let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    Ok(total / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_at_zero_is_half() {
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn sigmoid_extreme_negative_stays_finite_positive() {
        let v = sigmoid(-745.0);
        assert!(v.is_finite());
        assert!(v >= 0.0);
        assert!(sigmoid(745.0).is_finite());
    }

    #[test]
    fn dense_identity_passes_input_through() {
        let w = Tensor2D::identity(3);
        let out = dense_forward(&w, &[0.0; 3], &[1.0, -2.0, 0.5], Activation::Linear).unwrap();
        assert_eq!(out, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn dense_two_by_two_hand_value() {
        let w = Tensor2D::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let out = dense_forward(&w, &[0.0, 0.0], &[1.0, 1.0], Activation::Linear).unwrap();
        assert_eq!(out, vec![3.0, 7.0]);
    }

    #[test]
    fn dense_shape_mismatch_is_an_error() {
        let w = Tensor2D::zeros(2, 3);
        assert!(dense_forward(&w, &[0.0, 0.0], &[1.0, 1.0], Activation::Linear).is_err());
        assert!(dense_forward(&w, &[0.0], &[1.0, 1.0, 1.0], Activation::Linear).is_err());
    }

    #[test]
    fn bce_balanced_half_is_ln2() {
        let loss = bce_loss(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn bce_perfect_prediction_is_tiny() {
        let loss = bce_loss(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(loss >= 0.0);
        assert!(loss <= 1e-11);
    }

    #[test]
    fn bce_quarter_hand_value() {
        let loss = bce_loss(&[1.0], &[0.25]).unwrap();
        assert!((loss - 0.25f64.ln().abs()).abs() < 1e-12);
        assert!((loss - 1.386294).abs() < 1e-6);
    }

    #[test]
    fn bce_length_mismatch_is_an_error() {
        assert!(bce_loss(&[1.0], &[0.5, 0.5]).is_err());
    }

    proptest! {
        #[test]
        fn sigmoid_symmetry(x in -50.0f64..50.0) {
            prop_assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sigmoid_range_under_dense(h in proptest::collection::vec(-10.0f64..10.0, 3)) {
            // Pre-activations stay below ~34 so the logistic does not round
            // to exactly 1.0 in f64.
            let w = Tensor2D::from_rows(&[vec![0.3, -1.0, 2.0], vec![0.5, 0.5, 0.5]]).unwrap();
            let out = dense_forward(&w, &[0.1, -0.2], &h, Activation::Sigmoid).unwrap();
            for v in out {
                prop_assert!(v > 0.0 && v < 1.0);
            }
        }

        #[test]
        fn bce_is_nonnegative(
            pairs in proptest::collection::vec((0u8..2, 0.0f64..1.0), 1..20)
        ) {
            let labels: Vec<f64> = pairs.iter().map(|(y, _)| *y as f64).collect();
            let probs: Vec<f64> = pairs.iter().map(|(_, p)| *p).collect();
            prop_assert!(bce_loss(&labels, &probs).unwrap() >= 0.0);
        }
    }
}
