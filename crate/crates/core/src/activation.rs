//! Scalar activations applied entrywise. All of them are nondecreasing,
//! nonnegative and subhomogeneous (`phi(lt) <= l phi(t)` for `l >= 1`) on
//! `[0, inf)`. All but softplus are also concave there.

use crate::error::{Error, Result};
use crate::num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Sigmoid,
    Softplus,
    /// `t / (1 + t)`.
    Saturating,
}

impl Activation {
    pub const ALL: [Activation; 6] = [
        Activation::Identity,
        Activation::Relu,
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Softplus,
        Activation::Saturating,
    ];

    pub fn from_name(name: &str) -> Result<Self> {
        Activation::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or(Error::UnknownActivation)
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Softplus => "softplus",
            Activation::Saturating => "saturating",
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Activation::Identity => t,
            Activation::Relu => t.max(0.0),
            Activation::Tanh => num::tanh(t),
            Activation::Sigmoid => 1.0 / (1.0 + num::exp(-t)),
            Activation::Softplus => {
                if t > 0.0 {
                    t + num::ln_1p(num::exp(-t))
                } else {
                    num::ln_1p(num::exp(t))
                }
            }
            Activation::Saturating => t / (1.0 + t),
        }
    }

    /// `phi(0)`.
    pub fn at_zero(self) -> f64 {
        match self {
            Activation::Sigmoid => 0.5,
            Activation::Softplus => core::f64::consts::LN_2,
            _ => 0.0,
        }
    }

    /// Right derivative at zero. On the orthant relu is the identity, so 1.
    pub fn slope_at_zero(self) -> f64 {
        match self {
            Activation::Sigmoid => 0.25,
            Activation::Softplus => 0.5,
            _ => 1.0,
        }
    }

    /// `lim phi(t)/t` as `t -> inf`.
    pub fn slope_at_infinity(self) -> f64 {
        match self {
            Activation::Identity | Activation::Relu | Activation::Softplus => 1.0,
            Activation::Tanh | Activation::Sigmoid | Activation::Saturating => 0.0,
        }
    }

    /// Whether `phi(t) = t` on `[0, inf)`.
    pub fn is_linear(self) -> bool {
        matches!(self, Activation::Identity | Activation::Relu)
    }
}
