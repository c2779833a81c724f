//! Named target functions on `ℂ^d`.
//!
//! Built-in names act on the first coordinate: `cone` is `max{0, 1 − |z₁|}`,
//! `rez` is `Re z₁`, `abs2_target` is `|z₁|²`, `relu_c` is `max{0, Re z₁}`
//! and `constant:<re>,<im>` is a constant.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, C64};

type TargetFn = dyn Fn(&[C64]) -> C64 + Send + Sync;

/// A named complex function of `d` complex variables.
#[derive(Clone)]
pub struct Target {
    name: String,
    f: Arc<TargetFn>,
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Target").field("name", &self.name).finish()
    }
}

impl Target {
    pub fn new(name: impl Into<String>, f: impl Fn(&[C64]) -> C64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    /// Resolves a registry name.
    pub fn parse(name: &str) -> Result<Self> {
        let real = |x: f64| C64::new(x, 0.0);
        match name {
            "cone" => Ok(Self::new(name, move |z| real((1.0 - z[0].norm()).max(0.0)))),
            "rez" => Ok(Self::new(name, move |z| real(z[0].re))),
            "abs2_target" => Ok(Self::new(name, move |z| real(z[0].norm_sqr()))),
            "relu_c" => Ok(Self::new(name, move |z| real(z[0].re.max(0.0)))),
            _ => {
                let spec = name.strip_prefix("constant:").ok_or_else(|| Error::UnknownTarget(name.into()))?;
                let (re, im) = spec.split_once(',').ok_or_else(|| Error::UnknownTarget(name.into()))?;
                let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::UnknownTarget(name.into()));
                let c = C64::new(parse(re)?, parse(im)?);
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::UnknownTarget(name.into()));
                }
                Ok(Self::new(name, move |_| c))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        (self.f)(z)
    }

    /// Scalar view for one-dimensional use.
    pub fn eval1(&self, z: C64) -> C64 {
        (self.f)(std::slice::from_ref(&z))
    }
}

/// Names accepted by [`Target::parse`].
pub fn target_names() -> Vec<&'static str> {
    vec!["cone", "rez", "abs2_target", "relu_c", "constant:<re>,<im>"]
}
