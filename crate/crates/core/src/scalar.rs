//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Real scalar the compiler is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Display
    + Debug
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Default magnitude below which canonicalization drops a term.
    const CANON_THRESHOLD: f64;

    /// Convert an `f64` literal. Panics only if the literal is not representable at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const CANON_THRESHOLD: f64 = 1e-6;
}

impl Real for f64 {
    const CANON_THRESHOLD: f64 = 1e-12;
}

pub type C<T> = Complex<T>;

