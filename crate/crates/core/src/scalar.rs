use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar accepted by the generic numerics (f32 or f64).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Threshold used to rescale recurrences before they overflow.
    const RESCALE: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("index representable")
    }

    fn of_i(n: i64) -> Self {
        Self::from_i64(n).expect("index representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const RESCALE: f64 = 1e18;
}

impl Real for f64 {
    const RESCALE: f64 = 1e150;
}
