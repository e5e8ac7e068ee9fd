use crate::{Error, Real, Result};

/// ₂F₂(a1, a2; b1, b2; z) by direct power series.
///
/// Only reliable while |z| is moderate: for negative z the terms alternate and
/// the cancellation loses about |z|/ln 10 digits. Callers choose the regime.
pub fn hyp2f2_series<T: Real>(a1: T, a2: T, b1: T, b2: T, z: T) -> Result<T> {
    let mut term = T::one();
    let mut sum = T::one();
    let mut largest = T::one();
    for j in 0..10_000usize {
        let jf = T::of(j);
        term = term * (a1 + jf) * (a2 + jf) / ((b1 + jf) * (b2 + jf) * (jf + T::one())) * z;
        sum += term;
        largest = largest.max(term.abs());
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(1e-2) && jf > z.abs() {
            if largest * T::epsilon() > T::lit(1e-3) * sum.abs() {
                return Err(Error::numerical("2F2 series lost all significant digits"));
            }
            return Ok(sum);
        }
    }
    Err(Error::numerical("2F2 series did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_exponential() {
        // ₂F₂(a, b; a, b; z) = e^z
        let v: f64 = hyp2f2_series(0.7, 1.3, 0.7, 1.3, -3.0).unwrap();
        assert!((v - (-3.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn mpmath_reference() {
        // mpmath.hyp2f2(1.5, 1.5, 2, 3, -8)
        let v: f64 = hyp2f2_series(1.5, 1.5, 2.0, 3.0, -8.0).unwrap();
        assert!((v - REF).abs() < 1e-13, "{v}");
    }

    const REF: f64 = 0.166_011_289_421_724_77;
}
