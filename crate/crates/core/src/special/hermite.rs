use crate::Real;

/// Quadrature eigenfunctions ψ_n(x), n = 0..len, for X = (a + a†)/2:
/// ψ_0(x) = (2/π)^{1/4} e^{-x²}, real and orthonormal on the x axis.
pub fn hermite_functions<T: Real>(x: T, len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    if len == 0 {
        return out;
    }
    let q = T::SQRT_2() * x;
    let mut scale = T::lit(0.25) * (T::lit(2.0) / T::PI()).ln() - x * x;
    let big = T::lit(T::RESCALE);
    let mut prev = T::zero();
    let mut cur = T::one();
    let mut factor = scale.exp();
    out[0] = factor;
    for n in 0..len - 1 {
        let nf = T::of(n);
        let next = (T::lit(2.0) / (nf + T::one())).sqrt() * q * cur - (nf / (nf + T::one())).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > big || (mag < big.recip() && mag > T::zero()) {
            let s = mag.recip();
            cur *= s;
            prev *= s;
            scale += mag.ln();
            factor = scale.exp();
        }
        out[n + 1] = cur * factor;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_on_grid() {
        let h = 0.01f64;
        let xs: Vec<f64> = (-800..=800).map(|i| i as f64 * h).collect();
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, 8)).collect();
        for a in 0..8 {
            for b in 0..8 {
                let s: f64 = table.iter().map(|r| r[a] * r[b]).sum::<f64>() * h;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-10, "{a},{b}: {s}");
            }
        }
    }

    #[test]
    fn vacuum_variance_is_quarter() {
        let h = 0.005f64;
        let v: f64 = (-2000..=2000)
            .map(|i| {
                let x = i as f64 * h;
                let p = hermite_functions(x, 1)[0];
                x * x * p * p * h
            })
            .sum();
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deep_tail_is_finite() {
        let f = hermite_functions(40.0f64, 1800);
        assert!(f.iter().all(|v| v.is_finite()));
        assert!(f[1599].abs() > 1e-5);
    }
}
