use crate::Real;

// B_{2j} / (2j (2j-1)) for the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> T {
    assert!(x > T::zero(), "ln_gamma needs a positive argument");
    let fifteen = T::lit(15.0);
    let mut shift = T::zero();
    let mut y = x;
    // Shift upward so the asymptotic series is accurate, tracking the product in log form.
    let mut prod = T::one();
    while y < fifteen {
        prod *= y;
        y += T::one();
        if prod > T::lit(1e30) {
            shift += prod.ln();
            prod = T::one();
        }
    }
    shift += prod.ln();
    let inv = y.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut p = inv;
    for c in STIRLING {
        series += T::lit(c) * p;
        p *= inv2;
    }
    (y - T::lit(0.5)) * y.ln() - y + T::lit(0.5) * (T::TAU()).ln() + series - shift
}

/// ln n!
pub fn ln_factorial<T: Real>(n: usize) -> T {
    if n <= 20 {
        let mut f = 1.0f64;
        for j in 2..=n {
            f *= j as f64;
        }
        T::lit(f.ln())
    } else {
        ln_gamma(T::of(n + 1))
    }
}

/// ln of the odd double factorial n!! for n = -1, 1, 3, ... ((-1)!! = 1).
pub fn ln_odd_double_factorial<T: Real>(n: i64) -> T {
    assert!(n >= -1 && n.rem_euclid(2) == 1, "odd argument >= -1 required");
    let h = ((n + 1) / 2) as usize;
    // (2h-1)!! = (2h)! / (2^h h!)
    ln_factorial::<T>(2 * h) - T::of(h) * T::LN_2() - ln_factorial::<T>(h)
}

/// ln C(n, k).
pub fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    assert!(k <= n);
    ln_factorial::<T>(n) - ln_factorial::<T>(k) - ln_factorial::<T>(n - k)
}
