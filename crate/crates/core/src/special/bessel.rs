use crate::Real;

fn miller_start(order_max: usize, x: f64) -> usize {
    let top = (order_max as f64).max(x);
    let m = top + 20.0 + (60.0 * top).sqrt();
    2 * ((m.ceil() as usize) / 2 + 1)
}

/// Bessel J_0(x) .. J_{order_max}(x) for x >= 0, by Miller's backward recurrence
/// normalized with J_0 + 2 Σ J_{2k} = 1.
pub fn bessel_j_seq<T: Real>(x: T, order_max: usize) -> Vec<T> {
    assert!(x >= T::zero(), "bessel_j_seq expects x >= 0");
    let mut out = vec![T::zero(); order_max + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let start = miller_start(order_max, x.f64());
    let big = T::lit(T::RESCALE);
    let two_over_x = T::lit(2.0) / x;
    let mut above = T::zero();
    let mut cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    let mut k = start;
    loop {
        if k <= order_max {
            out[k] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { T::lit(2.0) * cur };
        }
        if k == 0 {
            break;
        }
        let below = T::of(k) * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > big {
            let s = big.recip();
            cur *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    let inv = norm.recip();
    for v in out.iter_mut() {
        *v *= inv;
    }
    out
}

/// Exponentially scaled modified Bessel functions e^{-x} I_k(x), k = 0..=order_max, x >= 0.
pub fn bessel_i_scaled_seq<T: Real>(x: T, order_max: usize) -> Vec<T> {
    assert!(x >= T::zero(), "bessel_i_scaled_seq expects x >= 0");
    let mut out = vec![T::zero(); order_max + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let xf = x.f64();
    let start = miller_start(order_max, 9.0 * xf.sqrt() + 1.0).max(order_max + 20);
    let big = T::lit(T::RESCALE);
    let two_over_x = T::lit(2.0) / x;
    let mut above = T::zero();
    let mut cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    let mut k = start;
    loop {
        if k <= order_max {
            out[k] = cur;
        }
        norm += if k == 0 { cur } else { T::lit(2.0) * cur };
        if k == 0 {
            break;
        }
        let below = T::of(k) * two_over_x * cur + above;
        above = cur;
        cur = below;
        k -= 1;
        if cur > big {
            let s = big.recip();
            cur *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    let inv = norm.recip();
    for v in out.iter_mut() {
        *v *= inv;
    }
    out
}
