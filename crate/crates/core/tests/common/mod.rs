//! Reference values computed independently of the library solver.
#![allow(dead_code)]

/// `Ai(x)` from its Maclaurin series, `Ai = c1 f(x) - c2 g(x)`.
/// Accurate to ~1e-14 for |x| < 4.
pub fn airy_ai(x: f64) -> f64 {
    const C1: f64 = 0.355_028_053_887_817_2;
    const C2: f64 = 0.258_819_403_792_806_8;
    let x3 = x * x * x;
    // f = Σ 3^k (1/3)_k x^{3k} / (3k)!, g = Σ 3^k (2/3)_k x^{3k+1} / (3k+1)!
    let (mut tf, mut tg) = (1.0, x);
    let (mut f, mut g) = (tf, tg);
    for k in 0..60 {
        let k = k as f64;
        tf *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 && tg.abs() < 1e-18 {
            break;
        }
    }
    C1 * f - C2 * g
}

/// First zero of `Ai` negated, by bisection on `[-3, -2]`.
pub fn airy_first_root() -> f64 {
    let (mut lo, mut hi) = (-3.0f64, -2.0f64);
    let slo = airy_ai(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if airy_ai(mid).signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    -0.5 * (lo + hi)
}

/// `λ_n = -Z²/(n + L + 1)²` with `Z = 2DA`, `L = -1/2 + √(2DA² + m²)`.
pub fn kratzer_lambda(n: usize, d: f64, a: f64, m: i32) -> f64 {
    let z = 2.0 * d * a;
    let l = -0.5 + (2.0 * d * a * a + f64::from(m * m)).sqrt();
    -z * z / (n as f64 + l + 1.0).powi(2)
}
