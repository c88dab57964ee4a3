//! Legendre polynomials by the three-term recurrence.

/// Evaluates `P_l(t)`.
pub fn legendre_eval(l: usize, t: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => t,
        _ => {
            let (mut p0, mut p1) = (1.0, t);
            for k in 1..l {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// `(P_n(t), P_n'(t))`, valid for |t| < 1.
pub(crate) fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let p = legendre_eval(n, t);
    if n == 0 {
        return (p, 0.0);
    }
    let pm1 = legendre_eval(n - 1, t);
    let d = n as f64 * (t * p - pm1) / (t * t - 1.0);
    (p, d)
}
