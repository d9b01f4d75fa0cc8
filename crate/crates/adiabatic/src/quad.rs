//! Shared quadrature and 1-D optimisation utilities.

use num_complex::Complex64;

/// 16-point Gauss-Legendre rule on [-1, 1]: (node, weight) pairs.
pub const GL16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754094),
    (-0.9445750230732326, 0.06225352393864789),
    (-0.8656312023878318, 0.09515851168249278),
    (-0.7554044083550030, 0.12462897125553387),
    (-0.6178762444026438, 0.14959598881657673),
    (-0.4580167776572274, 0.16915651939500254),
    (-0.2816035507792589, 0.18260341504492358),
    (-0.0950125098376374, 0.18945061045506850),
    (0.0950125098376374, 0.18945061045506850),
    (0.2816035507792589, 0.18260341504492358),
    (0.4580167776572274, 0.16915651939500254),
    (0.6178762444026438, 0.14959598881657673),
    (0.7554044083550030, 0.12462897125553387),
    (0.8656312023878318, 0.09515851168249278),
    (0.9445750230732326, 0.06225352393864789),
    (0.9894009349916499, 0.027152459411754094),
];

/// Map the GL16 nodes onto the interval [a, b]; returns the 16 abscissae.
pub fn gl16_nodes(a: f64, b: f64) -> [f64; 16] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [0.0; 16];
    for (k, (x, _)) in GL16.iter().enumerate() {
        out[k] = mid + half * x;
    }
    out
}

/// Integrate real samples taken at the GL16 nodes of [a, b].
pub fn gl16_sum(a: f64, b: f64, values: &[f64; 16]) -> f64 {
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (k, (_, w)) in GL16.iter().enumerate() {
        acc += w * values[k];
    }
    acc * half
}

/// Integrate complex samples taken at the GL16 nodes of [a, b].
pub fn gl16_sum_complex(a: f64, b: f64, values: &[Complex64; 16]) -> Complex64 {
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, (_, w)) in GL16.iter().enumerate() {
        acc += values[k] * *w;
    }
    acc * half
}

/// Adaptive Simpson integration of a smooth scalar function.
///
/// Recursion stops when the local Richardson estimate meets the requested
/// absolute tolerance (distributed across subintervals) or a depth cap.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, abs_tol, 48)
}

/// Composite Simpson rule over `n` uniformly spaced samples of [a, b].
///
/// `n` must be odd and at least 3; the caller supplies the samples.
pub fn composite_simpson(samples: &[f64], a: f64, b: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 3 && n % 2 == 1, "composite Simpson needs an odd sample count >= 3");
    let h = (b - a) / (n - 1) as f64;
    let mut acc = samples[0] + samples[n - 1];
    for (j, v) in samples.iter().enumerate().take(n - 1).skip(1) {
        acc += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Cumulative integral of uniformly sampled values with fourth-order accuracy.
///
/// Input: samples y_j at s_j = j * ds. Output: I_j with I_0 = 0 and
/// I_{j+1} - I_j equal to the integral over [s_j, s_{j+1}] of the cubic through
/// the four nearest samples. Falls back to the trapezoid rule when fewer than
/// four samples are available.
pub fn cumulative_integral(y: &[f64], ds: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for j in 1..n {
            out[j] = out[j - 1] + 0.5 * ds * (y[j - 1] + y[j]);
        }
        return out;
    }
    for j in 0..n - 1 {
        let inc = if j == 0 {
            (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) / 24.0
        } else if j == n - 2 {
            (9.0 * y[n - 1] + 19.0 * y[n - 2] - 5.0 * y[n - 3] + y[n - 4]) / 24.0
        } else {
            (-y[j - 1] + 13.0 * y[j] + 13.0 * y[j + 1] - y[j + 2]) / 24.0
        };
        out[j + 1] = out[j] + ds * inc;
    }
    out
}

/// Golden-section search for the minimum of a unimodal function on [a, b].
///
/// Returns (argmin, min). The bracket is shrunk until its width drops below
/// `xtol` (or 200 iterations, whichever comes first).
pub fn golden_min<E>(
    f: &mut impl FnMut(f64) -> std::result::Result<f64, E>,
    a: f64,
    b: f64,
    xtol: f64,
) -> std::result::Result<(f64, f64), E> {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo < xtol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    if f1 <= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}
