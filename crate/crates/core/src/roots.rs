//! Bracketed scalar root finding: bisection seeding and a Brent polish.

use crate::error::{Error, Result};

/// Brent's method on a bracketing interval.
///
/// Requires f(a) and f(b) of opposite sign (either endpoint may be an exact
/// root). Converges to `rel_tol * max(1, |x|)` in the abscissa.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut a = a;
    let mut b = b;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // secant
                (2.0 * m * s, 1.0 - s)
            } else {
                // inverse quadratic
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: fb,
    })
}

/// Scan `f` on a uniform grid and return the refined root of every
/// sign-change cell, sorted ascending.
pub fn scan_roots<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    samples: usize,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    assert!(samples >= 2 && hi > lo);
    let h = (hi - lo) / (samples - 1) as f64;
    let mut values = Vec::with_capacity(samples);
    for k in 0..samples {
        let x = lo + k as f64 * h;
        let fx = f(x);
        values.push((x, fx));
    }
    let mut roots = Vec::new();
    for k in 0..samples - 1 {
        let (x0, f0) = values[k];
        let (x1, f1) = values[k + 1];
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            roots.push(brent(&mut f, x0, x1, rel_tol, 200)?);
        }
    }
    if let Some(&(x_last, f_last)) = values.last() {
        if f_last == 0.0 {
            roots.push(x_last);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}
