//! Sphere areas, ball volumes and the critical Sobolev exponent.

use std::f64::consts::PI;

/// Gamma function at half-integer arguments, `gamma_half(k)` = Γ(k/2).
///
/// Exact recursion from Γ(1/2) = √π and Γ(1) = 1; the only values needed by
/// the dimension bookkeeping in this crate.
pub fn gamma_half(twice_arg: u32) -> f64 {
    assert!(twice_arg >= 1, "gamma_half argument must be positive");
    let mut val = if twice_arg % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut k = if twice_arg % 2 == 0 { 2 } else { 1 };
    while k + 2 <= twice_arg {
        val *= k as f64 / 2.0;
        k += 2;
    }
    val
}

/// Area of the unit n-sphere S^n ⊂ R^{n+1}: ω_n = 2 π^{(n+1)/2} / Γ((n+1)/2).
///
/// With this convention ω_2 = 4π, ω_3 = 2π², ω_5 = π³ and ω_6 = 16π³/15.
pub fn sphere_area(n: u32) -> f64 {
    let half_exp = n + 1; // π^{(n+1)/2}
    let pi_pow = if half_exp % 2 == 0 {
        PI.powi((half_exp / 2) as i32)
    } else {
        PI.powi((half_exp / 2) as i32) * PI.sqrt()
    };
    2.0 * pi_pow / gamma_half(half_exp)
}

/// Volume of the unit ball in R^n, |B_1| = ω_{n-1} / n.
pub fn ball_volume(n: u32) -> f64 {
    sphere_area(n - 1) / n as f64
}

/// Critical Sobolev exponent 2* = 2N/(N-2).
pub fn critical_exponent(n: u32) -> f64 {
    assert!(n >= 3);
    2.0 * n as f64 / (n as f64 - 2.0)
}
