//! Integral audits of computed profiles: the Pohozaev identity with exact
//! and quoted interior coefficients, its potential-weighted refinement in
//! dimension 6, weighted Lebesgue norms, and energy monotonicity.

use crate::error::{Error, Result};
use crate::geom::{critical_exponent, sphere_area};
use crate::greenmass::RadialField;
use crate::problem::Profile;
use crate::quad;
use crate::radial_ode;

/// Composite Gauss–Kronrod integration of f(r) r^{N-1} over [0, hi] along
/// the profile's own grid segments; returns (value, error estimate).
fn profile_integral<F: Fn(f64) -> f64>(profile: &Profile, hi: f64, f: F) -> (f64, f64) {
    let n = profile.problem().dimension();
    let mut total = 0.0;
    let mut err = 0.0;
    let nodes = profile.nodes();
    for w in nodes.windows(2) {
        let lo = w[0].r;
        if lo >= hi {
            break;
        }
        let seg_hi = w[1].r.min(hi);
        if seg_hi <= lo {
            continue;
        }
        let mut g = |r: f64| f(r) * r.powi(n as i32 - 1);
        let res = quad::gauss_kronrod_15(&mut g, lo, seg_hi);
        total += res.value;
        err += res.error;
    }
    (total, err)
}

/// Both sides of the multiplier identity at test radius δ.
///
/// The exact interior coefficient on ∫|u|^p is (N-2)(p-2*)/(2p), obtained
/// by integrating the equation against r u' + ((N-2)/2) u; the quoted
/// coefficient (N-2)²(p-2*)/(4N) agrees with it only at p = 2* and is
/// reported alongside for comparison. Boundary terms:
///
///   ω_{N-1} δ^{N-1} ( -δ u'²/2 - (N-2)/2 u u' + μ δ u²/2 - δ |u|^p / p ).
#[derive(Debug, Clone, Copy)]
pub struct PohozaevReport {
    pub delta: f64,
    pub lhs_exact: f64,
    pub rhs_boundary: f64,
    /// lhs_exact - rhs_boundary; vanishes on exact solutions for every p.
    pub residual_exact: f64,
    /// Interior value computed with the quoted coefficient (N-2)²(p-2*)/(4N).
    pub lhs_paper: f64,
    pub residual_paper: f64,
    pub coefficient_exact: f64,
    pub coefficient_paper: f64,
    pub quadrature_error: f64,
}

pub fn pohozaev_residual(profile: &Profile, delta: f64) -> Result<PohozaevReport> {
    if !(delta > 0.0) || delta > profile.r_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside (0, {}]",
            profile.r_max()
        )));
    }
    let problem = profile.problem();
    let n = problem.dimension() as f64;
    let p = problem.exponent();
    let mu = problem.potential();
    let p_star = problem.critical_exponent();
    let area = sphere_area(problem.dimension() - 1);

    let (i2, e2) = profile_integral(profile, delta, |r| {
        let u = profile.value_at(r);
        u * u
    });
    let (ip, ep) = profile_integral(profile, delta, |r| profile.value_at(r).abs().powf(p));

    let coefficient_exact = (n - 2.0) * (p - p_star) / (2.0 * p);
    let coefficient_paper = (n - 2.0) * (n - 2.0) * (p - p_star) / (4.0 * n);
    let lhs_exact = area * (mu * i2 + coefficient_exact * ip);
    let lhs_paper = area * (mu * i2 + coefficient_paper * ip);

    let (u, du) = profile.eval(delta);
    let rhs_boundary = area
        * delta.powf(n - 1.0)
        * (-delta / 2.0 * du * du - (n - 2.0) / 2.0 * u * du + mu * delta / 2.0 * u * u
            - delta / p * u.abs().powf(p));

    Ok(PohozaevReport {
        delta,
        lhs_exact,
        rhs_boundary,
        residual_exact: lhs_exact - rhs_boundary,
        lhs_paper,
        residual_paper: lhs_paper - rhs_boundary,
        coefficient_exact,
        coefficient_paper,
        quadrature_error: area * (mu * e2 + coefficient_exact.abs() * ep),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PotentialPohozaevReport {
    pub delta: f64,
    pub lhs_interior: f64,
    pub rhs_boundary: f64,
    pub residual: f64,
    pub quadrature_error: f64,
}

/// Dimension-6 refinement for -Δv + h₀ v = v²: integrating against
/// r v' + 2v gives
///
///   ∫_{B_δ} (h₀ + r h₀'/2) v² dx
///     = ω₅ δ⁵ ( -δ v'²/2 - 2 v v' + δ h₀(δ) v²/2 - δ v³/3 ).
pub fn pohozaev_potential_residual(
    v_profile: &Profile,
    h0: &RadialField,
    delta: f64,
) -> Result<PotentialPohozaevReport> {
    let n = v_profile.problem().dimension();
    if n != 6 {
        return Err(Error::DimensionError { expected: 6, got: n });
    }
    if !(delta > 0.0) || delta > v_profile.r_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside (0, {}]",
            v_profile.r_max()
        )));
    }
    let area = sphere_area(5);
    let (interior, err) = profile_integral(v_profile, delta, |r| {
        let v = v_profile.value_at(r);
        (h0.eval(r) + 0.5 * r * h0.eval_deriv(r)) * v * v
    });
    let lhs_interior = area * interior;
    let (v, dv) = v_profile.eval(delta);
    let rhs_boundary = area
        * delta.powi(5)
        * (-delta / 2.0 * dv * dv - 2.0 * v * dv + delta * h0.eval(delta) / 2.0 * v * v
            - delta / 3.0 * v * v * v);
    Ok(PotentialPohozaevReport {
        delta,
        lhs_interior,
        rhs_boundary,
        residual: lhs_interior - rhs_boundary,
        quadrature_error: area * err,
    })
}

/// Scaling-critical integrability exponent α = max(2*, N p/2 - N).
/// At p = 2* both branches agree exactly; rounding ties go to 2*.
pub fn alpha_exponent(n: u32, p: f64) -> f64 {
    let star = critical_exponent(n);
    let scaled = n as f64 / 2.0 * p - n as f64;
    if scaled - star <= 4.0 * f64::EPSILON * star {
        star
    } else {
        scaled
    }
}

/// ‖u‖_{L^q(B_R)} with the r^{N-1} surface measure.
pub fn lp_norm(profile: &Profile, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter("need q >= 1".into()));
    }
    let area = sphere_area(profile.problem().dimension() - 1);
    let (integral, _) = profile_integral(profile, profile.r_max(), |r| {
        profile.value_at(r).abs().powf(q)
    });
    Ok((area * integral).powf(1.0 / q))
}

/// Worst positive increment of the energy density over a dense sampling;
/// exact solutions are nonincreasing, so this should sit at integrator
/// noise level.
pub fn monotonicity_audit(profile: &Profile) -> f64 {
    let nodes = profile.nodes();
    let mut worst = 0.0f64;
    let mut prev: Option<f64> = None;
    for w in nodes.windows(2) {
        for k in 0..4 {
            let r = w[0].r + (w[1].r - w[0].r) * k as f64 / 4.0;
            let e = radial_ode::energy_density(profile, r).unwrap();
            if let Some(pe) = prev {
                worst = worst.max(e - pe);
            }
            prev = Some(e);
        }
    }
    if let Some(last) = nodes.last() {
        let e = radial_ode::energy_density(profile, last.r).unwrap();
        if let Some(pe) = prev {
            worst = worst.max(e - pe);
        }
    }
    worst
}
