//! Neumann boundary value problem by shooting: root finding on the boundary
//! slope S(a) = u'(R; a), entire-space profiles, the dimension-6 exceptional
//! radii, radial Neumann eigenvalues, and the nondegeneracy test.

use crate::error::{Error, Result};
use crate::ode::{self, IvpOptions};
use crate::problem::{Profile, ProfileKind, RadialProblem};
use crate::radial_ode;
use crate::roots;

/// Default absolute tolerance on the boundary slope of a converged shot.
pub const SHOOTING_TOLERANCE: f64 = 1e-10;

/// Normalized |v'(R)| below which the linearization is declared degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Roots of the shooting map closer than this in a are numerical twins.
pub const DEDUP_RADIUS: f64 = 1e-8;

/// Stand-in slope magnitude for trajectories that blow up before reaching R;
/// keeps bisection informed of the escape direction.
const TRUNCATED_SLOPE: f64 = 1e30;

#[derive(Debug, Clone)]
pub struct ShootingResult {
    pub profile: Profile,
    pub center_value: f64,
    /// Boundary slope u'(R), the Neumann residual.
    pub boundary_slope: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ShootingOptions {
    pub ivp_tolerance: f64,
    pub shooting_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            ivp_tolerance: 1e-11,
            shooting_tolerance: SHOOTING_TOLERANCE,
            max_iterations: 200,
        }
    }
}

/// Boundary slope of the shot from center value a; truncated trajectories
/// report a signed sentinel so brackets can still be narrowed.
pub fn shooting_residual(problem: &RadialProblem, a: f64, opts: &ShootingOptions) -> f64 {
    match radial_ode::integrate(problem, a, problem.radius(), opts.ivp_tolerance) {
        Ok(profile) => {
            if profile.truncated() {
                let sign = profile.values().last().unwrap_or(0.0).signum();
                sign * TRUNCATED_SLOPE
            } else {
                profile.boundary_slope()
            }
        }
        Err(_) => f64::NAN,
    }
}

/// Solve the Neumann problem by bracketed root finding on S(a) = u'(R; a).
///
/// A bisection seed narrows the bracket (truncated shots inside the bracket
/// narrow it rather than failing), then a secant polish drives |S| below the
/// shooting tolerance. `a_lo == a_hi` is accepted as an exact root guess and
/// goes straight to the polish.
pub fn solve_neumann(problem: &RadialProblem, a_lo: f64, a_hi: f64) -> Result<ShootingResult> {
    solve_neumann_with(problem, a_lo, a_hi, &ShootingOptions::default())
}

pub fn solve_neumann_with(
    problem: &RadialProblem,
    a_lo: f64,
    a_hi: f64,
    opts: &ShootingOptions,
) -> Result<ShootingResult> {
    let mut evals = 0usize;
    let mut s = |a: f64| {
        evals += 1;
        shooting_residual(problem, a, opts)
    };

    let root = if a_lo == a_hi {
        polish_root(&mut s, a_lo, opts)?
    } else {
        let f_lo = s(a_lo);
        let f_hi = s(a_hi);
        if f_lo == 0.0 {
            a_lo
        } else if f_hi == 0.0 {
            a_hi
        } else if f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::NonFinite {
                r: problem.radius(),
                context: "shooting bracket endpoint",
            });
        } else if f_lo.signum() == f_hi.signum() {
            return Err(Error::NoSignChange { lo: a_lo, hi: a_hi });
        } else {
            // bisection until the bracket is tight, then secant polish
            let (mut lo, mut hi, mut flo) = (a_lo, a_hi, f_lo);
            for _ in 0..80 {
                if (hi - lo).abs() < 1e-6 * lo.abs().max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let fm = s(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.is_nan() {
                    // shrink toward the finite side
                    hi = mid;
                    continue;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let seed = 0.5 * (lo + hi);
            match polish_root(&mut s, seed, opts) {
                Ok(a) if a >= a_lo.min(a_hi) - 1e-6 && a <= a_lo.max(a_hi) + 1e-6 => a,
                _ => {
                    // fall back to Brent on the narrowed bracket
                    roots::brent(&mut s, lo, hi, 1e-14, opts.max_iterations)?
                }
            }
        }
    };

    let profile = radial_ode::integrate(problem, root, problem.radius(), opts.ivp_tolerance)?;
    let slope = if profile.truncated() {
        f64::INFINITY
    } else {
        profile.boundary_slope()
    };
    Ok(ShootingResult {
        center_value: root,
        boundary_slope: slope,
        converged: slope.abs() <= opts.shooting_tolerance,
        iterations: evals,
        profile,
    })
}

fn polish_root<F: FnMut(f64) -> f64>(s: &mut F, seed: f64, opts: &ShootingOptions) -> Result<f64> {
    let scale = seed.abs().max(1.0);
    let mut x0 = seed;
    let mut f0 = s(x0);
    if f0 == 0.0 {
        return Ok(x0);
    }
    let mut x1 = seed + 1e-7 * scale;
    let mut f1 = s(x1);
    for it in 0..opts.max_iterations {
        if f1.abs() <= opts.shooting_tolerance {
            return Ok(x1);
        }
        if !f1.is_finite() || f1 == f0 {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: f1,
            });
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || (x2 - x1).abs() > scale {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: f1,
            });
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = s(x1);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: f1,
    })
}

/// Evaluate S on a uniform grid of `samples` points and solve on every
/// sign-change cell; roots closer than `DEDUP_RADIUS` are merged.
pub fn scan_solutions(
    problem: &RadialProblem,
    a_min: f64,
    a_max: f64,
    samples: usize,
) -> Result<Vec<ShootingResult>> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need samples >= 2".into()));
    }
    if !(a_max > a_min) {
        return Err(Error::InvalidParameter("need a_max > a_min".into()));
    }
    let opts = ShootingOptions::default();
    let h = (a_max - a_min) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|k| a_min + k as f64 * h).collect();
    let residuals: Vec<f64> = grid
        .iter()
        .map(|&a| shooting_residual(problem, a, &opts))
        .collect();
    let mut results: Vec<ShootingResult> = Vec::new();
    for k in 0..samples - 1 {
        let (f0, f1) = (residuals[k], residuals[k + 1]);
        let cell = if f0 == 0.0 {
            Some((grid[k], grid[k]))
        } else if f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() && f1 != 0.0 {
            Some((grid[k], grid[k + 1]))
        } else {
            None
        };
        if let Some((lo, hi)) = cell {
            if let Ok(sr) = solve_neumann_with(problem, lo, hi, &opts) {
                if sr.converged {
                    results.push(sr);
                }
            }
        }
    }
    if let Some(&last) = residuals.last() {
        if last == 0.0 {
            if let Ok(sr) = solve_neumann_with(problem, a_max, a_max, &opts) {
                if sr.converged {
                    results.push(sr);
                }
            }
        }
    }
    results.sort_by(|x, y| x.center_value.partial_cmp(&y.center_value).unwrap());
    results.dedup_by(|x, y| (x.center_value - y.center_value).abs() <= DEDUP_RADIUS);
    Ok(results)
}

/// Integrate the μ = 1 equation on [0, r_max] from u(0) = a; used for the
/// entire-space profiles whose local extrema mark the admissible Neumann
/// radii.
pub fn entire_profile(n: u32, p: f64, a: f64, r_max: f64) -> Result<Profile> {
    let problem = RadialProblem::new(n, r_max, p)?;
    radial_ode::integrate(&problem, a, r_max, 1e-10)
}

fn entire_profile_with_tolerance(n: u32, p: f64, a: f64, r_max: f64, tol: f64) -> Result<Profile> {
    let problem = RadialProblem::new(n, r_max, p)?;
    radial_ode::integrate(&problem, a, r_max, tol)
}

/// First `count` local extrema of the N = 6, p = 3, u(0) = 1/2 entire
/// profile. The profile tends to 1 and oscillates around it indefinitely,
/// so each extremum is an admissible Neumann radius.
pub fn exceptional_radii_dim6(count: usize, r_max: f64) -> Result<Vec<f64>> {
    exceptional_radii_dim6_with_tolerance(count, r_max, 1e-10)
}

pub fn exceptional_radii_dim6_with_tolerance(
    count: usize,
    r_max: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    if count < 1 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let profile = entire_profile_with_tolerance(6, 3.0, 0.5, r_max, tol)?;
    let extrema = profile.extrema();
    if extrema.len() < count {
        return Err(Error::InsufficientRange {
            r_max,
            found: extrema.len(),
            requested: count,
        });
    }
    Ok(extrema[..count].to_vec())
}

/// Radial Neumann eigenvalues of -Δ + 1 on the ball of radius R.
///
/// The first entry is exactly 1 (constant eigenfunction). Subsequent
/// entries are 1 + ν where ν > 0 solves φ'(R; ν) = 0 for the radial
/// Helmholtz problem φ'' + ((N-1)/r)φ' + νφ = 0, φ(0) = 1, φ'(0) = 0,
/// located by a fixed-step scan with a doubling window and Brent
/// refinement to 1e-10 relative accuracy.
pub fn radial_neumann_eigenvalues(n: u32, radius: f64, count: usize) -> Result<Vec<f64>> {
    if count < 1 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let mut out = vec![1.0];
    if count == 1 {
        return Ok(out);
    }
    let opts = IvpOptions {
        tolerance: 1e-12,
        ..Default::default()
    };
    let slope = |nu: f64| -> f64 {
        let sol = ode::integrate_from_center(n, |_r, phi| -nu * phi, 1.0, radius, &opts)
            .expect("helmholtz integration");
        sol.nodes.last().unwrap().du
    };
    let step = 0.1 / (radius * radius);
    let mut nu_prev = step;
    let mut f_prev = slope(nu_prev);
    let mut k = 2usize;
    let max_evals = 4_000_000usize;
    let mut evals = 1usize;
    while out.len() < count {
        let nu = nu_prev + step;
        let f = slope(nu);
        evals += 1;
        if evals > max_evals {
            return Err(Error::NonConvergence {
                iterations: evals,
                residual: f,
            });
        }
        if f == 0.0 {
            out.push(1.0 + nu);
        } else if f_prev.signum() != f.signum() {
            let root = roots::brent(&mut |x| slope(x), nu_prev, nu, 1e-10, 200)?;
            out.push(1.0 + root);
            let _ = k;
            k += 1;
        }
        nu_prev = nu;
        f_prev = f;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct NondegReport {
    /// Normalized solution of the linearized problem along the base.
    pub v_profile: Profile,
    pub v_slope_at_r: f64,
    pub degenerate: bool,
    /// |v'(R)| normalized by max |v'| on [0, R].
    pub margin: f64,
}

/// Integrate the linearization with v(0) = 1, v'(0) = 0 along a converged
/// solution and test whether v'(R) vanishes: a zero boundary slope of the
/// only admissible radial kernel candidate signals degeneracy.
pub fn nondegeneracy_check(base: &ShootingResult) -> Result<NondegReport> {
    if !base.converged {
        return Err(Error::InvalidParameter(
            "nondegeneracy check requires a converged shooting result".into(),
        ));
    }
    let radius = base.profile.problem().radius();
    let v = radial_ode::integrate_linearized(&base.profile, radius, 1e-11)?;
    let slope = v.boundary_slope();
    let max_slope = v
        .derivatives()
        .map(f64::abs)
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let margin = slope.abs() / max_slope;
    Ok(NondegReport {
        v_profile: v,
        v_slope_at_r: slope,
        degenerate: margin < DEGENERACY_THRESHOLD,
        margin,
    })
}

/// Transport a solution with coefficient μ to one with coefficient μ_new:
/// v(x) = s^{2/(p-2)} u(s x) with s = √(μ_new/μ), defined on the ball of
/// radius R √(μ/μ_new). Constants map to constants and Neumann residuals
/// are preserved.
pub fn scaling_transport(profile: &Profile, mu_new: f64) -> Result<Profile> {
    if !(mu_new > 0.0) {
        return Err(Error::InvalidParameter(
            "target potential coefficient must be positive".into(),
        ));
    }
    let problem = profile.problem();
    let mu = problem.potential();
    let p = problem.exponent();
    let s = (mu_new / mu).sqrt();
    let amp = s.powf(2.0 / (p - 2.0));
    let new_radius = problem.radius() / s;
    let new_problem =
        RadialProblem::with_potential(problem.dimension(), new_radius, p, mu_new)?;
    let nodes: Vec<ode::IvpNode> = profile
        .nodes()
        .iter()
        .map(|node| ode::IvpNode {
            r: node.r / s,
            u: amp * node.u,
            du: amp * s * node.du,
            d2u: amp * s * s * node.d2u,
        })
        .collect();
    Profile::from_nodes(
        nodes,
        new_problem,
        profile.truncated(),
        ProfileKind::LntSolution,
        profile.tolerance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// First five positive roots of tan x = x, via the pole-free form
    /// g(x) = sin x - x cos x on [jπ, (j+1)π].
    pub(crate) fn tan_fixed_points(count: usize) -> Vec<f64> {
        let g = |x: f64| x.sin() - x * x.cos();
        (1..=count)
            .map(|j| {
                let lo = j as f64 * std::f64::consts::PI;
                let hi = (j + 1) as f64 * std::f64::consts::PI;
                roots::brent(g, lo, hi, 1e-14, 200).unwrap()
            })
            .collect()
    }

    #[test]
    fn constant_root_any_parameters() {
        for (n, radius, p) in [(3u32, 1.0, 6.0), (4, 1.0, 3.0), (6, 2.0, 3.0)] {
            let problem = RadialProblem::new(n, radius, p).unwrap();
            let sr = solve_neumann(&problem, 0.9, 1.1).unwrap();
            assert!(sr.converged);
            assert!((sr.center_value - 1.0).abs() < 1e-9);
            assert!(sr.boundary_slope.abs() <= SHOOTING_TOLERANCE);
        }
    }

    #[test]
    fn constant_root_general_potential() {
        let problem = RadialProblem::with_potential(4, 1.0, 3.5, 2.0).unwrap();
        let expected = 2.0f64.powf(1.0 / 1.5);
        let sr = solve_neumann(&problem, expected * 0.9, expected * 1.1).unwrap();
        assert!(sr.converged);
        assert!((sr.center_value - expected).abs() < 1e-9);
    }

    #[test]
    fn shooting_reproducibility() {
        let problem = RadialProblem::new(4, 1.0, 3.0).unwrap();
        let sr = solve_neumann(&problem, 0.8, 1.2).unwrap();
        let re = shooting_residual(&problem, sr.center_value, &ShootingOptions::default());
        assert!((re - sr.boundary_slope).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let problem = RadialProblem::new(4, 1.0, 3.0).unwrap();
        assert!(matches!(
            solve_neumann(&problem, 1.2, 1.4),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn nonconstant_solution_above_first_bifurcation() {
        // N=4, R=1: p just above the second bifurcation point carries a
        // nonconstant lower-branch solution; pinned by a dense scan of S.
        let eigs = radial_neumann_eigenvalues(4, 1.0, 2).unwrap();
        let p2 = 2.0 + eigs[1];
        let problem = RadialProblem::new(4, 1.0, p2 + 0.1).unwrap();
        let opts = ShootingOptions::default();
        let samples = 1000;
        let lo = 0.5;
        let hi = 0.999;
        let h = (hi - lo) / (samples - 1) as f64;
        let mut bracket = None;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..samples {
            let a = lo + k as f64 * h;
            let f = shooting_residual(&problem, a, &opts);
            if let Some((ap, fp)) = prev {
                if fp.signum() != f.signum() {
                    bracket = Some((ap, a));
                    break;
                }
            }
            prev = Some((a, f));
        }
        let (blo, bhi) = bracket.expect("scan found no nonconstant root");
        let sr = solve_neumann(&problem, blo, bhi).unwrap();
        assert!(sr.converged);
        assert!((sr.center_value - 1.0).abs() > 1e-3, "root is the constant");
    }

    #[test]
    fn scan_finds_constant_and_zero() {
        let problem = RadialProblem::new(4, 1.0, 3.0).unwrap();
        let found = scan_solutions(&problem, 0.5, 1.5, 21).unwrap();
        assert!(found.iter().any(|s| (s.center_value - 1.0).abs() < 1e-8));
        let near_zero = scan_solutions(&problem, -0.1, 0.1, 21).unwrap();
        assert!(near_zero.iter().any(|s| s.center_value.abs() < 1e-8));
    }

    #[test]
    fn entire_profile_constants() {
        let profile = entire_profile(6, 3.0, 1.0, 10.0).unwrap();
        for v in profile.values() {
            assert!((v - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn dim6_profile_oscillates_toward_one() {
        let profile = entire_profile(6, 3.0, 0.5, 60.0).unwrap();
        assert!(!profile.truncated());
        assert!((profile.value_at(60.0) - 1.0).abs() < 0.05);
        let ext = profile.extrema();
        assert!(ext.len() >= 5, "found {} extrema", ext.len());
        // alternation above/below 1 with decreasing amplitude
        let amplitudes: Vec<f64> = ext.iter().map(|&r| profile.value_at(r) - 1.0).collect();
        for w in amplitudes.windows(2) {
            assert!(w[0].signum() != w[1].signum(), "no alternation: {amplitudes:?}");
            assert!(w[1].abs() < w[0].abs(), "no decay: {amplitudes:?}");
        }
        // gaps bounded away from zero
        let min_gap = ext
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap > 1.0, "min extremum gap {min_gap}");
    }

    #[test]
    fn exceptional_radii_ordering_and_prefix() {
        let five = exceptional_radii_dim6(5, 25.0).unwrap();
        let three = exceptional_radii_dim6(3, 25.0).unwrap();
        for w in five.windows(2) {
            assert!(w[1] > w[0]);
        }
        for k in 0..3 {
            assert!((five[k] - three[k]).abs() <= 1e-9);
        }
        assert!(matches!(
            exceptional_radii_dim6(5, 6.0),
            Err(Error::InsufficientRange { .. })
        ));
    }

    #[test]
    fn first_exceptional_radius_stable_under_refinement() {
        let coarse = exceptional_radii_dim6_with_tolerance(1, 12.0, 1e-9).unwrap()[0];
        let fine = exceptional_radii_dim6_with_tolerance(1, 12.0, 1e-11).unwrap()[0];
        assert!(
            (coarse - fine).abs() < 1e-7,
            "R1 tolerance drift: {coarse} vs {fine}"
        );
    }

    #[test]
    fn scan_at_first_exceptional_radius_contains_half() {
        let r1 = exceptional_radii_dim6(1, 12.0).unwrap()[0];
        let problem = RadialProblem::new(6, r1, 3.0).unwrap();
        let found = scan_solutions(&problem, 0.1, 2.0, 60).unwrap();
        assert!(
            found.iter().any(|s| (s.center_value - 0.5).abs() < 1e-6),
            "roots: {:?}",
            found.iter().map(|s| s.center_value).collect::<Vec<_>>()
        );
    }

    #[test]
    fn eigenvalues_match_tan_oracle_dim3() {
        let eigs = radial_neumann_eigenvalues(3, 1.0, 6).unwrap();
        assert_eq!(eigs[0], 1.0);
        let xs = tan_fixed_points(5);
        for (j, &x) in xs.iter().enumerate() {
            let expected = 1.0 + x * x;
            assert!(
                (eigs[j + 1] - expected).abs() < 1e-8,
                "eigenvalue {}: {} vs {}",
                j + 2,
                eigs[j + 1],
                expected
            );
        }
    }

    #[test]
    fn eigenvalues_strictly_increasing() {
        for (n, radius) in [(3u32, 1.0), (4, 1.0), (6, 2.5)] {
            let eigs = radial_neumann_eigenvalues(n, radius, 5).unwrap();
            for w in eigs.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn eigenvalue_radius_scaling() {
        let e1 = radial_neumann_eigenvalues(3, 1.0, 4).unwrap();
        let e2 = radial_neumann_eigenvalues(3, 2.0, 4).unwrap();
        for j in 1..4 {
            let nu1 = e1[j] - 1.0;
            let nu2 = e2[j] - 1.0;
            assert!(
                (nu2 - nu1 / 4.0).abs() <= 1e-9 * nu1.abs().max(1.0),
                "scaling fails at j = {j}"
            );
        }
    }

    #[test]
    fn nondegenerate_constant_dim3() {
        // u ≡ 1, p = 2* = 6, N = 3, R = 1: 4/(N-2) = 4 is not a radial
        // Neumann eigenvalue of -Δ on B_1 (those are 0, 20.19, ...).
        let problem = RadialProblem::new(3, 1.0, 6.0).unwrap();
        let sr = solve_neumann(&problem, 1.0, 1.0).unwrap();
        let report = nondegeneracy_check(&sr).unwrap();
        assert!(!report.degenerate, "margin {}", report.margin);
    }

    #[test]
    fn degenerate_at_tuned_radius_dim3() {
        // ν1(R) = x1²/R² equals 4 exactly at R = x1/2.
        let x1 = tan_fixed_points(1)[0];
        let radius = x1 / 2.0;
        let problem = RadialProblem::new(3, radius, 6.0).unwrap();
        let sr = solve_neumann(&problem, 1.0, 1.0).unwrap();
        let report = nondegeneracy_check(&sr).unwrap();
        assert!(report.degenerate, "margin {}", report.margin);
    }

    #[test]
    fn nondegenerate_dim6_profile_at_first_radius() {
        let r1 = exceptional_radii_dim6(1, 12.0).unwrap()[0];
        let problem = RadialProblem::new(6, r1, 3.0).unwrap();
        let sr = solve_neumann(&problem, 0.45, 0.55).unwrap();
        assert!((sr.center_value - 0.5).abs() < 1e-6);
        let report = nondegeneracy_check(&sr).unwrap();
        assert!(!report.degenerate, "margin {}", report.margin);
    }

    #[test]
    fn scaling_transport_identity_and_constants() {
        let problem = RadialProblem::with_potential(4, 1.0, 4.0, 2.0).unwrap();
        let a = problem.constant_solution();
        let profile = radial_ode::integrate(&problem, a, 1.0, 1e-11).unwrap();
        let same = scaling_transport(&profile, 2.0).unwrap();
        assert!((same.value_at(0.5) - profile.value_at(0.5)).abs() < 1e-12);
        // constants map to constants: at p = 2* the image of the constant
        // for μ is the constant for μ_new
        let crit = RadialProblem::with_potential(4, 1.0, 4.0, 2.0).unwrap();
        let c = radial_ode::integrate(&crit, crit.constant_solution(), 1.0, 1e-11).unwrap();
        let moved = scaling_transport(&c, 3.0).unwrap();
        let expected = 3.0f64.powf(1.0 / 2.0);
        for v in moved.values() {
            assert!((v - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_transport_round_trip() {
        let problem = RadialProblem::new(5, 2.0, 3.4).unwrap();
        let profile = radial_ode::integrate(&problem, 0.6, 2.0, 1e-11).unwrap();
        let there = scaling_transport(&profile, 3.7).unwrap();
        let back = scaling_transport(&there, 1.0).unwrap();
        assert_eq!(back.len(), profile.len());
        let worst = profile
            .nodes()
            .iter()
            .zip(back.nodes().iter())
            .map(|(a, b)| (a.u - b.u).abs().max((a.r - b.r).abs()))
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-9, "round trip drift {worst}");
    }

    #[test]
    fn scaling_transport_preserves_neumann_residual() {
        // nonconstant solution: the N=6 profile at the first exceptional radius
        let r1 = exceptional_radii_dim6(1, 12.0).unwrap()[0];
        let problem = RadialProblem::new(6, r1, 3.0).unwrap();
        let sr = solve_neumann(&problem, 0.45, 0.55).unwrap();
        let moved = scaling_transport(&sr.profile, 2.0).unwrap();
        let re = shooting_residual(
            moved.problem(),
            moved.center_value(),
            &ShootingOptions::default(),
        );
        assert!(re.abs() < 1e-8, "transported residual {re}");
    }
}
