//! Pseudo-arclength continuation of Neumann solution branches in the
//! exponent p, seeded at the bifurcation points p_i = 2 + λ_i^rad of the
//! trivial family u ≡ 1, plus bifurcation-diagram export and blow-up
//! diagnostics along branch tails.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::asymptotics;
use crate::bvp::{self, ShootingOptions};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::geom::critical_exponent;
use crate::io;
use crate::problem::{Profile, RadialProblem};
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchDirection {
    /// u(0) > 1 component.
    Upper,
    /// u(0) < 1 component.
    Lower,
}

impl std::fmt::Display for BranchDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchDirection::Upper => write!(f, "upper"),
            BranchDirection::Lower => write!(f, "lower"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Left the configured (p, u(0)) window.
    WindowEdge,
    MaxPoints,
    /// Arclength step underflowed; the partial branch is kept.
    Stalled,
}

#[derive(Debug, Clone, Copy)]
pub struct BranchPoint {
    pub p: f64,
    /// Center value u(0).
    pub a: f64,
    /// Handle into the branch's profile store.
    pub profile: usize,
    pub zeros_of_u_minus_1: usize,
    pub arclength: f64,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub n: u32,
    pub radius: f64,
    pub origin_index: usize,
    pub origin_p: f64,
    pub direction: BranchDirection,
    pub points: Vec<BranchPoint>,
    pub profiles: Vec<Arc<Profile>>,
    pub termination: Termination,
}

impl Branch {
    pub fn profile(&self, point: &BranchPoint) -> &Profile {
        &self.profiles[point.profile]
    }
}

/// Stop limits for a branch trace.
#[derive(Debug, Clone, Copy)]
pub struct BranchStops {
    pub p_min: f64,
    pub p_max: f64,
    pub a_max: f64,
}

impl BranchStops {
    /// Defaults covering near-critical windows and blow-up tails at desk
    /// scale; `trace_branch` widens p_max to clear the seeded bifurcation
    /// point when necessary.
    pub fn for_dimension(n: u32) -> Self {
        BranchStops {
            p_min: 2.05,
            p_max: critical_exponent(n) + 2.0,
            a_max: 1e4,
        }
    }
}

/// Bifurcation points (i, p_i = 2 + λ_i^rad) of the trivial branch for
/// i = 2..=i_max.
pub fn detect_bifurcations(n: u32, radius: f64, i_max: usize) -> Result<Vec<(usize, f64)>> {
    if i_max < 2 {
        return Err(Error::InvalidParameter("need i_max >= 2".into()));
    }
    let eigs = bvp::radial_neumann_eigenvalues(n, radius, i_max)?;
    Ok((2..=i_max).map(|i| (i, 2.0 + eigs[i - 1])).collect())
}

const SEED_OFFSET: f64 = 1e-3;
const CORRECTOR_RESIDUAL: f64 = 1e-9;
const FD_RELATIVE_STEP: f64 = 1e-7;
const MIN_STEP: f64 = 1e-12;

struct ShootingMap {
    n: u32,
    radius: f64,
    opts: ShootingOptions,
}

impl ShootingMap {
    fn residual(&self, a: f64, p: f64) -> f64 {
        match RadialProblem::new(self.n, self.radius, p) {
            Ok(problem) => bvp::shooting_residual(&problem, a, &self.opts),
            Err(_) => f64::NAN,
        }
    }

    fn profile(&self, a: f64, p: f64) -> Result<Profile> {
        let problem = RadialProblem::new(self.n, self.radius, p)?;
        crate::radial_ode::integrate(&problem, a, self.radius, self.opts.ivp_tolerance)
    }
}

/// Root of p ↦ S(a, p) nearest to the seed exponent, searched on a
/// doubling window; used to step off the trivial branch at a = 1 ± ε₀.
/// The branch can leave the kernel exponent steeply in p (dp/da of order
/// 10³ is observed), so the window has to be allowed to grow.
fn depart_exponent(map: &ShootingMap, a: f64, p_center: f64) -> Result<f64> {
    let floor = 2.0 + 1e-6;
    let mut width = 0.4;
    for _ in 0..6 {
        let samples = 160;
        let lo = (p_center - width).max(floor);
        let hi = p_center + width;
        let h = (hi - lo) / (samples - 1) as f64;
        let mut best: Option<(f64, f64)> = None;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..samples {
            let p = lo + k as f64 * h;
            let f = map.residual(a, p);
            if let Some((pp, fp)) = prev {
                if fp.is_finite() && f.is_finite() && fp.signum() != f.signum() {
                    let mid = 0.5 * (pp + p);
                    let dist = (mid - p_center).abs();
                    if best.map_or(true, |(_, bd)| dist < bd) {
                        best = Some((pp, dist));
                    }
                }
            }
            prev = Some((p, f));
        }
        if let Some((cell_lo, _)) = best {
            return roots::brent(|p| map.residual(a, p), cell_lo, cell_lo + h, 1e-12, 200);
        }
        width *= 2.0;
    }
    Err(Error::NoSignChange {
        lo: p_center - width,
        hi: p_center + width,
    })
}

/// Newton corrector for the bordered system
/// { S(a, p) = 0, t · (X - X_pred) = 0 } with finite-difference Jacobians.
///
/// A solution further than a fraction of the arclength step from the
/// prediction is rejected: jumps of that size mean the iteration slid onto
/// a different solution sheet (the trivial families a ≡ 0 and a ≡ 1 are
/// global Newton attractors of the shooting map).
fn correct(
    map: &ShootingMap,
    pred: [f64; 2],
    tangent: [f64; 2],
    step: f64,
) -> Option<([f64; 2], usize)> {
    let max_drift = 0.75 * step;
    let mut x = pred;
    let converged = |x: &[f64; 2], s: f64, constraint: f64| -> bool {
        let drift = ((x[0] - pred[0]).powi(2) + (x[1] - pred[1]).powi(2)).sqrt();
        s.abs() <= CORRECTOR_RESIDUAL && constraint.abs() <= 1e-12 && drift <= max_drift
    };
    for it in 0..10 {
        let s = map.residual(x[0], x[1]);
        if !s.is_finite() {
            return None;
        }
        let constraint = tangent[0] * (x[0] - pred[0]) + tangent[1] * (x[1] - pred[1]);
        if converged(&x, s, constraint) {
            return Some((x, it));
        }
        let drift = ((x[0] - pred[0]).powi(2) + (x[1] - pred[1]).powi(2)).sqrt();
        if drift > 4.0 * max_drift {
            return None;
        }
        let da = FD_RELATIVE_STEP * x[0].abs().max(1.0);
        let dp = FD_RELATIVE_STEP * x[1].abs().max(1.0);
        let s_a = (map.residual(x[0] + da, x[1]) - s) / da;
        let s_p = (map.residual(x[0], x[1] + dp) - s) / dp;
        if !s_a.is_finite() || !s_p.is_finite() {
            return None;
        }
        // solve [s_a s_p; t_a t_p] d = -[s; constraint]
        let det = s_a * tangent[1] - s_p * tangent[0];
        if det.abs() < 1e-300 {
            return None;
        }
        let d0 = (-s * tangent[1] + s_p * constraint) / det;
        let d1 = (-s_a * constraint + s * tangent[0]) / det;
        x[0] += d0;
        x[1] += d1;
        if !x[0].is_finite() || !x[1].is_finite() {
            return None;
        }
    }
    None
}

/// Trace one branch component from the bifurcation point p_i = 2 + λ_i^rad.
///
/// Departure seeds the center value at 1 ± ε₀ and solves for the matching
/// exponent; from there a tangent predictor and bordered Newton corrector
/// follow the curve in (a, p), halving the arclength step on corrector
/// failure and growing it 1.3x on fast convergence.
pub fn trace_branch(
    n: u32,
    radius: f64,
    i: usize,
    direction: BranchDirection,
    step: f64,
    max_points: usize,
    stops: BranchStops,
) -> Result<Branch> {
    if i < 2 {
        return Err(Error::InvalidParameter("need branch index i >= 2".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("need step > 0".into()));
    }
    let origin_p = detect_bifurcations(n, radius, i)?
        .last()
        .map(|&(_, p)| p)
        .unwrap();
    // The trivial-branch linearization -Δv = (p-2)v has its radial Neumann
    // kernel at p = 2 + ν_{i-1} = 1 + λ_i^rad; the nonconstant branch
    // passes through (that exponent, a = 1), so departure scans there.
    let kernel_p = origin_p - 1.0;
    let p_max = stops.p_max.max(origin_p + 2.0);
    let map = ShootingMap {
        n,
        radius,
        opts: ShootingOptions::default(),
    };
    let sign = match direction {
        BranchDirection::Upper => 1.0,
        BranchDirection::Lower => -1.0,
    };

    // two seed points off the trivial family
    let a1 = 1.0 + sign * SEED_OFFSET;
    let p1 = depart_exponent(&map, a1, kernel_p)?;
    let a2 = 1.0 + sign * 2.0 * SEED_OFFSET;
    let p2 = depart_exponent(&map, a2, p1)?;

    let mut profiles: Vec<Arc<Profile>> = Vec::new();
    let mut points: Vec<BranchPoint> = Vec::new();
    let push_point =
        |points: &mut Vec<BranchPoint>, profiles: &mut Vec<Arc<Profile>>, profile: Profile, a: f64, p: f64, s: f64| {
            let zeros = profile.sign_changes_about(1.0);
            profiles.push(Arc::new(profile));
            points.push(BranchPoint {
                p,
                a,
                profile: profiles.len() - 1,
                zeros_of_u_minus_1: zeros,
                arclength: s,
            });
        };

    push_point(&mut points, &mut profiles, map.profile(a1, p1)?, a1, p1, 0.0);
    let ds0 = ((a2 - a1).powi(2) + (p2 - p1).powi(2)).sqrt();
    push_point(&mut points, &mut profiles, map.profile(a2, p2)?, a2, p2, ds0);

    let mut x = [a2, p2];
    let mut tangent = {
        let t = [a2 - a1, p2 - p1];
        let norm = (t[0] * t[0] + t[1] * t[1]).sqrt();
        [t[0] / norm, t[1] / norm]
    };
    let mut h = step;
    let max_h = step * 8.0;
    let mut termination = Termination::MaxPoints;

    while points.len() < max_points {
        let pred = [x[0] + h * tangent[0], x[1] + h * tangent[1]];
        let corrected = correct(&map, pred, tangent, h).filter(|(next, _)| {
            // never cross the trivial families: sign of a - 1 is pinned by
            // the component, and a = 0 is a solution sheet of its own
            sign * (next[0] - 1.0) > 0.0 && next[0].abs() > 1e-3
        });
        let accepted = match corrected {
            Some((next, iters)) => match map.profile(next[0], next[1]) {
                Ok(profile) if !profile.truncated() => {
                    // zero count of u - 1 is constant along a component;
                    // a change means the corrector slid onto another sheet
                    let zeros = profile.sign_changes_about(1.0);
                    if zeros == points.last().unwrap().zeros_of_u_minus_1 {
                        Some((next, iters, profile))
                    } else {
                        None
                    }
                }
                _ => None,
            },
            None => None,
        };
        match accepted {
            Some((next, iters, profile)) => {
                let dx = [next[0] - x[0], next[1] - x[1]];
                let ds = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
                let arclength = points.last().unwrap().arclength + ds;
                push_point(&mut points, &mut profiles, profile, next[0], next[1], arclength);
                // keep orientation
                let mut t_new = [dx[0] / ds, dx[1] / ds];
                if t_new[0] * tangent[0] + t_new[1] * tangent[1] < 0.0 {
                    t_new = [-t_new[0], -t_new[1]];
                }
                tangent = t_new;
                x = next;
                if iters <= 3 {
                    h = (h * 1.3).min(max_h);
                }
                let a_dist = (x[0] - 1.0).abs();
                if x[1] < stops.p_min || x[1] > p_max || a_dist > stops.a_max {
                    termination = Termination::WindowEdge;
                    break;
                }
            }
            None => {
                h *= 0.5;
                if h < MIN_STEP {
                    termination = Termination::Stalled;
                    break;
                }
            }
        }
    }

    Ok(Branch {
        n,
        radius,
        origin_index: i,
        origin_p,
        direction,
        points,
        profiles,
        termination,
    })
}

/// Trace upper and lower components for each listed index; independent
/// branches run on their own threads.
pub fn trace_diagram(
    n: u32,
    radius: f64,
    indices: &[usize],
    step: f64,
    max_points: usize,
    stops: BranchStops,
) -> Result<Vec<Branch>> {
    let mut jobs: Vec<(usize, BranchDirection)> = Vec::new();
    for &i in indices {
        jobs.push((i, BranchDirection::Upper));
        jobs.push((i, BranchDirection::Lower));
    }
    let results: Vec<Result<Branch>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(i, dir)| {
                scope.spawn(move || trace_branch(n, radius, i, dir, step, max_points, stops))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut branches = Vec::new();
    for r in results {
        branches.push(r?);
    }
    Ok(branches)
}

/// File name `branch_N{N}_R{R}_i{i}_{direction}.csv`.
pub fn branch_file_name(branch: &Branch) -> String {
    format!(
        "branch_N{}_R{}_i{}_{}.csv",
        branch.n,
        io::format_float_compact(branch.radius),
        branch.origin_index,
        branch.direction
    )
}

#[derive(Debug, Clone)]
pub struct DiagramIndex {
    pub index_path: PathBuf,
    pub branch_paths: Vec<PathBuf>,
}

/// Write one CSV per branch (`p,u0,a,zeros,arclength`) plus an index file
/// carrying branch metadata and the critical-exponent reference line.
pub fn bifurcation_diagram(
    n: u32,
    radius: f64,
    branches: &[Branch],
    outdir: &Path,
    overwrite: bool,
) -> Result<DiagramIndex> {
    std::fs::create_dir_all(outdir)?;
    let mut branch_paths = Vec::new();
    let mut index = String::from("file,N,R,i,direction,origin_p,points,termination,p_star\n");
    for branch in branches {
        let name = branch_file_name(branch);
        let path = outdir.join(&name);
        let mut csv = String::from("p,u0,a,zeros,arclength\n");
        for pt in &branch.points {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                io::format_float(pt.p),
                io::format_float(pt.a),
                io::format_float(pt.a),
                pt.zeros_of_u_minus_1,
                io::format_float(pt.arclength)
            ));
        }
        io::write_atomic(&path, &csv, overwrite)?;
        index.push_str(&format!(
            "{},{},{},{},{},{},{},{:?},{}\n",
            name,
            branch.n,
            io::format_float(branch.radius),
            branch.origin_index,
            branch.direction,
            io::format_float(branch.origin_p),
            branch.points.len(),
            branch.termination,
            io::format_float(critical_exponent(n))
        ));
        branch_paths.push(path);
    }
    let index_path = outdir.join(format!(
        "diagram_N{}_R{}_index.csv",
        n,
        io::format_float_compact(radius)
    ));
    io::write_atomic(&index_path, &index, overwrite)?;
    Ok(DiagramIndex {
        index_path,
        branch_paths,
    })
}

/// Re-validate an emitted branch CSV: every (p, u0) row must still satisfy
/// the Neumann residual bound when re-shot.
pub fn audit_branch_csv(n: u32, radius: f64, path: &Path, bound: f64) -> Result<usize> {
    let text = std::fs::read_to_string(path)?;
    let opts = ShootingOptions::default();
    let mut checked = 0;
    for (k, line) in text.lines().enumerate() {
        if k == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 5 {
            return Err(Error::Parse(format!("bad branch row: {line}")));
        }
        let p: f64 = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("{e}")))?;
        let a: f64 = fields[2]
            .parse()
            .map_err(|e| Error::Parse(format!("{e}")))?;
        let problem = RadialProblem::new(n, radius, p)?;
        let s = bvp::shooting_residual(&problem, a, &opts);
        if !(s.abs() <= bound) {
            return Err(Error::NonConvergence {
                iterations: k,
                residual: s,
            });
        }
        checked += 1;
    }
    Ok(checked)
}

/// Per-point blow-up diagnostics over a branch tail.
#[derive(Debug, Clone, Copy)]
pub struct BlowupPoint {
    pub p: f64,
    pub u0: f64,
    /// Concentration parameter implied by the center value.
    pub mu: f64,
    /// Single-bubble decomposition residual against a zero weak limit.
    pub decomposition_residual: f64,
    /// |Pohozaev residual| / (|lhs| + |rhs|) at δ = R.
    pub pohozaev_relative: f64,
    /// Weak-limit probe u(R/2).
    pub u_at_half_radius: f64,
    /// 2* - p.
    pub criticality_gap: f64,
}

#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub points: Vec<BlowupPoint>,
    /// Least-squares slope of ln|2* - p| against ln μ over the tail.
    pub exponent_slope: Option<f64>,
    /// True when the final decomposition residual is small enough to be
    /// consistent with a single-bubble blow-up profile.
    pub consistent_single_bubble: bool,
}

/// Threshold on the decomposition residual separating bubble-like tails
/// from profiles that are not blowing up.
pub const SINGLE_BUBBLE_RESIDUAL: f64 = 0.1;

/// Largest implied concentration scale still counted as concentrating.
pub const CONCENTRATION_SCALE: f64 = 0.5;

pub fn blowup_diagnostics(branch: &Branch, tail: usize) -> Result<BlowupReport> {
    if tail < 2 || branch.points.len() < tail {
        return Err(Error::InsufficientTail {
            got: branch.points.len(),
            requested: tail.max(2),
        });
    }
    let start = branch.points.len() - tail;
    let mut points = Vec::with_capacity(tail);
    for pt in &branch.points[start..] {
        let profile = branch.profile(pt);
        let mu = asymptotics::mu_from_center(branch.n, pt.p, pt.a.abs())?;
        let decomposition_residual =
            asymptotics::decomposition_residual(profile, None, mu, 1.0)?;
        let poho = diagnostics::pohozaev_residual(profile, branch.radius)?;
        let scale = poho.lhs_exact.abs() + poho.rhs_boundary.abs();
        points.push(BlowupPoint {
            p: pt.p,
            u0: pt.a,
            mu,
            decomposition_residual,
            pohozaev_relative: poho.residual_exact.abs() / scale.max(1e-300),
            u_at_half_radius: profile.value_at(branch.radius / 2.0),
            criticality_gap: critical_exponent(branch.n) - pt.p,
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|q| q.criticality_gap.abs() > 1e-14 && q.mu > 0.0)
        .map(|q| (q.mu.ln(), q.criticality_gap.abs().ln()))
        .collect();
    let exponent_slope = if fit.len() >= 2 {
        let m = fit.len() as f64;
        let sx: f64 = fit.iter().map(|q| q.0).sum();
        let sy: f64 = fit.iter().map(|q| q.1).sum();
        let sxx: f64 = fit.iter().map(|q| q.0 * q.0).sum();
        let sxy: f64 = fit.iter().map(|q| q.0 * q.1).sum();
        let denom = m * sxx - sx * sx;
        (denom.abs() > 1e-12).then(|| (m * sxy - sx * sy) / denom)
    } else {
        None
    };
    // blow-up means concentration: the implied scale must be small and the
    // bubble ansatz must fit pointwise
    let consistent_single_bubble = points
        .last()
        .map(|q| q.mu < CONCENTRATION_SCALE && q.decomposition_residual < SINGLE_BUBBLE_RESIDUAL)
        .unwrap_or(false);
    Ok(BlowupReport {
        points,
        exponent_slope,
        consistent_single_bubble,
    })
}

/// Symmetric Hausdorff distance between two branches viewed as polylines in
/// the (p, u(0)) plane, restricted to their common p-range.
pub fn hausdorff_distance(a: &Branch, b: &Branch) -> f64 {
    let pts = |br: &Branch| -> Vec<[f64; 2]> {
        br.points.iter().map(|q| [q.p, q.a]).collect()
    };
    let pa = pts(a);
    let pb = pts(b);
    let lo = a
        .points
        .iter()
        .map(|q| q.p)
        .fold(f64::INFINITY, f64::min)
        .max(b.points.iter().map(|q| q.p).fold(f64::INFINITY, f64::min));
    let hi = a
        .points
        .iter()
        .map(|q| q.p)
        .fold(f64::NEG_INFINITY, f64::max)
        .min(
            b.points
                .iter()
                .map(|q| q.p)
                .fold(f64::NEG_INFINITY, f64::max),
        );
    let in_range = |q: &[f64; 2]| q[0] >= lo - 1e-12 && q[0] <= hi + 1e-12;
    let one_sided = |from: &[[f64; 2]], to: &[[f64; 2]]| -> f64 {
        let mut worst = 0.0f64;
        for q in from.iter().filter(|q| in_range(q)) {
            let mut best = f64::INFINITY;
            for w in to.windows(2) {
                best = best.min(point_segment_distance(*q, w[0], w[1]));
            }
            if best.is_finite() {
                worst = worst.max(best);
            }
        }
        worst
    };
    one_sided(&pa, &pb).max(one_sided(&pb, &pa))
}

fn point_segment_distance(q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let aq = [q[0] - a[0], q[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((aq[0] * ab[0] + aq[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let d = [q[0] - a[0] - t * ab[0], q[1] - a[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}
