//! Radial Neumann Green's function of -Δ + h₀ on the ball and its mass at
//! the origin, plus the dimension-3 exceptional radius where the mass of
//! -Δ + μ vanishes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom;
use crate::ode::{self, hermite_eval, IvpNode, IvpOptions};
use crate::problem::Profile;
use crate::roots;

/// Radial potential h₀(r): a constant, a power law, or an affine map of a
/// stored profile (offset + scale·u(r), which covers h₀ = 1 - 2u₀ exactly).
#[derive(Debug, Clone)]
pub enum RadialField {
    Constant(f64),
    PowerLaw { coeff: f64, exponent: f64 },
    ProfileAffine {
        base: Arc<Profile>,
        offset: f64,
        scale: f64,
    },
}

impl RadialField {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialField::Constant(c) => *c,
            RadialField::PowerLaw { coeff, exponent } => coeff * r.powf(*exponent),
            RadialField::ProfileAffine {
                base,
                offset,
                scale,
            } => offset + scale * base.value_at(r),
        }
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        match self {
            RadialField::Constant(_) => 0.0,
            RadialField::PowerLaw { coeff, exponent } => {
                if *exponent == 0.0 {
                    0.0
                } else {
                    coeff * exponent * r.powf(exponent - 1.0)
                }
            }
            RadialField::ProfileAffine { base, scale, .. } => scale * base.derivative_at(r),
        }
    }

    /// True when h₀(0) = h₀'(0) = 0, the hypothesis under which the mass
    /// expansion keeps its constant term up to dimension 5.
    fn vanishes_at_origin(&self) -> bool {
        match self {
            RadialField::Constant(c) => c.abs() < 1e-12,
            RadialField::PowerLaw { coeff, exponent } => coeff.abs() < 1e-12 || *exponent > 1.0,
            RadialField::ProfileAffine {
                base,
                offset,
                scale,
            } => (offset + scale * base.center_value()).abs() < 1e-10,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RadialField::Constant(c) => format!("constant {c}"),
            RadialField::PowerLaw { coeff, exponent } => format!("{coeff} * r^{exponent}"),
            RadialField::ProfileAffine { offset, scale, .. } => {
                format!("{offset} + {scale} * u(r)")
            }
        }
    }
}

/// Radial Green's function samples on (r_min, R], normalized so that
/// r^{N-2} G(r) → 1/((N-2) ω_{N-1}) at the origin.
#[derive(Debug, Clone)]
pub struct GreenProfile {
    pub n: u32,
    pub radius: f64,
    pub potential: RadialField,
    nodes: Vec<IvpNode>,
    /// Factor applied to the raw backward solution to fix the singular
    /// coefficient.
    pub normalization: f64,
}

impl GreenProfile {
    pub fn value_at(&self, r: f64) -> f64 {
        hermite_eval(&self.nodes, r).0
    }

    pub fn derivative_at(&self, r: f64) -> f64 {
        hermite_eval(&self.nodes, r).1
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0].r
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.r)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.u)
    }

    /// Singular coefficient target 1/((N-2) ω_{N-1}).
    pub fn singular_coefficient(&self) -> f64 {
        1.0 / ((self.n as f64 - 2.0) * geom::sphere_area(self.n - 1))
    }
}

/// Threshold on the normalized homogeneous boundary slope below which the
/// operator is declared to have a radial Neumann kernel.
pub const KERNEL_MARGIN: f64 = 1e-8;

/// Compute the radial Neumann Green's function of -Δ + h₀ by backward
/// integration of the homogeneous equation from G(R) = 1, G'(R) = 0 down to
/// r_min = 1e-6 R, then rescaling so the r^{2-N} coefficient matches
/// 1/((N-2) ω_{N-1}).
///
/// Fails with `Kernel` when the forward homogeneous solution φ(0) = 1,
/// φ'(0) = 0 has φ'(R) = 0 (no uniquely defined Green's function).
pub fn green_radial(n: u32, radius: f64, potential: &RadialField) -> Result<GreenProfile> {
    if n < 3 {
        return Err(Error::InvalidParameter("need N >= 3".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let q = |r: f64, g: f64| potential.eval(r) * g;

    // kernel guard: forward homogeneous solution must have φ'(R) ≠ 0
    let guard_opts = IvpOptions {
        tolerance: 1e-11,
        overflow_cap: f64::INFINITY,
        error_per_unit_step: false,
        ..Default::default()
    };
    let phi = ode::integrate_from_center(n, q, 1.0, radius, &guard_opts)?;
    let phi_slope = phi.nodes.last().unwrap().du;
    let phi_scale = phi
        .nodes
        .iter()
        .map(|node| node.du.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    if phi_slope.abs() / phi_scale < KERNEL_MARGIN {
        return Err(Error::Kernel { radius });
    }

    let r_min = 1e-6 * radius;
    // per-step budget: the backward sweep crosses six decades of r and a
    // per-unit-r budget would over-refine the singular end
    let opts = IvpOptions {
        tolerance: 1e-12,
        overflow_cap: f64::INFINITY,
        error_per_unit_step: false,
        ..Default::default()
    };
    let backward = ode::integrate_span(n, q, radius, [1.0, 0.0], r_min, &opts)?;
    let mut nodes = backward.nodes;
    nodes.reverse();

    // fit r^{N-2} G ≈ c + b r + e r² over the smallest decade of radii and
    // read off the intercept
    let decade_hi = 10.0 * r_min;
    let pts: Vec<(f64, f64)> = nodes
        .iter()
        .take_while(|node| node.r <= decade_hi)
        .map(|node| (node.r, node.r.powi(n as i32 - 2) * node.u))
        .collect();
    let c_hat = if pts.len() >= 3 {
        quadratic_intercept(&pts)
    } else {
        pts.first().map(|&(_, f)| f).unwrap_or(1.0)
    };
    if !c_hat.is_finite() || c_hat == 0.0 {
        return Err(Error::NonFinite {
            r: r_min,
            context: "green normalization fit",
        });
    }
    let target = 1.0 / ((n as f64 - 2.0) * geom::sphere_area(n - 1));
    let scale = target / c_hat;
    for node in &mut nodes {
        node.u *= scale;
        node.du *= scale;
        node.d2u *= scale;
    }
    Ok(GreenProfile {
        n,
        radius,
        potential: potential.clone(),
        nodes,
        normalization: scale,
    })
}

/// Least-squares intercept of f ≈ c + b r + e r².
fn quadratic_intercept(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let (mut sx, mut sx2, mut sx3, mut sx4) = (0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut sxy, mut sx2y) = (0.0, 0.0, 0.0);
    // scale radii for conditioning
    let r0 = pts.last().unwrap().0;
    for &(r, f) in pts {
        let x = r / r0;
        sx += x;
        sx2 += x * x;
        sx3 += x * x * x;
        sx4 += x * x * x * x;
        sy += f;
        sxy += x * f;
        sx2y += x * x * f;
    }
    // normal equations for [c, b, e]
    let a = [[m, sx, sx2], [sx, sx2, sx3], [sx2, sx3, sx4]];
    let rhs = [sy, sxy, sx2y];
    solve3(a, rhs)[0]
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

#[derive(Debug, Clone, Copy)]
pub struct MassResult {
    /// Constant term H in the expansion of G at its singularity.
    pub mass: f64,
    /// Richardson consistency across the three extraction radii.
    pub extrapolation_error: f64,
    pub n: u32,
    pub radius: f64,
}

/// Extract the mass at the origin by Richardson extrapolation of
/// G(r) - r^{2-N}/((N-2) ω_{N-1}) at radii {1e-3, 5e-4, 2.5e-4}·R.
///
/// Supported: N = 3 (any potential); N = 4 (a fitted α₄ ln(1/r) term is
/// subtracted first); N = 5 only when h₀(0) = h₀'(0) = 0. Elsewhere the
/// expansion has no constant term at this order.
pub fn mass_at_origin(green: &GreenProfile) -> Result<MassResult> {
    let n = green.n;
    let vanishing = green.potential.vanishes_at_origin();
    match n {
        3 | 4 => {}
        5 if vanishing => {}
        5 => {
            return Err(Error::UnsupportedDimension {
                n,
                why: "generic potential leaves an r^{4-N} term above the constant",
            })
        }
        _ => {
            return Err(Error::UnsupportedDimension {
                n,
                why: "expansion has no constant term at this order",
            })
        }
    }
    let kappa = green.singular_coefficient();
    let phi = |r: f64| green.value_at(r) - kappa * r.powi(2 - n as i32);

    let r0 = 1e-3 * green.radius;
    let radii = [r0, 0.5 * r0, 0.25 * r0];
    let mut values = [phi(radii[0]), phi(radii[1]), phi(radii[2])];

    if n == 4 && !vanishing {
        // least-squares fit of φ ≈ H + α₄ ln(1/r) over the three smallest
        // decades, then subtract the logarithm
        let lo = green.r_min();
        let hi = 1e3 * lo;
        let pts: Vec<(f64, f64)> = green
            .nodes
            .iter()
            .filter(|node| node.r >= lo && node.r <= hi)
            .map(|node| ((1.0 / node.r).ln(), phi(node.r)))
            .collect();
        let alpha4 = linear_slope(&pts);
        for (v, r) in values.iter_mut().zip(radii.iter()) {
            *v -= alpha4 * (1.0 / r).ln();
        }
    }

    // two Richardson levels assuming φ = H + b r + c r² + ...
    let a1 = 2.0 * values[1] - values[0];
    let a2 = 2.0 * values[2] - values[1];
    let mass = (4.0 * a2 - a1) / 3.0;
    Ok(MassResult {
        mass,
        extrapolation_error: (a2 - a1).abs(),
        n,
        radius: green.radius,
    })
}

fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

/// Mass of -Δ + μ at the origin on the ball of radius R in dimension 3.
pub fn mass_dim3(radius: f64, mu: f64) -> Result<MassResult> {
    let green = green_radial(3, radius, &RadialField::Constant(mu))?;
    mass_at_origin(&green)
}

/// The unique radius where the dimension-3 mass of -Δ + μ vanishes.
///
/// For μ = 1 this is the root of e^{2R} = (R+1)/(R-1); general μ rescales
/// as R*(μ) = R*(1)/√μ.
pub fn exceptional_radius_dim3(mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    let h = |radius: f64| mass_dim3(radius, 1.0).map(|m| m.mass).unwrap_or(f64::NAN);
    // bisection seed on [1+1e-6, 10], secant polish inside brent
    let r_star = roots::brent(h, 1.0 + 1e-6, 10.0, 1e-10, 200)?;
    Ok(r_star / mu.sqrt())
}

/// Closed-form dimension-3 profile and mass for constant μ = 1:
/// G(r) = (e^{-r} + A sinh r)/(4π r) with A = e^{-R}(R+1)/(R cosh R - sinh R).
pub mod closed_form_dim3 {
    use std::f64::consts::PI;

    pub fn coefficient(radius: f64) -> f64 {
        (-radius).exp() * (radius + 1.0) / (radius * radius.cosh() - radius.sinh())
    }

    pub fn green(radius: f64, r: f64) -> f64 {
        let a = coefficient(radius);
        ((-r).exp() / r + a * r.sinh() / r) / (4.0 * PI)
    }

    pub fn mass(radius: f64) -> f64 {
        (coefficient(radius) - 1.0) / (4.0 * PI)
    }

    /// Root of e^{2R} = (R+1)/(R-1), i.e. the radius where the mass vanishes.
    pub fn exceptional_radius() -> f64 {
        crate::roots::brent(
            |radius: f64| (2.0 * radius).exp() * (radius - 1.0) - (radius + 1.0),
            1.0 + 1e-9,
            2.0,
            1e-14,
            200,
        )
        .expect("scalar oracle root")
    }
}
