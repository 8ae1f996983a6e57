//! The radial Neumann problem instance and the solved-trajectory container.

use crate::error::{Error, Result};
use crate::geom;
use crate::ode::{hermite_eval, IvpNode};

/// One instance of the radial equation
///
///     -u'' - ((N-1)/r) u' + μ u = |u|^{p-2} u   on [0, R],
///     u'(0) = u'(R) = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    dimension: u32,
    radius: f64,
    exponent: f64,
    potential: f64,
}

impl RadialProblem {
    /// Unit potential coefficient (μ = 1).
    pub fn new(dimension: u32, radius: f64, exponent: f64) -> Result<Self> {
        Self::with_potential(dimension, radius, exponent, 1.0)
    }

    pub fn with_potential(dimension: u32, radius: f64, exponent: f64, potential: f64) -> Result<Self> {
        if dimension < 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be >= 3, got {dimension}"
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !(exponent > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent must exceed 2, got {exponent}"
            )));
        }
        if !(potential > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "potential coefficient must be positive, got {potential}"
            )));
        }
        Ok(RadialProblem {
            dimension,
            radius,
            exponent,
            potential,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    /// 2* = 2N/(N-2).
    pub fn critical_exponent(&self) -> f64 {
        geom::critical_exponent(self.dimension)
    }

    /// |u|^{p-2} u, evaluated as sign(u)·|u|^{p-1} so that non-integer
    /// exponents are well defined for sign-changing arguments.
    pub fn nonlinearity(&self, u: f64) -> f64 {
        if u == 0.0 {
            0.0
        } else {
            u.signum() * u.abs().powf(self.exponent - 1.0)
        }
    }

    /// Regular part of the second-order equation: u'' = -((N-1)/r)u' + q(u).
    pub fn rhs(&self, u: f64) -> f64 {
        self.potential * u - self.nonlinearity(u)
    }

    /// Center value of the constant solution, μ^{1/(p-2)}.
    pub fn constant_solution(&self) -> f64 {
        self.potential.powf(1.0 / (self.exponent - 2.0))
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::with_potential(self.dimension, radius, self.exponent, self.potential)
    }
}

/// Provenance of a profile; controls how extrema are refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ProfileKind {
    /// Produced by integrating the problem's own equation.
    LntSolution,
    /// Produced by integrating the linearized equation along a base profile.
    Linearized,
    /// Assembled from samples (file import, tests, transforms).
    Synthetic,
}

/// A solved radial trajectory: strictly increasing grid starting at 0,
/// with values, derivatives, and dense interpolation in between.
#[derive(Debug, Clone)]
pub struct Profile {
    nodes: Vec<IvpNode>,
    problem: RadialProblem,
    extrema: Vec<f64>,
    truncated: bool,
    pub(crate) kind: ProfileKind,
    pub(crate) tolerance: f64,
}

impl Profile {
    pub(crate) fn from_nodes(
        nodes: Vec<IvpNode>,
        problem: RadialProblem,
        truncated: bool,
        kind: ProfileKind,
        tolerance: f64,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("empty profile".into()));
        }
        if nodes[0].r != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "profile grid must start at r = 0, got {}",
                nodes[0].r
            )));
        }
        if nodes[0].du != 0.0 {
            return Err(Error::InvalidParameter(
                "radial regularity requires u'(0) = 0".into(),
            ));
        }
        for w in nodes.windows(2) {
            if !(w[1].r > w[0].r) {
                return Err(Error::InvalidParameter(
                    "profile grid must be strictly increasing".into(),
                ));
            }
        }
        let mut profile = Profile {
            nodes,
            problem,
            extrema: Vec::new(),
            truncated,
            kind,
            tolerance,
        };
        profile.extrema = crate::radial_ode::find_extrema(&profile);
        Ok(profile)
    }

    /// Build a profile from raw samples (r, u, u'); second derivatives are
    /// recovered by centered finite differences of u'.
    pub fn from_samples(
        problem: RadialProblem,
        grid: &[f64],
        values: &[f64],
        derivatives: &[f64],
    ) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != derivatives.len() {
            return Err(Error::InvalidParameter(
                "grid/values/derivatives length mismatch".into(),
            ));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let m = grid.len();
        let mut nodes = Vec::with_capacity(m);
        for i in 0..m {
            let d2u = if i == 0 {
                (derivatives[1] - derivatives[0]) / (grid[1] - grid[0])
            } else if i == m - 1 {
                (derivatives[m - 1] - derivatives[m - 2]) / (grid[m - 1] - grid[m - 2])
            } else {
                // centered difference on a possibly non-uniform grid
                let hl = grid[i] - grid[i - 1];
                let hr = grid[i + 1] - grid[i];
                let dl = (derivatives[i] - derivatives[i - 1]) / hl;
                let dr = (derivatives[i + 1] - derivatives[i]) / hr;
                (hr * dl + hl * dr) / (hl + hr)
            };
            nodes.push(IvpNode {
                r: grid[i],
                u: values[i],
                du: derivatives[i],
                d2u,
            });
        }
        Profile::from_nodes(nodes, problem, false, ProfileKind::Synthetic, 1e-10)
    }

    pub fn problem(&self) -> &RadialProblem {
        &self.problem
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.nodes.last().unwrap().r
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.r)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.u)
    }

    pub fn derivatives(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.du)
    }

    pub(crate) fn nodes(&self) -> &[IvpNode] {
        &self.nodes
    }

    /// Radii of the refined local extrema (u' = 0), origin excluded.
    pub fn extrema(&self) -> &[f64] {
        &self.extrema
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Dense value; exact at grid nodes.
    pub fn value_at(&self, r: f64) -> f64 {
        hermite_eval(&self.nodes, r).0
    }

    /// Dense derivative; exact at grid nodes.
    pub fn derivative_at(&self, r: f64) -> f64 {
        hermite_eval(&self.nodes, r).1
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        hermite_eval(&self.nodes, r)
    }

    pub fn center_value(&self) -> f64 {
        self.nodes[0].u
    }

    pub fn boundary_slope(&self) -> f64 {
        self.nodes.last().unwrap().du
    }

    /// Number of strict sign changes of u - level across the grid.
    pub fn sign_changes_about(&self, level: f64) -> usize {
        let floor = 1e-12
            * self
                .nodes
                .iter()
                .map(|n| (n.u - level).abs())
                .fold(0.0f64, f64::max)
                .max(1e-300);
        let mut count = 0;
        let mut prev: Option<f64> = None;
        for node in &self.nodes {
            let v = node.u - level;
            if v.abs() <= floor {
                continue;
            }
            if let Some(p) = prev {
                if p.signum() != v.signum() {
                    count += 1;
                }
            }
            prev = Some(v);
        }
        count
    }
}
