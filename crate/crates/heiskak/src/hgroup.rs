//! The Heisenberg group on ℝ³: group law, Korányi metric, homogeneous
//! dilations, and the vertical/horizontal projection decomposition.
//!
//! Points are written `(x, y, t)` with `z = x + iy` the horizontal part.
//! The group law is
//!
//! ```text
//! (x,y,t) * (u,v,τ) = (x+u, y+v, t + τ + (xv - yu)/2)
//! ```
//!
//! and the Korányi norm is `‖(z,t)‖ = (|z|⁴ + 16 t²)^(1/4)`, giving the
//! left-invariant metric `d(p,q) = ‖q⁻¹ * p‖`. For each angle θ the
//! horizontal subgroup `V_θ = {(λ e^{iθ}, 0)}` has Euclidean orthogonal
//! complement `V_θ^⊥` (a vertical plane), and every point factors uniquely
//! as `p = w * v` with `w ∈ V_θ^⊥` and `v ∈ V_θ`. All operations here are
//! pure functions on `Copy` values.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use std::f64::consts::PI;

/// A point of the Heisenberg group, `z = x + iy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint {
        x: 0.0,
        y: 0.0,
        t: 0.0,
    };

    /// Builds a point; coordinates must be finite.
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        let p = HPoint { x, y, t };
        assert!(p.is_finite(), "non-finite HPoint coordinates ({x}, {y}, {t})");
        p
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    /// The same coordinates as a Euclidean 3-vector.
    pub fn as_vec3(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.t)
    }

    pub fn from_vec3(v: Vec3) -> Self {
        HPoint::new(v.x, v.y, v.z)
    }

    /// `|z|`, the Euclidean length of the horizontal part.
    pub fn horizontal_norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Group product `p * q`.
pub fn group_mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint {
        x: p.x + q.x,
        y: p.y + q.y,
        t: p.t + q.t + 0.5 * (p.x * q.y - p.y * q.x),
    }
}

/// Group inverse; `(x,y,t)⁻¹ = (-x,-y,-t)`.
pub fn group_inv(p: HPoint) -> HPoint {
    HPoint {
        x: -p.x,
        y: -p.y,
        t: -p.t,
    }
}

/// Korányi norm `(|z|⁴ + 16 t²)^(1/4)`.
pub fn koranyi_norm(p: HPoint) -> f64 {
    let z2 = p.x * p.x + p.y * p.y;
    (z2 * z2 + 16.0 * p.t * p.t).powf(0.25)
}

/// Left-invariant Korányi distance `‖q⁻¹ * p‖`.
pub fn koranyi_dist(p: HPoint, q: HPoint) -> f64 {
    koranyi_norm(group_mul(group_inv(q), p))
}

/// Homogeneous dilation `D_λ(z,t) = (λz, λ²t)`; requires `λ > 0`.
///
/// Scales the Korányi norm exactly by `λ`.
pub fn dilate(lambda: f64, p: HPoint) -> HPoint {
    assert!(
        lambda > 0.0 && lambda.is_finite(),
        "dilation factor must be positive and finite, got {lambda}"
    );
    HPoint {
        x: lambda * p.x,
        y: lambda * p.y,
        t: lambda * lambda * p.t,
    }
}

/// An angle θ normalized into `[0, π)`, indexing the horizontal subgroup
/// `V_θ` and its vertical plane `V_θ^⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    theta: f64,
}

impl Angle {
    pub fn new(theta: f64) -> Self {
        assert!(theta.is_finite(), "non-finite angle");
        let mut t = theta % PI;
        if t < 0.0 {
            t += PI;
        }
        // rem can land exactly on π from below due to rounding
        if t >= PI {
            t = 0.0;
        }
        Angle { theta: t }
    }

    pub fn radians(&self) -> f64 {
        self.theta
    }

    /// Unit vector `e^{iθ}` spanning the horizontal subgroup.
    pub fn horizontal_unit(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// Unit vector `i e^{iθ}` spanning the horizontal leg of `V_θ^⊥`.
    pub fn plane_unit(&self) -> (f64, f64) {
        (-self.theta.sin(), self.theta.cos())
    }
}

/// Unique factorization `p = w * v` with `w ∈ V_θ^⊥` and `v ∈ V_θ`.
///
/// With `λ = x cosθ + y sinθ` and `μ = -x sinθ + y cosθ`, the factors are
/// `v = (λ e^{iθ}, 0)` and `w = (μ i e^{iθ}, t + λμ/2)`; the product
/// reconstructs `p` exactly under [`group_mul`]. Returns `(w, v)`.
pub fn vertical_decompose(theta: Angle, p: HPoint) -> (HPoint, HPoint) {
    let (c, s) = theta.horizontal_unit();
    let lambda = p.x * c + p.y * s;
    let mu = -p.x * s + p.y * c;
    let w = HPoint {
        x: -mu * s,
        y: mu * c,
        t: p.t + 0.5 * lambda * mu,
    };
    let v = HPoint {
        x: lambda * c,
        y: lambda * s,
        t: 0.0,
    };
    (w, v)
}

/// The vertical projection `P_{V_θ^⊥}(p)`, i.e. the `w` factor alone.
pub fn vertical_project(theta: Angle, p: HPoint) -> HPoint {
    vertical_decompose(theta, p).0
}

/// Tolerance for membership in a vertical plane, applied to the component
/// of the horizontal part along `e^{iθ}`.
pub const PLANE_TOL: f64 = 1e-9;

/// Chart coordinates `(μ, s)` of a point `w = (μ i e^{iθ}, s)` of `V_θ^⊥`.
///
/// The chart is a Euclidean isometry of the plane, so its area measure is
/// the plane's 2-dimensional Hausdorff measure. Errors if `w` is not on
/// the plane to within [`PLANE_TOL`].
pub fn plane_chart(theta: Angle, w: HPoint) -> Result<(f64, f64)> {
    let (c, s) = theta.horizontal_unit();
    let along = w.x * c + w.y * s;
    if along.abs() > PLANE_TOL {
        return Err(Error::NotOnPlane(w, along.abs()));
    }
    let mu = -w.x * s + w.y * c;
    Ok((mu, w.t))
}

/// Inverse of [`plane_chart`]: `(μ, s) ↦ (μ i e^{iθ}, s)`.
pub fn plane_chart_inv(theta: Angle, mu: f64, s: f64) -> HPoint {
    let (us, uc) = {
        let (c, sn) = theta.horizontal_unit();
        (-sn, c)
    };
    HPoint {
        x: mu * us,
        y: mu * uc,
        t: s,
    }
}

/// Chart coordinates of the vertical projection of an arbitrary point.
///
/// Same as `plane_chart(theta, vertical_project(theta, p))` but without the
/// membership check; used on hot paths.
pub fn project_to_chart(theta: Angle, p: HPoint) -> (f64, f64) {
    let (c, s) = theta.horizontal_unit();
    let lambda = p.x * c + p.y * s;
    let mu = -p.x * s + p.y * c;
    (mu, p.t + 0.5 * lambda * mu)
}
