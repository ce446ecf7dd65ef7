//! Point-line duality between ℍ and ℝ³.
//!
//! A point `p* = (x, y, t)` of ℍ is sent to the straight line
//!
//! ```text
//! ℓ*(x,y,t) = (0, x, t - xy/2) + λ·(1, -y, y²/2)
//! ```
//!
//! whose direction lies on the cone `Γ: η₂² = 2 η₁ η₃`. Conversely a point
//! `(a,b,c)` of ℝ³ is sent to the horizontal line
//! `ℓ(a,b,c) = {(as+b, s, c+bs/2)}` of ℍ. The two maps are dual:
//! `p ∈ ℓ*(p*)` exactly when `p* ∈ ℓ(p)`, which turns membership of a point
//! in a dual tube `ℓ*(B)` into a line-ball intersection test in ℍ.

use crate::geom::{Line3, Vec3};
use crate::hgroup::{self, Angle, HPoint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dual line `ℓ*(p*)` with unit direction.
pub fn dual_line(p_star: HPoint) -> Line3 {
    let (anchor, dir) = dual_line_raw(p_star);
    Line3::new(anchor, dir)
}

/// Anchor and *unnormalized* direction `(1, -y, y²/2)` of `ℓ*(p*)`.
///
/// The raw direction satisfies `η₂² - 2η₁η₃ = 0` identically.
pub fn dual_line_raw(p_star: HPoint) -> (Vec3, Vec3) {
    let HPoint { x, y, t } = p_star;
    (
        Vec3::new(0.0, x, t - x * y / 2.0),
        Vec3::new(1.0, -y, y * y / 2.0),
    )
}

/// Unit dual direction of a point, `normalize(1, -y, y²/2)`.
pub fn dual_direction(y: f64) -> Vec3 {
    Vec3::new(1.0, -y, y * y / 2.0).normalized()
}

/// A horizontal line of ℍ in the `(a, b, c)` parametrization,
/// `s ↦ (as+b, s, c+bs/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalLine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HorizontalLine {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        HorizontalLine { a, b, c }
    }

    pub fn point_at(&self, s: f64) -> HPoint {
        HPoint::new(self.a * s + self.b, s, self.c + self.b * s / 2.0)
    }

    /// Subgroup angle: the horizontal direction is `(a, 1)`, so
    /// `θ = atan2(1, a) ∈ (0, π)`.
    pub fn theta(&self) -> Angle {
        Angle::new(1.0_f64.atan2(self.a))
    }

    /// The point `w ∈ V_θ^⊥` with `ℓ(a,b,c) = w * V_θ`.
    pub fn plane_point(&self) -> HPoint {
        let d = 1.0 + self.a * self.a;
        HPoint::new(
            self.b / d,
            -self.a * self.b / d,
            self.c - self.a * self.b * self.b / (2.0 * d),
        )
    }

    /// The same line as a Euclidean line in the coordinates of ℍ ≅ ℝ³.
    pub fn as_line3(&self) -> Line3 {
        Line3::new(
            Vec3::new(self.b, 0.0, self.c),
            Vec3::new(self.a, 1.0, self.b / 2.0),
        )
    }

    /// Euclidean distance from a point of ℍ to the line.
    pub fn distance_to(&self, p: HPoint) -> f64 {
        self.as_line3().distance_to(p.as_vec3())
    }

    /// Recovers `(a,b,c)` from the `(θ, w)` parametrization. `θ = 0` lines
    /// run along the x-axis and have no `(a,b,c)` representation.
    pub fn from_theta_chart(theta: Angle, mu: f64, s: f64) -> Option<Self> {
        let (c, sn) = theta.horizontal_unit();
        if sn == 0.0 {
            return None;
        }
        // sin θ > 0 on (0, π), and √(1+a²) = 1/sin θ
        let a = c / sn;
        let b = -mu / sn;
        let cc = s + a * b * b / (2.0 * (1.0 + a * a));
        Some(HorizontalLine::new(a, b, cc))
    }
}

/// The duality map `ℓ: ℝ³ → horizontal lines of ℍ`.
pub fn dual_point_line(p: Vec3) -> HorizontalLine {
    HorizontalLine::new(p.x, p.y, p.z)
}

/// The horizontal line `w * V_θ` through the chart point `(μ, s)` of
/// `V_θ^⊥`, as a Euclidean line.
pub fn horizontal_line3(theta: Angle, mu: f64, s: f64) -> Line3 {
    let w = hgroup::plane_chart_inv(theta, mu, s);
    let (c, sn) = theta.horizontal_unit();
    // tangent of λ ↦ w * (λ e^{iθ}, 0); the t-slope is -μ/2
    Line3::new(w.as_vec3(), Vec3::new(c, sn, -mu / 2.0))
}

/// Checks both sides of the duality at tolerance `tol`:
/// `(p ∈ ℓ*(p*), p* ∈ ℓ(p))` by point-line distance. The duality lemma
/// asserts the two are equal.
pub fn incidence_check(p: Vec3, p_star: HPoint, tol: f64) -> (bool, bool) {
    assert!(tol > 0.0, "tolerance must be positive");
    let on_dual = dual_line(p_star).distance_to(p) <= tol;
    let on_horizontal = dual_point_line(p).distance_to(p_star) <= tol;
    (on_dual, on_horizontal)
}

/// Membership of `x` in the clipped dual tube `ℓ*(B) ∩ B_E(0,1)` for the
/// Euclidean ball `B = B_E(center, r)`.
///
/// Computed through the duality: `x ∈ ℓ*(B)` iff the horizontal line
/// `ℓ(x)` meets `B`, i.e. iff the Euclidean distance from the center to
/// `ℓ(x)` is at most `r`.
pub fn dual_tube_membership(x: Vec3, center: HPoint, r: f64) -> bool {
    assert!(r > 0.0, "ball radius must be positive");
    if x.norm() > 1.0 {
        return false;
    }
    dual_point_line(x).distance_to(center) <= r
}

/// Empirical tube-inclusion constants for a point `p* ∈ B_ℍ(0,1)`.
///
/// Returns `(C1, C2)` where, over `n_samples` random probes restricted to
/// `B_E(0,100)`:
///
/// - `C1` is the smallest constant observed such that every sampled point
///   of the δ-neighbourhood of `ℓ*(p*)` lies in `ℓ*(B_E(p*, C1·δ))`
///   (the proof of the inclusion exhibits 100 as an upper bound);
/// - `C2` is the smallest constant observed such that every sampled point
///   of `ℓ*(B_E(p*, δ))` lies within `C2·δ` of `ℓ*(p*)`.
pub fn tube_constant_probe(p_star: HPoint, delta: f64, n_samples: usize, seed: u64) -> (f64, f64) {
    assert!(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (anchor, dir_raw) = dual_line_raw(p_star);
    let dir_norm = dir_raw.norm();
    let lambda_max = (100.0 - anchor.norm() - 1.0) / dir_norm;
    let center_line = dual_line(p_star);

    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for _ in 0..n_samples {
        // (inc1): perturb a point of the dual line by ξ with |ξ| < δ
        let lambda = rng.gen_range(-lambda_max..lambda_max);
        let xi = sample_ball(&mut rng, delta);
        let probe = anchor + dir_raw * lambda + xi;
        let needed = dual_point_line(probe).distance_to(p_star);
        c1 = c1.max(needed / delta);

        // (inc2): a point of ℓ*(q') for q' ∈ B_E(p*, δ), kept in B_E(0,100)
        let off = sample_ball(&mut rng, delta);
        let q = HPoint::new(p_star.x + off.x, p_star.y + off.y, p_star.t + off.z);
        let (qa, qd) = dual_line_raw(q);
        let qmax = (100.0 - qa.norm()) / qd.norm();
        let ql = rng.gen_range(-qmax..qmax);
        let point = qa + qd * ql;
        c2 = c2.max(center_line.distance_to(point) / delta);
    }
    (c1, c2)
}

/// Uniform sample from the open Euclidean ball of radius `r`, by rejection
/// from the bounding cube.
pub(crate) fn sample_ball<R: Rng>(rng: &mut R, r: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm_squared() < 1.0 {
            return v * r;
        }
    }
}

/// Uniform sample from `B_ℍ(0,1)` (Korányi unit ball), by rejection from
/// its bounding box `|x|,|y| ≤ 1, |t| ≤ 1/4`.
pub fn sample_koranyi_unit_ball<R: Rng>(rng: &mut R) -> HPoint {
    loop {
        let p = HPoint::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.25..0.25),
        );
        if hgroup::koranyi_norm(p) < 1.0 {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn dual_line_examples() {
        // ℓ*(0,0,0) is the η₁-axis
        let l = dual_line(HPoint::ORIGIN);
        assert_eq!(l.anchor, Vec3::ZERO);
        assert_abs_diff_eq!(l.direction.x, 1.0, epsilon = 1e-15);

        // ℓ*(1,1,1): anchor (0,1,1/2), direction ∝ (1,-1,1/2)
        let (a, d) = dual_line_raw(HPoint::new(1.0, 1.0, 1.0));
        assert_eq!(a, Vec3::new(0.0, 1.0, 0.5));
        assert_eq!(d, Vec3::new(1.0, -1.0, 0.5));
    }

    #[test]
    fn dual_point_line_examples() {
        // ℓ(0,0,0) is the y-axis: (θ, w) = (π/2, 0)
        let l = dual_point_line(Vec3::ZERO);
        assert_abs_diff_eq!(
            l.theta().radians(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            hgroup::koranyi_norm(l.plane_point()),
            0.0,
            epsilon = 1e-15
        );

        // ℓ(1,0,0) = {(s,s,0)}: θ = π/4 through the origin
        let l = dual_point_line(Vec3::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(
            l.theta().radians(),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            hgroup::koranyi_norm(l.plane_point()),
            0.0,
            epsilon = 1e-15
        );
        let p = l.point_at(0.7);
        assert_abs_diff_eq!(p.x, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn incidence_examples() {
        let (a, b) = incidence_check(Vec3::new(1.0, 0.0, 0.0), HPoint::ORIGIN, 1e-9);
        assert!(a && b);
        let (a, b) = incidence_check(Vec3::new(1.0, 0.0, 5.0), HPoint::ORIGIN, 1e-9);
        assert!(!a && !b);
    }

    #[test]
    fn tube_membership_examples() {
        let center = HPoint::new(0.3, -0.4, 0.05);
        let l = dual_line(center);
        // a point of the center line (kept inside the unit ball) is in the tube
        let x = l.point_at(0.2);
        assert!(x.norm() <= 1.0);
        assert!(dual_tube_membership(x, center, 0.01));
        // far point: outside
        assert!(!dual_tube_membership(Vec3::new(0.9, 0.0, 0.0), HPoint::new(0.0, 0.0, 0.2), 0.001));
        // clipped at the unit ball
        assert!(!dual_tube_membership(l.point_at(5.0), center, 0.01));
    }

    #[test]
    fn tube_probe_axis_case_is_exact() {
        // p* = 0: the dual line is the η₁-axis and perturbation algebra
        // degenerates, so C1 ≈ 1
        let (c1, _c2) = tube_constant_probe(HPoint::ORIGIN, 1e-2, 2000, 7);
        assert!(c1 <= 1.0 + 1e-9, "axis case C1 = {c1}");
    }

    #[test]
    fn plane_point_is_on_the_line() {
        let l = HorizontalLine::new(0.8, -0.3, 0.45);
        let w = l.plane_point();
        assert!(l.distance_to(w) < 1e-12);
        let (mu, s) = hgroup::plane_chart(l.theta(), w).unwrap();
        let back = HorizontalLine::from_theta_chart(l.theta(), mu, s).unwrap();
        assert_abs_diff_eq!(back.a, l.a, epsilon = 1e-9);
        assert_abs_diff_eq!(back.b, l.b, epsilon = 1e-9);
        assert_abs_diff_eq!(back.c, l.c, epsilon = 1e-9);
    }

    proptest! {
        /// Unnormalized dual directions lie exactly on the cone.
        #[test]
        fn cone_membership(y in -3.0..3.0f64) {
            let d = Vec3::new(1.0, -y, y * y / 2.0);
            prop_assert!((d.y * d.y - 2.0 * d.x * d.z).abs() <= 1e-12);
        }

        /// Constructed incidences agree in both duality slots.
        #[test]
        fn duality_involution(
            x in -1.0..1.0f64, y in -1.0..1.0f64, t in -0.25..0.25f64,
            lambda in -2.0..2.0f64,
        ) {
            let p_star = HPoint::new(x, y, t);
            let p = dual_line(p_star).point_at(lambda);
            let (a, b) = incidence_check(p, p_star, 1e-9);
            prop_assert!(a && b);
        }

        /// Off-line points are rejected in both slots equally.
        #[test]
        fn duality_negatives_agree(
            x in -1.0..1.0f64, y in -1.0..1.0f64, t in -0.25..0.25f64,
            px in -2.0..2.0f64, py in -2.0..2.0f64, pz in -2.0..2.0f64,
        ) {
            let p_star = HPoint::new(x, y, t);
            let p = Vec3::new(px, py, pz);
            let d1 = dual_line(p_star).distance_to(p);
            let d2 = dual_point_line(p).distance_to(p_star);
            // agreement away from the tolerance boundary
            prop_assume!((d1 - 1e-9).abs() > 1e-7 && (d2 - 1e-9).abs() > 1e-7);
            let (a, b) = incidence_check(p, p_star, 1e-9);
            prop_assert_eq!(a, b);
        }

        /// Constant (θ, w) along the parameter of ℓ(a,b,c).
        #[test]
        fn horizontal_line_has_fixed_plane_point(
            a in -3.0..3.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64,
            s in -4.0..4.0f64,
        ) {
            let l = HorizontalLine::new(a, b, c);
            let theta = l.theta();
            let w = l.plane_point();
            let p = l.point_at(s);
            let wp = hgroup::vertical_project(theta, p);
            prop_assert!((wp.x - w.x).abs() < 1e-9);
            prop_assert!((wp.y - w.y).abs() < 1e-9);
            prop_assert!((wp.t - w.t).abs() < 1e-9);
        }

        /// Monotone containment of dual tubes under ball enlargement.
        #[test]
        fn tube_monotonicity(
            cx in -0.5..0.5f64, cy in -0.5..0.5f64, ct in -0.2..0.2f64,
            xx in -1.0..1.0f64, xy in -1.0..1.0f64, xz in -1.0..1.0f64,
            r in 0.01..0.2f64,
        ) {
            let center = HPoint::new(cx, cy, ct);
            let x = Vec3::new(xx, xy, xz);
            if dual_tube_membership(x, center, r) {
                prop_assert!(dual_tube_membership(x, center, 2.0 * r));
            }
        }
    }
}
