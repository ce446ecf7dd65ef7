//! X-ray transforms of ball families over horizontal lines.
//!
//! A family ν realizes the density `Σ w_B χ_B / vol(B)`, so its Euclidean
//! X-ray transform along a line is a sum of chord lengths:
//! `X_E ν(ℓ) = Σ w_B · |ℓ ∩ B| / vol(B)`. Along a horizontal line
//! `ℓ = w * V_θ` with chart point `(μ, s)`, one-dimensional Korányi and
//! Euclidean Hausdorff measures differ by the constant `√(1 + μ²/4)`
//! (the Euclidean speed of the unit-Korányi parametrization), giving
//! `X_ℍ ν(ℓ) = X_E ν(ℓ) / √(1 + μ²/4)` exactly.
//!
//! Two parametrizations of line space are quadratured here:
//!
//! - h-mode `(θ, μ, s)`: the left-invariant line measure is `dθ dμ ds`,
//!   used for the identity between the θ-integrated `L^q` energies of the
//!   vertical pushforwards and the `L^q` norm of `X_ℍ`;
//! - abc-mode `(a, b, c)`: Lebesgue measure on the parameter space of
//!   `ℓ(a,b,c)`, restricted to the angular sector `θ ∈ [ε, π-ε]`
//!   (equivalently `|a| ≤ cot ε`), used for the comparability check.
//!
//! The line-space quadratures are deterministic chord sums; the energy
//! side is the Monte Carlo pushforward of [`crate::measures`]. The two
//! routes share no code path beyond the family itself.

use crate::duality::{horizontal_line3, HorizontalLine};
use crate::error::Result;
use crate::geom::{Line3, Vec3};
use crate::hgroup::{Angle, HPoint};
use crate::measures::{
    sector_energy, EnergyParams, TransformedMeasure, WeightedBallFamily,
};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

/// Length of the intersection of a line with the ball `B(center, r)`:
/// `2√(r² - d²)` where `d` is the point-line distance, zero from tangency
/// outward.
pub fn chord_length(line: &Line3, center: Vec3, r: f64) -> f64 {
    assert!(r > 0.0, "ball radius must be positive");
    let d = line.distance_to(center);
    if d >= r {
        0.0
    } else {
        2.0 * (r * r - d * d).sqrt()
    }
}

fn ball_volume(r: f64) -> f64 {
    4.0 * PI * r * r * r / 3.0
}

/// Euclidean X-ray transform of the family along a straight line.
pub fn xray_euclidean(nu: &WeightedBallFamily, line: &Line3) -> f64 {
    let r = nu.radius();
    let vol = ball_volume(r);
    nu.balls()
        .iter()
        .map(|b| b.weight * chord_length(line, b.center.as_vec3(), r) / vol)
        .sum()
}

/// Euclidean X-ray transform along the horizontal line `ℓ(a,b,c)`.
pub fn xray_transform(nu: &WeightedBallFamily, line: &HorizontalLine) -> f64 {
    xray_euclidean(nu, &line.as_line3())
}

/// Korányi-length X-ray transform along the horizontal line `w * V_θ`
/// with chart point `(μ, s)`.
pub fn xray_horizontal(nu: &WeightedBallFamily, theta: Angle, mu: f64, s: f64) -> f64 {
    let line = horizontal_line3(theta, mu, s);
    xray_euclidean(nu, &line) / metric_ratio(mu)
}

/// `dH¹_E / dH¹_ℍ` along a horizontal line at chart coordinate μ.
fn metric_ratio(mu: f64) -> f64 {
    (1.0 + mu * mu / 4.0).sqrt()
}

/// Chart coordinates of the centers at angle θ, plus the Euclidean pads
/// that bound the chart footprint of a line meeting a ball.
struct ChartLayout {
    coords: Vec<(f64, f64)>, // (μ_c, s_c) per ball
    pad_mu: f64,
    pad_s: f64,
}

fn chart_layout(nu: &WeightedBallFamily, theta: Angle) -> ChartLayout {
    let (c, s) = theta.horizontal_unit();
    let r = nu.radius();
    let mut coords = Vec::with_capacity(nu.len());
    let mut lambda_max = 0.0_f64;
    let mut mu_max = 0.0_f64;
    for b in nu.balls() {
        let lambda = b.center.x * c + b.center.y * s;
        let mu = -b.center.x * s + b.center.y * c;
        coords.push((mu, b.center.t + 0.5 * lambda * mu));
        lambda_max = lambda_max.max(lambda.abs());
        mu_max = mu_max.max(mu.abs());
    }
    ChartLayout {
        coords,
        // a line meeting B(c, r) has |μ - μ_c| <= r (μ is 1-Lipschitz) and
        // |s - s_c| <= r(1 + (|λ| + |μ| + 2r)/2)
        pad_mu: r * 1.000001,
        pad_s: r * (1.0 + 0.5 * (lambda_max + mu_max + 2.0 * r)) * 1.01,
    }
}

/// Evaluates `X_E ν` at the midpoints of an implicit `(μ, s)` grid at angle
/// θ, returning only the cells whose line meets some ball. Deterministic:
/// per-ball contributions accumulate in ball order within fixed chunks,
/// chunks merge in index order.
fn xe_chart_grid(nu: &WeightedBallFamily, theta: Angle, cell: f64) -> HashMap<(i64, i64), f64> {
    let layout = chart_layout(nu, theta);
    let r = nu.radius();
    let vol = ball_volume(r);
    let n = nu.len();
    const CHUNK: usize = 256;
    let chunks: Vec<HashMap<(i64, i64), f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut grid: HashMap<(i64, i64), f64> = HashMap::new();
            for i in lo..hi {
                let (mu_c, s_c) = layout.coords[i];
                let b = &nu.balls()[i];
                let i_lo = ((mu_c - layout.pad_mu) / cell).floor() as i64;
                let i_hi = ((mu_c + layout.pad_mu) / cell).floor() as i64;
                let j_lo = ((s_c - layout.pad_s) / cell).floor() as i64;
                let j_hi = ((s_c + layout.pad_s) / cell).floor() as i64;
                for gi in i_lo..=i_hi {
                    let mu = (gi as f64 + 0.5) * cell;
                    for gj in j_lo..=j_hi {
                        let s = (gj as f64 + 0.5) * cell;
                        let line = horizontal_line3(theta, mu, s);
                        let ch = chord_length(&line, b.center.as_vec3(), r);
                        if ch > 0.0 {
                            *grid.entry((gi, gj)).or_insert(0.0) += b.weight * ch / vol;
                        }
                    }
                }
            }
            grid
        })
        .collect();
    let mut out: HashMap<(i64, i64), f64> = HashMap::new();
    for g in chunks {
        for (k, v) in g {
            *out.entry(k).or_insert(0.0) += v;
        }
    }
    out
}

/// `∫∫ |X_ℍ ν(θ, μ, s)|^q dμ ds` by midpoint quadrature at angle θ.
fn h_line_energy_at(nu: &WeightedBallFamily, theta: Angle, q: f64, cell: f64) -> f64 {
    let grid = xe_chart_grid(nu, theta, cell);
    let area = cell * cell;
    let mut keys: Vec<_> = grid.keys().copied().collect();
    keys.sort_unstable();
    let mut acc = 0.0;
    for &(gi, gj) in &keys {
        let mu = (gi as f64 + 0.5) * cell;
        let xh = grid[&(gi, gj)] / metric_ratio(mu);
        acc += xh.powf(q) * area;
    }
    acc
}

/// Both sides of the X-ray identity: the θ-integrated `L^q` energy of the
/// vertical pushforwards (lhs, Monte Carlo route) and the `L^q` norm of
/// `X_ℍ ν` in the `(θ, μ, s)` parametrization of the line measure (rhs,
/// chord quadrature route). The identity asserts lhs = rhs.
pub fn xray_identity_check(nu: &WeightedBallFamily, q: f64, params: &EnergyParams) -> (f64, f64) {
    let lhs = sector_energy(nu, q, 0.0, PI, params);
    // the chord sum has a √-edge at tangency; the line-space quadrature
    // needs a finer grid than the density histogram to resolve it
    let eval_cell = params.cell / LINE_GRID_REFINE;
    let rhs = theta_trapezoid(0.0, PI, params.n_theta, |theta| {
        h_line_energy_at(nu, theta, q, eval_cell)
    });
    (lhs, rhs)
}

/// Ratio between the density-histogram cell and the evaluation grid of the
/// deterministic line-space quadratures.
const LINE_GRID_REFINE: f64 = 3.0;

fn theta_trapezoid(lo: f64, hi: f64, n: usize, f: impl Fn(Angle) -> f64 + Sync) -> f64 {
    let n = n.max(1);
    let h = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| f(Angle::new(lo + i as f64 * h)))
        .collect();
    let mut acc = 0.0;
    for (i, v) in vals.iter().enumerate() {
        acc += if i == 0 || i == n { 0.5 * v } else { *v };
    }
    acc * h
}

/// One `a = const` slice of the abc-mode quadrature: evaluates `X_E ν` at
/// the midpoints of the `(b, c)` grid near each ball.
fn xe_abc_slice(nu: &WeightedBallFamily, a: f64, cell: f64) -> HashMap<(i64, i64), f64> {
    let r = nu.radius();
    let vol = ball_volume(r);
    let n = nu.len();
    const CHUNK: usize = 256;
    let chunks: Vec<HashMap<(i64, i64), f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut grid: HashMap<(i64, i64), f64> = HashMap::new();
            for idx in lo..hi {
                let b = &nu.balls()[idx];
                let (x, y, t) = (b.center.x, b.center.y, b.center.t);
                let b_hat = x - a * y;
                let c_hat = t - b_hat * y / 2.0;
                let pad_b = r * (1.0 + a.abs()) * 1.01;
                let b_abs = b_hat.abs() + pad_b;
                let pad_c = r * (1.0 + 0.5 * (y.abs() * (1.0 + a.abs()) + b_abs)) * 1.01;
                let i_lo = ((b_hat - pad_b) / cell).floor() as i64;
                let i_hi = ((b_hat + pad_b) / cell).floor() as i64;
                let j_lo = ((c_hat - pad_c) / cell).floor() as i64;
                let j_hi = ((c_hat + pad_c) / cell).floor() as i64;
                for gi in i_lo..=i_hi {
                    let bb = (gi as f64 + 0.5) * cell;
                    for gj in j_lo..=j_hi {
                        let cc = (gj as f64 + 0.5) * cell;
                        let line = HorizontalLine::new(a, bb, cc).as_line3();
                        let ch = chord_length(&line, b.center.as_vec3(), r);
                        if ch > 0.0 {
                            *grid.entry((gi, gj)).or_insert(0.0) += b.weight * ch / vol;
                        }
                    }
                }
            }
            grid
        })
        .collect();
    let mut out: HashMap<(i64, i64), f64> = HashMap::new();
    for g in chunks {
        for (k, v) in g {
            *out.entry(k).or_insert(0.0) += v;
        }
    }
    out
}

/// Both sides of the angular-sector comparison: the sector energy over
/// `[ε, π-ε]` (lhs) against `∫_{L_ε} |X_E ν(ℓ(p))|^q dp` over the
/// `(a,b,c)` grid with `|a| ≤ cot ε` (rhs). The two are comparable with a
/// constant depending on `(q, ε)` only; the caller judges the ratio.
pub fn xray_l3_comparison(
    nu: &WeightedBallFamily,
    q: f64,
    epsilon: f64,
    params: &EnergyParams,
) -> (f64, f64) {
    assert!(epsilon > 0.0 && epsilon < PI / 2.0, "epsilon out of range");
    let lhs = sector_energy(nu, q, epsilon, PI - epsilon, params);

    let a_max = 1.0 / epsilon.tan();
    let n_a = 2 * params.n_theta;
    let da = 2.0 * a_max / n_a as f64;
    let cell = params.cell / LINE_GRID_REFINE;
    let area = cell * cell;
    let slice_sums: Vec<f64> = (0..n_a)
        .into_par_iter()
        .map(|k| {
            let a = -a_max + (k as f64 + 0.5) * da;
            let grid = xe_abc_slice(nu, a, cell);
            let mut keys: Vec<_> = grid.keys().copied().collect();
            keys.sort_unstable();
            keys.iter().map(|k| grid[k].powf(q) * area).sum::<f64>()
        })
        .collect();
    let rhs: f64 = slice_sums.iter().sum::<f64>() * da;
    (lhs, rhs)
}

/// Full-range energies of ν and of the left translate `L_p ν`, computed
/// with identical per-ball sample streams. The translation lemma asserts
/// the two are equal.
pub fn translation_invariance_check(
    nu: &WeightedBallFamily,
    p: HPoint,
    q: f64,
    params: &EnergyParams,
) -> (f64, f64) {
    let e1 = sector_energy(nu, q, 0.0, PI, params);
    let translated = TransformedMeasure::translated(nu, p);
    let e2 = sector_energy(&translated, q, 0.0, PI, params);
    (e1, e2)
}

/// Grid-based emitters for line-sample CSV files.
#[derive(Debug, Clone, Copy)]
pub enum LineSampler {
    /// `(θ, μ, s)` grid under the left-invariant line measure; emits
    /// `theta w_mu w_s xray_value` rows with the Korányi transform.
    HMeasure {
        n_theta: usize,
        n_mu: usize,
        n_s: usize,
    },
    /// `(a, b, c)` grid restricted to `θ ∈ [ε, π-ε]`; emits
    /// `a b c xray_value` rows with the Euclidean transform.
    Abc {
        epsilon: f64,
        n_a: usize,
        n_b: usize,
        n_c: usize,
    },
}

impl LineSampler {
    /// Writes one CSV row per sampled line.
    pub fn write_csv(&self, nu: &WeightedBallFamily, w: &mut impl Write) -> Result<()> {
        match *self {
            LineSampler::HMeasure { n_theta, n_mu, n_s } => {
                // chart bounds over all node angles
                let mut mu_lo = f64::INFINITY;
                let mut mu_hi = f64::NEG_INFINITY;
                let mut s_lo = f64::INFINITY;
                let mut s_hi = f64::NEG_INFINITY;
                let angles: Vec<Angle> = (0..=n_theta)
                    .map(|i| Angle::new(PI * i as f64 / n_theta.max(1) as f64))
                    .collect();
                for &theta in &angles {
                    let l = chart_layout(nu, theta);
                    for &(mu, s) in &l.coords {
                        mu_lo = mu_lo.min(mu - 2.0 * l.pad_mu);
                        mu_hi = mu_hi.max(mu + 2.0 * l.pad_mu);
                        s_lo = s_lo.min(s - 2.0 * l.pad_s);
                        s_hi = s_hi.max(s + 2.0 * l.pad_s);
                    }
                }
                writeln!(w, "theta,w_mu,w_s,xray_value")?;
                for &theta in &angles {
                    for i in 0..n_mu {
                        let mu = mu_lo + (i as f64 + 0.5) * (mu_hi - mu_lo) / n_mu as f64;
                        for j in 0..n_s {
                            let s = s_lo + (j as f64 + 0.5) * (s_hi - s_lo) / n_s as f64;
                            let v = xray_horizontal(nu, theta, mu, s);
                            writeln!(w, "{},{},{},{}", theta.radians(), mu, s, v)?;
                        }
                    }
                }
            }
            LineSampler::Abc {
                epsilon,
                n_a,
                n_b,
                n_c,
            } => {
                assert!(epsilon > 0.0 && epsilon < PI / 2.0);
                let a_max = 1.0 / epsilon.tan();
                // (b, c) bounds over the a-range from the ball footprints
                let r = nu.radius();
                let mut b_lo = f64::INFINITY;
                let mut b_hi = f64::NEG_INFINITY;
                let mut c_lo = f64::INFINITY;
                let mut c_hi = f64::NEG_INFINITY;
                for ball in nu.balls() {
                    let (x, y, t) = (ball.center.x, ball.center.y, ball.center.t);
                    for a in [-a_max, 0.0, a_max] {
                        let b_hat = x - a * y;
                        let pad_b = 2.0 * r * (1.0 + a.abs());
                        let c_hat = t - b_hat * y / 2.0;
                        let pad_c =
                            2.0 * r * (1.0 + 0.5 * (y.abs() * (1.0 + a.abs()) + b_hat.abs()));
                        b_lo = b_lo.min(b_hat - pad_b);
                        b_hi = b_hi.max(b_hat + pad_b);
                        c_lo = c_lo.min(c_hat - pad_c - 0.5 * b_hat.abs());
                        c_hi = c_hi.max(c_hat + pad_c + 0.5 * b_hat.abs());
                    }
                }
                writeln!(w, "a,b,c,xray_value")?;
                for k in 0..n_a {
                    let a = -a_max + (k as f64 + 0.5) * 2.0 * a_max / n_a as f64;
                    for i in 0..n_b {
                        let b = b_lo + (i as f64 + 0.5) * (b_hi - b_lo) / n_b as f64;
                        for j in 0..n_c {
                            let c = c_lo + (j as f64 + 0.5) * (c_hi - c_lo) / n_c as f64;
                            let v = xray_transform(nu, &HorizontalLine::new(a, b, c));
                            writeln!(w, "{},{},{},{}", a, b, c, v)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::WeightedBallFamily;
    use approx::assert_abs_diff_eq;

    fn one_ball(delta: f64) -> WeightedBallFamily {
        WeightedBallFamily::make_family(vec![HPoint::ORIGIN], vec![1.0], delta).unwrap()
    }

    #[test]
    fn chord_examples() {
        let line = Line3::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let r = 0.5;
        // through the center
        assert_abs_diff_eq!(
            chord_length(&line, Vec3::new(3.0, 0.0, 0.0), r),
            2.0 * r,
            epsilon = 1e-12
        );
        // tangent
        assert_eq!(chord_length(&line, Vec3::new(0.0, r, 0.0), r), 0.0);
        // d = r/2 gives r√3
        assert_abs_diff_eq!(
            chord_length(&line, Vec3::new(1.0, r / 2.0, 0.0), r),
            r * 3.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn xray_single_ball_value() {
        let nu = one_ball(0.3);
        let r = nu.radius();
        // ℓ(0,0,0) is the y-axis, which passes through the ball center
        let line = HorizontalLine::new(0.0, 0.0, 0.0);
        let expected = 2.0 * r / (4.0 * PI * r * r * r / 3.0);
        assert_abs_diff_eq!(xray_transform(&nu, &line), expected, epsilon = 1e-9);
        // line missing every ball
        let far = HorizontalLine::new(0.0, 0.9, 0.0);
        assert_eq!(xray_transform(&nu, &far), 0.0);
    }

    /// Thickened-tube oracle: mass of ν in a radius-ρ₀ tube around the
    /// line, divided by the tube cross-section area, converges to the
    /// X-ray value. Tube mass is computed by slicing each ball
    /// perpendicular to the line and integrating circle-circle
    /// intersection areas, a route independent of the chord formula.
    #[test]
    fn tube_count_oracle_matches_xray() {
        fn lens_area(d: f64, r1: f64, r2: f64) -> f64 {
            if d >= r1 + r2 {
                return 0.0;
            }
            if d <= (r1 - r2).abs() {
                let r = r1.min(r2);
                return PI * r * r;
            }
            let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
            let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
            let t1 = a1.acos();
            let t2 = a2.acos();
            r1 * r1 * (t1 - t1.sin() * t1.cos()) + r2 * r2 * (t2 - t2.sin() * t2.cos())
        }

        let nu = WeightedBallFamily::make_family(
            vec![
                HPoint::new(0.05, 0.3, 0.01),
                HPoint::new(-0.1, -0.2, 0.02),
                HPoint::new(0.3, 0.0, -0.03),
            ],
            vec![1.0, 2.0, 0.5],
            0.35,
        )
        .unwrap();
        let r = nu.radius();
        let line = HorizontalLine::new(0.3, 0.02, 0.015).as_line3();
        let rho0 = r / 24.0;

        let mut tube_mass = 0.0;
        for b in nu.balls() {
            let c = b.center.as_vec3();
            let d_axis = line.distance_to(c);
            let n_slices = 4000;
            let mut vol_int = 0.0;
            for k in 0..n_slices {
                let u = -r + (k as f64 + 0.5) * (2.0 * r / n_slices as f64);
                let slice_r2 = r * r - u * u;
                if slice_r2 <= 0.0 {
                    continue;
                }
                vol_int += lens_area(d_axis, slice_r2.sqrt(), rho0) * (2.0 * r / n_slices as f64);
            }
            tube_mass += b.weight * vol_int / ball_volume(r);
        }
        let oracle = tube_mass / (PI * rho0 * rho0);
        let direct = xray_euclidean(&nu, &line);
        assert!(
            (oracle - direct).abs() <= 0.02 * direct.max(1e-12),
            "oracle {oracle} vs direct {direct}"
        );
    }

    #[test]
    fn identity_q1_is_mass() {
        let nu = one_ball(0.25);
        let params = EnergyParams {
            n_theta: 24,
            cell: nu.delta() * nu.delta() / 2.0,
            n_mc: 512,
            seed: 11,
        };
        let (lhs, rhs) = xray_identity_check(&nu, 1.0, &params);
        assert_abs_diff_eq!(lhs, PI, epsilon = 0.01 * PI);
        assert_abs_diff_eq!(rhs, PI, epsilon = 0.01 * PI);
    }
}
