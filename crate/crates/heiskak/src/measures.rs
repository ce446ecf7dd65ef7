//! Discrete measures as weighted families of Euclidean balls.
//!
//! A measure at scale δ is a finite family of pairwise disjoint Euclidean
//! δ²-balls with positive weights; each ball carries its weight as uniform
//! mass (this realizes a Korányi δ-ball up to the usual approximation
//! constants, and keeping mass rather than density bookkeeping absorbs the
//! normalizing volume factor). The module provides:
//!
//! - construction/validation and the plain-text serialization format,
//! - Frostman-constant estimation over Korányi balls,
//! - Monte Carlo pushforwards onto vertical planes as gridded densities,
//! - `L^q` norms of those densities and the θ-integrated sector energies.
//!
//! All randomized routines split a `ChaCha8` stream per ball, so results
//! are reproducible from a single seed regardless of parallel scheduling.

use crate::duality::sample_ball;
use crate::error::{Error, Result};
use crate::hgroup::{self, Angle, HPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// One weighted ball of a family.
#[derive(Debug, Clone, Copy)]
pub struct Ball {
    pub center: HPoint,
    pub weight: f64,
}

/// A discrete measure: disjoint Euclidean balls with positive weights.
#[derive(Debug, Clone)]
pub struct WeightedBallFamily {
    delta: f64,
    radius: f64,
    balls: Vec<Ball>,
}

/// Relative slack for the disjointness check, guarding against spurious
/// rejections of families built tangent by construction.
const DISJOINT_SLACK: f64 = 1e-9;

impl WeightedBallFamily {
    /// Builds a validated probability family at scale `delta`: Euclidean
    /// ball radius `δ²`, weights normalized to sum 1, pairwise
    /// disjointness enforced (the offending pair is reported).
    pub fn make_family(centers: Vec<HPoint>, weights: Vec<f64>, delta: f64) -> Result<Self> {
        if centers.len() != weights.len() {
            return Err(Error::LengthMismatch {
                centers: centers.len(),
                weights: weights.len(),
            });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::BadParameter(format!(
                "delta must be in (0,1), got {delta}"
            )));
        }
        if centers.is_empty() {
            return Err(Error::BadParameter("family must be nonempty".into()));
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::BadWeight { index: i, value: w });
            }
            total += w;
        }
        let balls: Vec<Ball> = centers
            .into_iter()
            .zip(weights)
            .map(|(center, w)| Ball {
                center,
                weight: w / total,
            })
            .collect();
        let fam = WeightedBallFamily {
            delta,
            radius: delta * delta,
            balls,
        };
        fam.check_disjoint()?;
        Ok(fam)
    }

    /// Internal constructor for derived families (cells, rescalings) whose
    /// enlarged balls may legally overlap and whose mass may be < 1.
    pub(crate) fn from_raw(delta: f64, radius: f64, balls: Vec<Ball>) -> Self {
        WeightedBallFamily {
            delta,
            radius,
            balls,
        }
    }

    fn check_disjoint(&self) -> Result<()> {
        let min_dist = 2.0 * self.radius * (1.0 - DISJOINT_SLACK);
        let cell = 2.0 * self.radius;
        let key = |p: &HPoint| -> (i64, i64, i64) {
            (
                (p.x / cell).floor() as i64,
                (p.y / cell).floor() as i64,
                (p.t / cell).floor() as i64,
            )
        };
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, b) in self.balls.iter().enumerate() {
            let (kx, ky, kt) = key(&b.center);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dt in -1..=1 {
                        if let Some(others) = grid.get(&(kx + dx, ky + dy, kt + dt)) {
                            for &j in others {
                                let d = self.balls[j].center.as_vec3().distance(b.center.as_vec3());
                                if d < min_dist {
                                    return Err(Error::BallOverlap {
                                        i: j,
                                        j: i,
                                        a: self.balls[j].center,
                                        b: b.center,
                                        dist: d,
                                        min: min_dist,
                                    });
                                }
                            }
                        }
                    }
                }
            }
            grid.entry((kx, ky, kt)).or_default().push(i);
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Euclidean radius of each ball (δ² for families built by
    /// [`make_family`], doubled for cell measures).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.balls.iter().map(|b| b.weight).sum()
    }

    /// Largest Korányi norm among the centers.
    pub fn support_norm(&self) -> f64 {
        self.balls
            .iter()
            .map(|b| hgroup::koranyi_norm(b.center))
            .fold(0.0, f64::max)
    }

    /// Left translation `L_g`: centers move to `g * c`. The twist is an
    /// isometry of each horizontal slice but shears `t`, so ball shapes are
    /// preserved only approximately; exact pushforwards of translated
    /// measures should go through [`TransformedMeasure`].
    pub fn translate(&self, g: HPoint) -> WeightedBallFamily {
        let balls = self
            .balls
            .iter()
            .map(|b| Ball {
                center: hgroup::group_mul(g, b.center),
                weight: b.weight,
            })
            .collect();
        WeightedBallFamily {
            delta: self.delta,
            radius: self.radius,
            balls,
        }
    }

    /// Serializes as the plain-text family format: a header `delta=<value>`
    /// followed by one `x y t weight` record per ball.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "delta={}", self.delta)?;
        for b in &self.balls {
            writeln!(w, "{} {} {} {}", b.center.x, b.center.y, b.center.t, b.weight)?;
        }
        Ok(())
    }

    /// Parses the plain-text family format and re-validates.
    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut delta = None;
        let mut centers = Vec::new();
        let mut weights = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if let Some(v) = s.strip_prefix("delta=") {
                delta = Some(v.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: ln + 1,
                    msg: e.to_string(),
                })?);
                continue;
            }
            let fields: Vec<&str> = s.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let nums: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let nums = nums.map_err(|e| Error::Parse {
                line: ln + 1,
                msg: e.to_string(),
            })?;
            if nums.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: "non-finite value".into(),
                });
            }
            centers.push(HPoint::new(nums[0], nums[1], nums[2]));
            weights.push(nums[3]);
        }
        let delta = delta.ok_or(Error::Parse {
            line: 0,
            msg: "missing delta= header".into(),
        })?;
        WeightedBallFamily::make_family(centers, weights, delta)
    }
}

/// A measure that can be sampled ball by ball: either a family directly or
/// a family composed with a left translation and a dilation. Pushforward
/// and energy quadratures are generic over this, so transformed measures
/// are sampled exactly rather than through re-enclosed balls.
pub trait BallMeasure: Sync {
    fn len(&self) -> usize;
    fn weight(&self, i: usize) -> f64;
    /// Image of the i-th ball center.
    fn center(&self, i: usize) -> HPoint;
    /// Uniform sample from the image of the i-th ball.
    fn sample(&self, i: usize, rng: &mut ChaCha8Rng) -> HPoint;
    fn total_mass(&self) -> f64;
}

impl BallMeasure for WeightedBallFamily {
    fn len(&self) -> usize {
        self.balls.len()
    }
    fn weight(&self, i: usize) -> f64 {
        self.balls[i].weight
    }
    fn center(&self, i: usize) -> HPoint {
        self.balls[i].center
    }
    fn sample(&self, i: usize, rng: &mut ChaCha8Rng) -> HPoint {
        let c = self.balls[i].center;
        let v = sample_ball(rng, self.radius);
        HPoint::new(c.x + v.x, c.y + v.y, c.t + v.z)
    }
    fn total_mass(&self) -> f64 {
        self.total_mass()
    }
}

/// The pushforward `D_λ# L_{g#} ν` of a base family: samples are drawn
/// from the base balls and mapped through `p ↦ D_λ(g * p)`.
pub struct TransformedMeasure<'a> {
    pub base: &'a WeightedBallFamily,
    pub left: HPoint,
    pub scale: f64,
}

impl<'a> TransformedMeasure<'a> {
    pub fn translated(base: &'a WeightedBallFamily, left: HPoint) -> Self {
        TransformedMeasure {
            base,
            left,
            scale: 1.0,
        }
    }

    pub fn dilated(base: &'a WeightedBallFamily, scale: f64) -> Self {
        assert!(scale > 0.0);
        TransformedMeasure {
            base,
            left: HPoint::ORIGIN,
            scale,
        }
    }

    fn map(&self, p: HPoint) -> HPoint {
        hgroup::dilate(self.scale, hgroup::group_mul(self.left, p))
    }
}

impl BallMeasure for TransformedMeasure<'_> {
    fn len(&self) -> usize {
        self.base.len()
    }
    fn weight(&self, i: usize) -> f64 {
        self.base.balls()[i].weight
    }
    fn center(&self, i: usize) -> HPoint {
        self.map(self.base.balls()[i].center)
    }
    fn sample(&self, i: usize, rng: &mut ChaCha8Rng) -> HPoint {
        self.map(self.base.sample(i, rng))
    }
    fn total_mass(&self) -> f64 {
        self.base.total_mass()
    }
}

/// Report of a Frostman-constant probe `c_{t,r_floor}`.
#[derive(Debug, Clone, Copy)]
pub struct FrostmanReport {
    pub t_exponent: f64,
    pub delta_floor: f64,
    /// Largest observed `mass(B_ℍ(x,r)) / r^t`.
    pub value: f64,
    pub argmax_center: HPoint,
    pub argmax_radius: f64,
}

/// Largest dyadic probe radius; a support-centered ball of this radius
/// contains any family supported near the unit ball, and the doubling step
/// of the covering argument needs one level above radius 2.
const FROSTMAN_RADIUS_CAP: f64 = 4.0;

/// Approximates `c_{t, r_floor}(ν) = sup ν(B_ℍ(x,r)) / r^t` over Korányi
/// balls with `r ≥ r_floor`.
///
/// Probe centers are the family's own ball centers and probe radii the
/// dyadic ladder `r_floor·2^k` up to [`FROSTMAN_RADIUS_CAP`]; a ball's mass
/// counts toward `B_ℍ(x,r)` when its center is within `r` of `x`. A
/// support-centered ball of twice the radius covers any ball meeting the
/// support, so this probe is within a bounded factor of the full supremum.
pub fn frostman_const(nu: &WeightedBallFamily, t: f64, r_floor: f64) -> FrostmanReport {
    assert!(t > 0.0, "Frostman exponent must be positive");
    assert!(
        r_floor > 0.0 && r_floor <= 1.0,
        "radius floor must be in (0,1]"
    );
    let mut radii = Vec::new();
    let mut r = r_floor;
    while r < FROSTMAN_RADIUS_CAP {
        radii.push(r);
        r *= 2.0;
    }
    radii.push(r);
    let levels = radii.len();
    let balls = nu.balls();

    // level k holds pairs with dyadic radius r_floor·2^k, i.e. with
    // d^4 <= r_floor^4 · 16^k; comparing fourth powers avoids roots in
    // the O(n²) inner loop
    let inv_f4 = 1.0 / (r_floor * r_floor * r_floor * r_floor);
    let pow16: Vec<f64> = (0..levels).map(|k| 16.0_f64.powi(k as i32)).collect();
    let pts: Vec<(f64, f64, f64, f64)> = balls
        .iter()
        .map(|b| (b.center.x, b.center.y, b.center.t, b.weight))
        .collect();

    let best = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let (xi, yi, ti, _) = pts[i];
            let mut mass = vec![0.0_f64; levels];
            for &(x, y, tt, w) in &pts {
                let dx = x - xi;
                let dy = y - yi;
                let tw = tt - ti + 0.5 * (yi * x - xi * y);
                let z2 = dx * dx + dy * dy;
                let d4 = z2 * z2 + 16.0 * tw * tw;
                let ratio = d4 * inv_f4;
                let k = if ratio <= 1.0 {
                    0
                } else {
                    // 16^k >= ratio; the exponent bits give a floor guess
                    let e = ((ratio.to_bits() >> 52) as i64 - 1023).max(0);
                    let mut k = (e / 4) as usize;
                    while k < levels - 1 && pow16[k] < ratio {
                        k += 1;
                    }
                    k
                };
                mass[k] += w;
            }
            let mut acc = 0.0;
            let mut best_v = f64::NEG_INFINITY;
            let mut best_k = 0;
            for (k, &rk) in radii.iter().enumerate() {
                acc += mass[k];
                let v = acc / rk.powf(t);
                if v > best_v {
                    best_v = v;
                    best_k = k;
                }
            }
            (best_v, i, best_k)
        })
        .reduce(
            || (f64::NEG_INFINITY, 0, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    FrostmanReport {
        t_exponent: t,
        delta_floor: r_floor,
        value: best.0,
        argmax_center: balls[best.1].center,
        argmax_radius: radii[best.2],
    }
}

/// A gridded nonnegative density on a vertical plane `V_θ^⊥`, stored as
/// per-cell masses over the chart `(μ, s)`; the density of a cell is its
/// mass divided by `cell²`. Cells are indexed by `floor(coord / cell)`, so
/// the grid is unbounded and deposits are never clipped. Cells are kept
/// sorted by index, which fixes iteration order for reports.
#[derive(Debug, Clone)]
pub struct PlaneDensity {
    pub theta: Angle,
    pub cell: f64,
    /// `(packed index, mass)`, sorted by packed index.
    cells: Vec<(u64, f64)>,
}

const PACK_OFFSET: i64 = 1 << 31;

fn pack_key(i: i64, j: i64) -> u64 {
    (((i + PACK_OFFSET) as u64) << 32) | ((j + PACK_OFFSET) as u64)
}

fn unpack_key(k: u64) -> (i64, i64) {
    (
        ((k >> 32) as i64) - PACK_OFFSET,
        ((k & 0xffff_ffff) as i64) - PACK_OFFSET,
    )
}

impl PlaneDensity {
    pub fn mass(&self) -> f64 {
        self.cells.iter().map(|&(_, m)| m).sum()
    }

    /// `Σ density^q · cell²` over the grid (a Riemann sum of `∫ ρ^q`).
    pub fn lq_norm(&self, q: f64) -> f64 {
        assert!(q >= 1.0, "q must be >= 1");
        let area = self.cell * self.cell;
        self.cells
            .iter()
            .map(|&(_, m)| (m / area).powf(q) * area)
            .sum()
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn max_density(&self) -> f64 {
        let area = self.cell * self.cell;
        self.cells.iter().fold(0.0, |a: f64, &(_, m)| a.max(m / area))
    }

    /// Index bounds `(mu_lo, mu_hi, s_lo, s_hi)` of the occupied cells.
    pub fn index_bounds(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.cells.iter();
        let (i0, j0) = unpack_key(it.next()?.0);
        let (mut ilo, mut ihi, mut jlo, mut jhi) = (i0, i0, j0, j0);
        for &(k, _) in &self.cells {
            let (i, j) = unpack_key(k);
            ilo = ilo.min(i);
            ihi = ihi.max(i);
            jlo = jlo.min(j);
            jhi = jhi.max(j);
        }
        Some((ilo, ihi, jlo, jhi))
    }

    /// Iterates `(mu_index, s_index, mass)` in deterministic key order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.cells.iter().map(|&(k, m)| {
            let (i, j) = unpack_key(k);
            (i, j, m)
        })
    }

    /// Writes `mu s density` rows (cell centers), in key order.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "mu,s,density")?;
        let area = self.cell * self.cell;
        for (i, j, m) in self.iter() {
            let mu = (i as f64 + 0.5) * self.cell;
            let s = (j as f64 + 0.5) * self.cell;
            writeln!(w, "{},{},{}", mu, s, m / area)?;
        }
        Ok(())
    }
}

/// Monte Carlo pushforward of a measure onto `V_θ^⊥`.
///
/// Draws `n_mc` uniform samples per ball (ball `i` uses stream `i` of a
/// `ChaCha8` generator seeded with `seed`), projects each sample with the
/// vertical decomposition, and deposits `weight / n_mc` into the chart
/// cell containing it. Deterministic for fixed `seed` regardless of
/// parallel scheduling: deposit events are generated per fixed ball chunk,
/// concatenated in chunk order, and aggregated per cell by a stable sort,
/// so every per-cell sum is taken in (chunk, ball, sample) order.
pub fn pushforward_density(
    measure: &impl BallMeasure,
    theta: Angle,
    cell: f64,
    n_mc: usize,
    seed: u64,
) -> PlaneDensity {
    assert!(cell > 0.0, "cell size must be positive");
    assert!(n_mc >= 1, "need at least one sample per ball");
    let n = measure.len();
    const CHUNK: usize = 128;
    let chunks: Vec<Vec<(u64, f64)>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            // local accumulation per ball keeps the event list short
            let mut local: HashMap<u64, f64> = HashMap::new();
            let mut events: Vec<(u64, f64)> = Vec::new();
            for i in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let deposit = measure.weight(i) / n_mc as f64;
                local.clear();
                for _ in 0..n_mc {
                    let p = measure.sample(i, &mut rng);
                    let (mu, s) = hgroup::project_to_chart(theta, p);
                    let key = pack_key((mu / cell).floor() as i64, (s / cell).floor() as i64);
                    *local.entry(key).or_insert(0.0) += deposit;
                }
                let mut per_ball: Vec<(u64, f64)> = local.drain().collect();
                per_ball.sort_unstable_by_key(|e| e.0);
                events.extend(per_ball);
            }
            events
        })
        .collect();

    let mut all: Vec<(u64, f64)> = Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for c in chunks {
        all.extend(c);
    }
    // stable: same-cell contributions stay in (chunk, ball) order
    all.par_sort_by_key(|e| e.0);
    let mut cells: Vec<(u64, f64)> = Vec::new();
    for (k, m) in all {
        match cells.last_mut() {
            Some(last) if last.0 == k => last.1 += m,
            _ => cells.push((k, m)),
        }
    }
    PlaneDensity { theta, cell, cells }
}

/// Quadrature parameters for plane pushforwards and sector energies.
#[derive(Debug, Clone, Copy)]
pub struct EnergyParams {
    /// Number of trapezoid intervals in θ.
    pub n_theta: usize,
    /// Chart cell size.
    pub cell: f64,
    /// Monte Carlo samples per ball.
    pub n_mc: usize,
    pub seed: u64,
}

impl EnergyParams {
    /// Defaults for a measure at scale δ: 64 θ-intervals, cell δ²/2,
    /// 256 samples per ball.
    pub fn for_scale(delta: f64) -> Self {
        EnergyParams {
            n_theta: 64,
            cell: delta * delta / 2.0,
            n_mc: 256,
            seed: 0x5eed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Halves the cell and doubles the θ-resolution. Sample counts grow
    /// 8-fold so that the per-cell Monte Carlo noise also shrinks (cell
    /// halving alone would keep expected counts per cell constant).
    pub fn refined(&self) -> Self {
        EnergyParams {
            n_theta: self.n_theta * 2,
            cell: self.cell / 2.0,
            n_mc: self.n_mc * 8,
            seed: self.seed,
        }
    }
}

/// Trapezoid quadrature in θ of `‖P_{V_θ^⊥#} ν‖_{L^q}^q` over
/// `[theta_lo, theta_hi]`.
///
/// Small measures parallelize over θ nodes; large measures evaluate the
/// nodes sequentially and parallelize inside each pushforward, keeping one
/// density grid in memory at a time. Results are identical either way.
pub fn sector_energy(
    measure: &impl BallMeasure,
    q: f64,
    theta_lo: f64,
    theta_hi: f64,
    params: &EnergyParams,
) -> f64 {
    assert!(q >= 1.0, "q must be >= 1");
    assert!(theta_lo < theta_hi, "empty sector");
    let n = params.n_theta.max(1);
    let h = (theta_hi - theta_lo) / n as f64;
    let node = |i: usize| {
        let theta = Angle::new(theta_lo + i as f64 * h);
        pushforward_density(measure, theta, params.cell, params.n_mc, params.seed).lq_norm(q)
    };
    let values: Vec<f64> = if measure.len() >= 4096 {
        (0..=n).map(node).collect()
    } else {
        (0..=n).into_par_iter().map(node).collect()
    };
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * v;
    }
    acc * h
}
