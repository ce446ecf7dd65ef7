//! Constructions of test measures.
//!
//! Three generator families cover the regimes the energy experiments need:
//!
//! - [`heisenberg_cantor`]: self-similar families from an iterated function
//!   system `p ↦ q_i * D_r(p)` with similarity dimension `ln N / ln(1/r)`,
//!   the `t > 3` inputs;
//! - [`uniform_solid`]: a packing of the Korányi unit ball by disjoint
//!   δ-balls, the `t = 4` sanity case;
//! - [`vertical_plane_sample`]: balls centered on the vertical plane
//!   `V_0^⊥`, a 3-dimensional negative control whose Frostman constants at
//!   `t > 3` blow up as δ shrinks.
//!
//! All constructions are deterministic lattices. Translate sets for the
//! IFS sit on a hexagonal-columnar lattice whose margins guarantee that
//! leaf balls stay Euclidean-disjoint at every depth; random augmentation
//! was rejected because points without exact column alignment cannot keep
//! those margins (see the separation notes on [`IfsSpec::packed`]).

use crate::error::{Error, Result};
use crate::hgroup::{self, HPoint};
use crate::measures::WeightedBallFamily;

/// Hexagonal-columnar lattice in the Korányi ball of radius `max_norm`:
/// columns on a hex grid with horizontal pitch `s`, points stacked
/// vertically with pitch `h`, every center satisfying `‖c‖_ℍ ≤ max_norm`.
fn hex_columnar(s: f64, h: f64, max_norm: f64) -> Vec<HPoint> {
    let mut pts = Vec::new();
    let row_step = s * 3.0_f64.sqrt() / 2.0;
    let j_max = (max_norm / row_step).ceil() as i64 + 1;
    let r4 = max_norm.powi(4);
    for j in -j_max..=j_max {
        let y = j as f64 * row_step;
        let x_off = if j % 2 == 0 { 0.0 } else { s / 2.0 };
        let i_max = (max_norm / s).ceil() as i64 + 1;
        for i in -i_max..=i_max {
            let x = i as f64 * s + x_off;
            let z4 = (x * x + y * y).powi(2);
            if z4 > r4 {
                continue;
            }
            // |t| <= sqrt(max_norm^4 - |z|^4) / 4 keeps ‖(z,t)‖ <= max_norm
            let t_max = (r4 - z4).sqrt() / 4.0;
            let k_max = (t_max / h).floor() as i64;
            for k in -k_max..=k_max {
                pts.push(HPoint::new(x, y, k as f64 * h));
            }
        }
    }
    pts
}

/// Equal-weight packing of `B_ℍ(0,1)` by disjoint Korányi δ-balls
/// (realized as Euclidean δ²-balls).
///
/// Centers sit on a hexagonal-columnar lattice with horizontal pitch
/// `2.01δ` (Korányi separation) and vertical pitch `2.01δ²` (Euclidean
/// separation; the vertical Korányi distance is then `2√2.01·δ`). The
/// ball count scales like `δ^{-4}` up to the packing density.
pub fn uniform_solid(delta: f64) -> Result<WeightedBallFamily> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::BadParameter(format!(
            "uniform_solid needs delta in (0, 0.5), got {delta}"
        )));
    }
    let centers = hex_columnar(2.01 * delta, 2.01 * delta * delta, 1.0);
    let n = centers.len();
    WeightedBallFamily::make_family(centers, vec![1.0; n], delta)
}

/// Number of lattice sites [`vertical_plane_sample`] can fill at scale δ.
pub fn vertical_plane_capacity(delta: f64) -> usize {
    plane_lattice(delta).len()
}

fn plane_lattice(delta: f64) -> Vec<HPoint> {
    let g = 2.01 * delta * delta;
    let mut pts = Vec::new();
    let j_max = (1.0 / g).ceil() as i64;
    for i in -j_max..=j_max {
        let y = i as f64 * g;
        if y.abs() > 1.0 {
            continue;
        }
        let t_max = (1.0 - y.powi(4)).sqrt() / 4.0;
        let k_max = (t_max / g).floor() as i64;
        for k in -k_max..=k_max {
            pts.push(HPoint::new(0.0, y, k as f64 * g));
        }
    }
    // compact disk fill order so any prefix is a sensible support
    pts.sort_by(|a, b| {
        let ra = a.y * a.y + a.t * a.t;
        let rb = b.y * b.y + b.t * b.t;
        ra.partial_cmp(&rb)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
            .then(a.t.partial_cmp(&b.t).unwrap())
    });
    pts
}

/// `n` equal-weight balls centered on the vertical plane `V_0^⊥ ∩ B_ℍ(0,1)`
/// (all centers have x = 0), on a grid of pitch `2.01δ²`.
///
/// The support is effectively 3-dimensional in the Korányi metric, so
/// Frostman constants at exponents `t > 3` grow like `δ^{3-t}` as the
/// scale decreases — the negative control for the projection inequality.
pub fn vertical_plane_sample(n: usize, delta: f64) -> Result<WeightedBallFamily> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::BadParameter(format!(
            "vertical_plane_sample needs delta in (0, 0.5), got {delta}"
        )));
    }
    let lattice = plane_lattice(delta);
    if n == 0 || n > lattice.len() {
        return Err(Error::BadParameter(format!(
            "vertical_plane_sample: n must be in 1..={} at delta {delta}, got {n}",
            lattice.len()
        )));
    }
    let centers: Vec<HPoint> = lattice.into_iter().take(n).collect();
    WeightedBallFamily::make_family(centers, vec![1.0; n], delta)
}

/// An iterated function system `p ↦ q_i * D_r(p)` with validated
/// separation, generating self-similar ball families.
#[derive(Debug, Clone)]
pub struct IfsSpec {
    contraction: f64,
    translates: Vec<HPoint>,
    depth: usize,
}

/// Horizontal pitch of the packed translate lattice, in units of the
/// contraction. Must exceed 2 so that subtree hulls keep a positive
/// Korányi gap; the excess over 2 is what survives suffix cancellation in
/// the leaf separation argument.
const IFS_BETA: f64 = 2.02;

/// Vertical pitch of the packed translate lattice, in units of the squared
/// contraction. Same-column leaf pairs at the deepest level inherit
/// exactly this Euclidean `t`-gap scaled by `r^{2(depth-1)}`, which must
/// beat twice the squared family scale; with the family scale `r^depth/√2`
/// any value above 1 works.
const IFS_GAMMA: f64 = 1.01;

impl IfsSpec {
    /// Validates and builds a spec: contraction in (0,1), images
    /// `q_i * D_r(B_ℍ(0,1))` pairwise disjoint (translates `2r`-separated
    /// in the Korányi metric) and contained in the unit ball
    /// (`‖q_i‖ ≤ 1 - r`), similarity dimension at most 4.
    pub fn new(contraction: f64, translates: Vec<HPoint>, depth: usize) -> Result<Self> {
        if !(contraction > 0.0 && contraction < 1.0) {
            return Err(Error::BadParameter(format!(
                "contraction must be in (0,1), got {contraction}"
            )));
        }
        if depth == 0 {
            return Err(Error::BadParameter("depth must be at least 1".into()));
        }
        if translates.is_empty() {
            return Err(Error::BadParameter("need at least one translate".into()));
        }
        let min_sep = 2.0 * contraction;
        for i in 0..translates.len() {
            let ni = hgroup::koranyi_norm(translates[i]);
            if ni > 1.0 - contraction + 1e-12 {
                return Err(Error::BadParameter(format!(
                    "translate {i} has Koranyi norm {ni:.6}, exceeding 1 - r = {:.6}",
                    1.0 - contraction
                )));
            }
            for j in (i + 1)..translates.len() {
                let d = hgroup::koranyi_dist(translates[i], translates[j]);
                if d <= min_sep {
                    return Err(Error::IfsSeparation {
                        i,
                        j,
                        dist: d,
                        min: min_sep,
                    });
                }
            }
        }
        let spec = IfsSpec {
            contraction,
            translates,
            depth,
        };
        let dim = spec.similarity_dimension();
        if dim > 4.0 {
            return Err(Error::BadParameter(format!(
                "similarity dimension {dim:.3} exceeds the ambient dimension 4"
            )));
        }
        Ok(spec)
    }

    /// Densest validated translate set at the given contraction: a
    /// hexagonal-columnar lattice with pitches `2.02r` (horizontal) and
    /// `1.01r²` (vertical) inside `B_ℍ(0, 1-r)`. For `r = 1/8` this gives
    /// several hundred translates and similarity dimension above 3.
    pub fn packed(contraction: f64, depth: usize) -> Result<Self> {
        if !(contraction > 0.0 && contraction < 0.5) {
            return Err(Error::BadParameter(format!(
                "packed IFS needs contraction in (0, 0.5), got {contraction}"
            )));
        }
        let translates = hex_columnar(
            IFS_BETA * contraction,
            IFS_GAMMA * contraction * contraction,
            1.0 - contraction,
        );
        IfsSpec::new(contraction, translates, depth)
    }

    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    pub fn translates(&self) -> &[HPoint] {
        &self.translates
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> usize {
        self.translates.len()
    }

    /// `ln N / ln(1/r)`.
    pub fn similarity_dimension(&self) -> f64 {
        (self.translates.len() as f64).ln() / (1.0 / self.contraction).ln()
    }

    /// The same spec at a different depth.
    pub fn at_depth(&self, depth: usize) -> Result<Self> {
        IfsSpec::new(self.contraction, self.translates.clone(), depth)
    }

    /// Family scale of the depth-`k` construction: leaves live in Korányi
    /// balls of radius `r^k`, realized as Euclidean balls of radius
    /// `(r^k)²/2`, i.e. scale `δ = r^k/√2`.
    pub fn scale(&self) -> f64 {
        self.contraction.powi(self.depth as i32) / 2.0_f64.sqrt()
    }
}

/// Equal-weight self-similar family: centers are all depth-fold
/// compositions `q_{i1} * D_r(q_{i2} * D_r(...))` of the IFS applied to
/// the origin, at scale `δ = r^depth / √2`.
///
/// Euclidean disjointness of the leaf balls is re-verified by the family
/// constructor, so invalid translate geometries are rejected rather than
/// silently producing an overlapping measure.
pub fn heisenberg_cantor(spec: &IfsSpec) -> Result<WeightedBallFamily> {
    let r = spec.contraction;
    let mut centers = vec![HPoint::ORIGIN];
    for _ in 0..spec.depth {
        let mut next = Vec::with_capacity(centers.len() * spec.translates.len());
        for &q in &spec.translates {
            for &c in &centers {
                next.push(hgroup::group_mul(q, hgroup::dilate(r, c)));
            }
        }
        centers = next;
    }
    let n = centers.len();
    WeightedBallFamily::make_family(centers, vec![1.0; n], spec.scale())
}
