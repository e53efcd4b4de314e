//! Graph weights: Monte Carlo integration of wedge products of pulled-back propagator
//! forms over gauge-fixed charts of the configuration spaces, and closed forms.
//!
//! Plane configurations are fixed by `z_1 = 0`, `z_2 = e^{i theta}`; upper half plane
//! configurations by putting the gauge vertex at `i`. The remaining coordinates come from
//! the unit cube through unbounding maps with analytic Jacobians. Each shard draws from
//! its own ChaCha stream `(seed, shard)` and the shard results are reduced in order, so
//! estimates are reproducible bit for bit for a fixed shard count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{set_partitions, subsets, Admissibility, DecoratedGraph};
use crate::numbers::{bernoulli, factorial, zeta};
use crate::theory::{WeightKind, WeightTable, WeightValue};
use crate::propagators::{
    circle_covector, point_covector, CircleForm, ConfigurationPoint, MapMode, Propagator, Side, Space,
};

/// Orientation of the plane chart `d theta ^ dx_3 ^ dy_3 ^ ...` relative to the one
/// for which the three Shoikhet graphs have weight `+1/12`.
const PLANE_ORIENTATION: f64 = 1.0;
/// Orientation of the half-plane chart `dx ^ dy` per free point, in vertex order.
const HALF_PLANE_ORIENTATION: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo,
    Analytic,
}

/// A weight with its error bar and the data needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub value: Complex64,
    /// Standard error of the complex value, `sqrt(se_re^2 + se_im^2)`.
    pub std_error: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub samples: u64,
    pub shards: usize,
    pub seed: u64,
    pub method: Method,
    pub rejected: u64,
}

impl WeightEstimate {
    pub fn analytic(value: Complex64) -> Self {
        WeightEstimate {
            value,
            std_error: 0.0,
            std_error_re: 0.0,
            std_error_im: 0.0,
            samples: 0,
            shards: 0,
            seed: 0,
            method: Method::Analytic,
            rejected: 0,
        }
    }

    pub fn analytic_real(value: f64) -> Self {
        Self::analytic(Complex64::new(value, 0.0))
    }

    pub fn negated(&self) -> Self {
        WeightEstimate { value: -self.value, ..self.clone() }
    }

    /// `|value - target| <= k * std_error` (with an absolute floor for exact zeros).
    pub fn within_sigmas(&self, target: Complex64, k: f64) -> bool {
        (self.value - target).norm() <= k * self.std_error + 1e-12
    }
}

/// Unbounding maps from the unit square to a plane or half plane point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `r = tan(pi u / 2)` with a uniform angle.
    Polar,
    /// `x = tan(pi (u - 1/2))`, and `y` either alike (plane) or `tan(pi v / 2)` (half plane).
    Tan,
    /// Equal-weight mixture of polar maps centered at the points already placed, so
    /// that the integrand stays bounded where two points collide.
    Mixture,
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "polar" => Ok(Transform::Polar),
            "tan" => Ok(Transform::Tan),
            "mixture" => Ok(Transform::Mixture),
            other => Err(Error::Parse { what: "transform", detail: format!("unknown transform `{}`", other) }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    /// Independent random streams; also the batches of the error estimate.
    pub shards: usize,
    pub transform: Transform,
    /// Vertex placed at `i` on the half plane (1-based).
    pub gauge: usize,
    /// Allow complex half-propagators, whose integrals are not known to converge.
    pub experimental_singular: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            samples: 1_000_000,
            seed: 0,
            shards: 32,
            transform: Transform::Mixture,
            gauge: 1,
            experimental_singular: false,
        }
    }
}

impl McOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        McOptions { samples, seed, ..Default::default() }
    }
}

struct ShardResult {
    sum: Complex64,
    count: u64,
    rejected: u64,
}

/// Sharded Monte Carlo mean of `f` over `(0,1)^dim`; `f` returns `None` to reject a
/// point, which is then redrawn.
pub fn monte_carlo<F>(dim: usize, opts: &McOptions, f: F) -> Result<WeightEstimate>
where
    F: Fn(&[f64]) -> Option<Complex64> + Sync,
{
    if opts.shards < 2 {
        return Err(Error::Precondition("at least two shards are needed for an error bar".into()));
    }
    if opts.samples < opts.shards as u64 {
        return Err(Error::Precondition(format!(
            "{} samples cannot fill {} shards",
            opts.samples, opts.shards
        )));
    }
    let per = opts.samples / opts.shards as u64;
    let extra = opts.samples % opts.shards as u64;
    let results: Vec<Result<ShardResult>> = (0..opts.shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(shard as u64);
            let target = per + u64::from((shard as u64) < extra);
            let mut u = vec![0.0; dim];
            let mut sum = Complex64::new(0.0, 0.0);
            let mut count = 0;
            let mut rejected = 0;
            while count < target {
                for x in u.iter_mut() {
                    *x = rng.gen::<f64>();
                }
                match f(&u).filter(|v| v.re.is_finite() && v.im.is_finite()) {
                    Some(v) => {
                        sum += v;
                        count += 1;
                    }
                    None => {
                        rejected += 1;
                        if rejected > 1000 + 10 * target {
                            return Err(Error::Precondition("integrand rejects almost every sample".into()));
                        }
                    }
                }
            }
            Ok(ShardResult { sum, count, rejected })
        })
        .collect();
    let results: Vec<ShardResult> = results.into_iter().collect::<Result<_>>()?;
    let total: u64 = results.iter().map(|r| r.count).sum();
    let nt = total as f64;
    let mean = results.iter().fold(Complex64::new(0.0, 0.0), |acc, r| acc + r.sum) / nt;
    let s = results.len() as f64;
    let (mut var_re, mut var_im) = (0.0, 0.0);
    for r in &results {
        let w = r.count as f64 / nt;
        let dev = r.sum / r.count as f64 - mean;
        var_re += w * w * dev.re * dev.re;
        var_im += w * w * dev.im * dev.im;
    }
    var_re *= s / (s - 1.0);
    var_im *= s / (s - 1.0);
    Ok(WeightEstimate {
        value: mean,
        std_error: (var_re + var_im).sqrt(),
        std_error_re: var_re.sqrt(),
        std_error_im: var_im.sqrt(),
        samples: total,
        shards: opts.shards,
        seed: opts.seed,
        method: Method::MonteCarlo,
        rejected: results.iter().map(|r| r.rejected).sum(),
    })
}

/// Density of `z = c + r e^{i phi}` with `r = tan(pi u / 2)` and `phi` uniform on the
/// whole circle, with respect to `dx ^ dy`.
fn radial_density(z: Complex64, c: Complex64) -> f64 {
    let r = (z - c).norm();
    1.0 / (r * (PI / 2.0) * (1.0 + r * r) * 2.0 * PI)
}

/// A point from two unit coordinates, with `1 / density` (the Jacobian of `dx ^ dy`).
/// `previous` are the points placed so far; the mixture transform centers one of its
/// radial components on each of them.
fn sample_point(t: Transform, u: f64, v: f64, previous: &[Complex64], half_plane: bool) -> Option<(Complex64, f64)> {
    if u <= 0.0 || v <= 0.0 {
        return None;
    }
    let arc = if half_plane { PI } else { 2.0 * PI };
    match t {
        Transform::Polar => {
            let r = (PI * u / 2.0).tan();
            Some((Complex64::from_polar(r, arc * v), r * (PI / 2.0) * (1.0 + r * r) * arc))
        }
        Transform::Tan => {
            let x = (PI * (u - 0.5)).tan();
            if half_plane {
                let y = (PI * v / 2.0).tan();
                Some((Complex64::new(x, y), PI * (1.0 + x * x) * (PI / 2.0) * (1.0 + y * y)))
            } else {
                let y = (PI * (v - 0.5)).tan();
                Some((Complex64::new(x, y), PI * (1.0 + x * x) * PI * (1.0 + y * y)))
            }
        }
        Transform::Mixture => {
            // the first coordinate picks the component and is then reused
            let m = previous.len();
            let scaled = u * m as f64;
            let pick = (scaled as usize).min(m - 1);
            let u = scaled - pick as f64;
            if u <= 0.0 {
                return None;
            }
            let r = (PI * u / 2.0).tan();
            let z = previous[pick] + Complex64::from_polar(r, 2.0 * PI * v);
            let density: f64 = previous.iter().map(|&c| radial_density(z, c)).sum::<f64>() / m as f64;
            Some((z, 1.0 / density))
        }
    }
}

fn real_det(rows: Vec<f64>, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    DMatrix::from_row_slice(k, k, &rows).determinant()
}

fn complex_det(rows: Vec<Complex64>, k: usize) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    DMatrix::from_row_slice(k, k, &rows).determinant()
}

/// Parse names like `kontsevich-outer`, `symmetrized_inner` or `volume_s1` into the form
/// on the circle they restrict to.
pub fn parse_circle_form(name: &str) -> Result<CircleForm> {
    let s = name.trim().replace('-', "_");
    for (suffix, side) in [("_outer", Side::Outer), ("_inner", Side::Inner)] {
        if let Some(base) = s.strip_suffix(suffix) {
            return base.parse::<Propagator>()?.boundary_restriction(side);
        }
    }
    match s.parse::<Propagator>()? {
        Propagator::VolumeS1 | Propagator::Symmetrized => Ok(CircleForm::Uniform),
        p => Err(Error::Parse {
            what: "circle form",
            detail: format!("`{}` needs an `-inner` or `-outer` suffix", p.name()),
        }),
    }
}

/// `c_G`: the integral over `C_n` of the wedge of `pi_e^*(form) / 2 pi` over the edges.
pub fn mc_weight_cn(g: &DecoratedGraph, form: &CircleForm, opts: &McOptions) -> Result<WeightEstimate> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("plane configurations need at least two points".into()));
    }
    let k = 2 * n - 3;
    if g.edge_count() != k {
        return Err(Error::DegreeMismatch { form: g.edge_count(), chart: k });
    }
    if !g.is_directed() {
        return Err(Error::InvalidGraph("weights are defined for directed graphs".into()));
    }
    let norm = PLANE_ORIENTATION * f64::from(g.parity()) / (2.0 * PI).powi(k as i32);
    let edges = g.edges().to_vec();
    monte_carlo(k, opts, |u| {
        let theta = 2.0 * PI * u[0];
        let (sin, cos) = theta.sin_cos();
        let mut pts = vec![Complex64::new(0.0, 0.0), Complex64::new(cos, sin)];
        let mut jac = 2.0 * PI;
        for m in 0..n - 2 {
            let (z, j) = sample_point(opts.transform, u[1 + 2 * m], u[2 + 2 * m], &pts, false)?;
            pts.push(z);
            jac *= j;
        }
        let p = ConfigurationPoint { points: pts, space: Space::Plane };
        let mut rows = Vec::with_capacity(k * k);
        for &(i, j) in &edges {
            let row = circle_covector(form, &p, i, j).ok()??;
            rows.push(row[2] * -sin + row[3] * cos);
            rows.extend_from_slice(&row[4..]);
        }
        Some(Complex64::new(real_det(rows, k) * jac * norm, 0.0))
    })
}

/// `C_G`: the integral over `C_{n,0}` of the wedge of `p_e^*(omega) / 2 pi`.
pub fn mc_weight_cn0(
    g: &DecoratedGraph,
    omega: &Propagator,
    map: MapMode,
    opts: &McOptions,
) -> Result<WeightEstimate> {
    let n = g.n();
    let k = 2 * n - 2;
    if g.edge_count() != k {
        return Err(Error::DegreeMismatch { form: g.edge_count(), chart: k });
    }
    if !g.is_directed() {
        return Err(Error::InvalidGraph("weights are defined for directed graphs".into()));
    }
    if omega.is_singular() && !opts.experimental_singular {
        return Err(Error::Singular(omega.name()));
    }
    if map == MapMode::Plane {
        return Err(Error::Precondition("the plane map does not apply to half-plane configurations".into()));
    }
    if opts.gauge == 0 || opts.gauge > n {
        return Err(Error::Precondition(format!("gauge vertex {} outside 1..={}", opts.gauge, n)));
    }
    if n == 1 {
        return Ok(WeightEstimate::analytic_real(f64::from(g.parity())));
    }
    let gauge = opts.gauge - 1;
    let norm = HALF_PLANE_ORIENTATION * f64::from(g.parity()) / (2.0 * PI).powi(k as i32);
    let edges = g.edges().to_vec();
    let columns: Vec<usize> = (0..n).filter(|&v| v != gauge).flat_map(|v| [2 * v, 2 * v + 1]).collect();
    let complex = !omega.is_real();
    monte_carlo(k, opts, |u| {
        let mut pts = Vec::with_capacity(n);
        let mut placed = vec![Complex64::new(0.0, 1.0)];
        let mut jac = 1.0;
        let mut m = 0;
        for v in 0..n {
            if v == gauge {
                pts.push(Complex64::new(0.0, 1.0));
            } else {
                let (z, j) = sample_point(opts.transform, u[2 * m], u[2 * m + 1], &placed, true)?;
                if z.im <= 0.0 {
                    // outside the half plane: the integrand is zero there
                    return Some(Complex64::new(0.0, 0.0));
                }
                placed.push(z);
                pts.push(z);
                jac *= j;
                m += 1;
            }
        }
        let p = ConfigurationPoint { points: pts, space: Space::HalfPlane };
        let mut rows = Vec::with_capacity(k * k);
        for &(i, j) in &edges {
            let row = point_covector(omega, map, &p, i, j).ok()??;
            rows.extend(columns.iter().map(|&c| row[c]));
        }
        let det = if complex {
            complex_det(rows, k)
        } else {
            Complex64::new(real_det(rows.into_iter().map(|z| z.re).collect(), k), 0.0)
        };
        Some(det * (jac * norm))
    })
}

/// The six four-vertex graphs with closed-form weights for the outer Kontsevich form.
/// The first three (each a transitive tournament on `4 > 3 > 2 > 1` minus one edge,
/// with the stated edge order) have weight `1/12`; the last three vanish.
pub fn appendix4_graphs() -> Vec<(DecoratedGraph, BigRational)> {
    let twelfth = BigRational::new(1.into(), 12.into());
    let zero = BigRational::zero();
    [
        ("4;5;3>1,3>2,4>1,4>2,2>1", &twelfth),
        ("4;5;4>2,4>3,3>1,2>1,3>2", &twelfth),
        ("4;5;4>1,3>1,4>2,3>2,4>3", &twelfth),
        ("4;5;4>2,4>3,4>1,2>1,3>1", &zero),
        ("4;5;4>2,4>3,4>1,2>1,3>2", &zero),
        ("4;5;3>1,4>3,4>1,2>1,3>2", &zero),
    ]
    .into_iter()
    .map(|(s, v)| (s.parse().expect("valid graph literal"), v.clone()))
    .collect()
}

/// `(1/pi^5) int_pi^{2 pi} (3 pi^2 / 2 - pi x)^2 dx` in closed form: substituting
/// `x = pi t` gives `int_1^2 (3/2 - t)^2 dt = 1/12`.
pub fn appendix4_integral() -> BigRational {
    // antiderivative of (3/2 - t)^2 is -(3/2 - t)^3 / 3
    let f = |t: BigRational| -> BigRational {
        let a = BigRational::new(3.into(), 2.into()) - t;
        -(a.clone() * a.clone() * a) / BigRational::from_integer(3.into())
    };
    f(BigRational::from_integer(2.into())) - f(BigRational::from_integer(1.into()))
}

/// Exact weight of a graph isomorphic (up to relabeling and edge order) to one of the
/// six graphs of [`appendix4_graphs`].
pub fn analytic_weight_appendix4(g: &DecoratedGraph) -> Result<BigRational> {
    let c = g.canonical();
    for (reference, value) in appendix4_graphs() {
        let r = reference.canonical();
        if r.graph == c.graph {
            if value.is_zero() {
                return Ok(value);
            }
            let scale = if value == BigRational::new(1.into(), 12.into()) { appendix4_integral() } else { value };
            return Ok(scale * BigRational::from_integer(BigInt::from(c.sign * r.sign)));
        }
    }
    Err(Error::UnknownShape(format!("{} is not one of the tabulated four-vertex graphs", g)))
}

/// A value that is either exact or a floating-point complex number.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Exact(BigRational),
    Approx(Complex64),
}

impl ClosedForm {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            ClosedForm::Exact(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            ClosedForm::Approx(z) => *z,
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Exact(q) => write!(f, "{}", q),
            ClosedForm::Approx(z) => write!(f, "{:.16e}{:+.16e}i", z.re, z.im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WheelVariant {
    /// `(-1)^{n(n-1)/2} zeta(n) / (2 pi i)^n`.
    HalfK,
    /// `-(-1)^{n(n-1)/2} B_n / (2 n!)`, valid for even `n`.
    BernoulliEven,
}

impl FromStr for WheelVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "half_k" | "zeta" => Ok(WheelVariant::HalfK),
            "bernoulli_even" | "bernoulli" => Ok(WheelVariant::BernoulliEven),
            other => Err(Error::Parse { what: "wheel variant", detail: format!("unknown variant `{}`", other) }),
        }
    }
}

fn wheel_sign(n: usize) -> i64 {
    if (n * (n - 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Weight of the wheel with `n` spokes under the half-propagator.
pub fn wheel_weight_closed_form(n: usize, variant: WheelVariant) -> Result<ClosedForm> {
    if n < 2 {
        return Err(Error::Precondition(format!("wheels have at least two spokes, got {}", n)));
    }
    match variant {
        WheelVariant::HalfK => {
            let denom = Complex64::new(0.0, 2.0 * PI).powi(n as i32);
            Ok(ClosedForm::Approx(Complex64::new(wheel_sign(n) as f64 * zeta(n as u32)?, 0.0) / denom))
        }
        WheelVariant::BernoulliEven => {
            if n % 2 == 1 {
                return Err(Error::Precondition(format!("the Bernoulli form needs an even rim size, got {}", n)));
            }
            let q = bernoulli(n) / BigRational::from_integer(BigInt::from(2) * factorial(n));
            Ok(ClosedForm::Exact(-q * BigRational::from_integer(wheel_sign(n).into())))
        }
    }
}

/// Monte Carlo estimate of `int_{[0,1]^n} dx / (1 - x_1 ... x_n) = zeta(n)`.
///
/// The last coordinate is integrated in closed form,
/// `int_0^1 dx_n / (1 - P x_n) = -log(1 - P) / P`, which keeps the variance finite for
/// `n = 2`, where the raw integrand has an infinite second moment.
pub fn zeta_box_integral(n: usize, opts: &McOptions) -> Result<WeightEstimate> {
    if n < 2 {
        return Err(Error::Precondition(format!("the box integral diverges for n = {}", n)));
    }
    monte_carlo(n - 1, opts, |u| {
        let p: f64 = u.iter().product();
        let v = if p == 0.0 { 1.0 } else { -(-p).ln_1p() / p };
        Some(Complex64::new(v, 0.0))
    })
}

/// Residual of the Stokes identity of a graph, computed from weight tables.
///
/// For `2n - 3` edges:
/// `-sum_A sigma_A c^in(G_A) C(G/G_A) + sum_{partitions} sigma c^out(G/partition) prod_B C(G_B)`,
/// over subsets `A` with `#A >= 2` spanning `2#A - 3` edges (including the full vertex set)
/// and partitions into at least two blocks each spanning `2#B - 2` edges.
/// For `2n - 4` edges: `sum_A sigma_A c^out(G_A) c^out(G/G_A)` over `2 <= #A <= n - 1`
/// spanning `2#A - 3` edges.
pub fn stokes_identity_residual<V: WeightValue>(g: &DecoratedGraph, table: &WeightTable<V>) -> Result<V> {
    if !g.is_directed() {
        return Err(Error::InvalidGraph("Stokes identities need a directed graph".into()));
    }
    let n = g.n();
    let l = g.edge_count();
    let mut r = V::nil();
    if l + 3 == 2 * n {
        for a in subsets(n, 2) {
            if !g.is_admissible(&a, Admissibility::Collapse2n3)? {
                continue;
            }
            let cin = table.get(WeightKind::In, &g.complete_subgraph(&a)?)?;
            let cq = table.get(WeightKind::Morphism, &g.quotient(&a)?)?;
            r = r.sub(&cin.mul(&cq)?.signed(g.koszul_sign(&a)?));
        }
        for k in 2..=n {
            for blocks in set_partitions(n, k) {
                if !g.is_admissible_partition(&blocks)? {
                    continue;
                }
                let mut term = table.get(WeightKind::Out, &g.quotient_by_partition(&blocks)?)?;
                for b in &blocks {
                    term = term.mul(&table.get(WeightKind::Morphism, &g.complete_subgraph(b)?)?)?;
                }
                r = r.add(&term.signed(g.koszul_sign_partition(&blocks)?));
            }
        }
    } else if n >= 2 && l + 4 == 2 * n {
        for a in subsets(n, 2) {
            if !g.is_admissible(&a, Admissibility::Collapse2n4)? {
                continue;
            }
            let inner = table.get(WeightKind::Out, &g.complete_subgraph(&a)?)?;
            let outer = table.get(WeightKind::Out, &g.quotient(&a)?)?;
            r = r.add(&inner.mul(&outer)?.signed(g.koszul_sign(&a)?));
        }
    } else {
        return Err(Error::Precondition(format!(
            "Stokes identities concern graphs with 2n-3 or 2n-4 edges; got n = {}, {} edges",
            n, l
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_has_weight_one() {
        for e in ["2;1;1>2", "2;1;2>1"] {
            let g: DecoratedGraph = e.parse().unwrap();
            let w = mc_weight_cn(&g, &CircleForm::Uniform, &McOptions::new(1000, 1)).unwrap();
            assert!((w.value.re - 1.0).abs() < 1e-12, "{} -> {}", e, w.value);
        }
    }

    #[test]
    fn appendix4_closed_forms() {
        assert_eq!(appendix4_integral(), BigRational::new(1.into(), 12.into()));
        let g: DecoratedGraph = "4;5;3>1,3>2,4>1,4>2,2>1".parse().unwrap();
        assert_eq!(analytic_weight_appendix4(&g).unwrap(), BigRational::new(1.into(), 12.into()));
        assert_eq!(analytic_weight_appendix4(&g.opposite()).unwrap(), BigRational::new((-1).into(), 12.into()));
        let five: DecoratedGraph = "5;7;1>2,2>3,3>4,4>5,5>1,1>3,2>4".parse().unwrap();
        assert!(analytic_weight_appendix4(&five).is_err());
    }

    #[test]
    fn wheel_routes_agree_on_two() {
        let a = wheel_weight_closed_form(2, WheelVariant::HalfK).unwrap().to_complex();
        let b = wheel_weight_closed_form(2, WheelVariant::BernoulliEven).unwrap();
        assert_eq!(b, ClosedForm::Exact(BigRational::new(1.into(), 24.into())));
        assert!((a - b.to_complex()).norm() < 1e-15);
        let c = wheel_weight_closed_form(3, WheelVariant::HalfK).unwrap().to_complex();
        assert!(c.re.abs() < 1e-18 && (c.im.abs() - 4.846_022_45e-3).abs() < 1e-10);
    }

    #[test]
    fn mc_is_deterministic() {
        let o = McOptions { samples: 20_000, seed: 9, shards: 8, ..Default::default() };
        let a = zeta_box_integral(3, &o).unwrap();
        let b = zeta_box_integral(3, &o).unwrap();
        assert_eq!(a, b);
        assert!(a.within_sigmas(Complex64::new(zeta(3).unwrap(), 0.0), 5.0));
    }
}
