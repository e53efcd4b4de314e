//! Angle functions on pairs of points in the upper half plane, their boundary
//! restrictions, and pulled-back 1-forms on configuration spaces.
//!
//! Every propagator is a closed 1-form `d(angle)` of two points `(w1, w2)`. Gradients are
//! taken with respect to `(Re w1, Im w1, Re w2, Im w2)` and are complex so that the
//! half-propagators (whose log parts are imaginary) share the same code path.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Propagator {
    /// `Arg(w1 - w2) + Arg(w1 - conj w2)`.
    Kontsevich,
    /// The Kontsevich angle with the two points exchanged.
    AntiKontsevich,
    /// `Arg(w1 - w2)`.
    Symmetrized,
    /// `t K + (1 - t) anti-K`.
    Family(f64),
    /// `(1/i) dlog((w1 - w2) / (conj w1 - w2))`.
    HalfK,
    /// `(1/i) dlog((w1 - w2) / (w1 - conj w2))`.
    HalfKAnti,
    /// The homogeneous form on the circle, `d Arg(w1 - w2)` on pairs.
    VolumeS1,
}

impl Propagator {
    pub fn name(&self) -> String {
        match self {
            Propagator::Kontsevich => "kontsevich".into(),
            Propagator::AntiKontsevich => "anti_kontsevich".into(),
            Propagator::Symmetrized => "symmetrized".into(),
            Propagator::Family(t) => format!("family_t({})", t),
            Propagator::HalfK => "half_k".into(),
            Propagator::HalfKAnti => "half_k_anti".into(),
            Propagator::VolumeS1 => "volume_s1".into(),
        }
    }

    /// Half-propagators have complex values and do not extend to collision strata.
    pub fn is_singular(&self) -> bool {
        matches!(self, Propagator::HalfK | Propagator::HalfKAnti)
    }

    pub fn is_real(&self) -> bool {
        !self.is_singular()
    }

    /// Value of the angle function (imaginary part for the log terms). The real part
    /// is defined up to multiples of `2 pi`.
    pub fn angle(&self, w1: Complex64, w2: Complex64) -> Complex64 {
        let a = |u: Complex64| u.arg();
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            Propagator::Kontsevich => re(a(w1 - w2) + a(w1 - w2.conj())),
            Propagator::AntiKontsevich => re(a(w2 - w1) + a(w2 - w1.conj())),
            Propagator::Symmetrized | Propagator::VolumeS1 => re(a(w1 - w2)),
            Propagator::Family(t) => re(t * (a(w1 - w2) + a(w1 - w2.conj()))
                + (1.0 - t) * (a(w2 - w1) + a(w2 - w1.conj()))),
            Propagator::HalfK => {
                let ratio = (w1 - w2) / (w1.conj() - w2);
                Complex64::new(ratio.arg(), -ratio.norm().ln())
            }
            Propagator::HalfKAnti => {
                let ratio = (w1 - w2) / (w1 - w2.conj());
                Complex64::new(ratio.arg(), -ratio.norm().ln())
            }
        }
    }

    /// Gradient of the angle function in `(x1, y1, x2, y2)`.
    pub fn gradient(&self, w1: Complex64, w2: Complex64) -> [Complex64; 4] {
        let d = w1 - w2;
        let dc = w1 - w2.conj();
        let arg_d = arg_grad_diff(d);
        let arg_dc = arg_grad_conj(dc);
        let c = |v: [f64; 4]| v.map(|x| Complex64::new(x, 0.0));
        match *self {
            Propagator::Kontsevich => c(add(arg_d, arg_dc, 1.0)),
            Propagator::AntiKontsevich | Propagator::Family(_) => {
                // Arg(w2 - w1) has the gradient of Arg(w1 - w2); Arg(w2 - conj w1) = pi - Arg(w1 - conj w2)
                let anti = add(arg_d, arg_dc, -1.0);
                if let Propagator::Family(t) = *self {
                    let k = add(arg_d, arg_dc, 1.0);
                    c([0, 1, 2, 3].map(|i| t * k[i] + (1.0 - t) * anti[i]))
                } else {
                    c(anti)
                }
            }
            Propagator::Symmetrized | Propagator::VolumeS1 => c(arg_d),
            Propagator::HalfK | Propagator::HalfKAnti => {
                let real = if *self == Propagator::HalfK { add(arg_d, arg_dc, 1.0) } else { add(arg_d, arg_dc, -1.0) };
                // imaginary part: -d ln|w1 - w2| + d ln|w1 - conj w2|
                let ld = log_grad_diff(d);
                let ldc = log_grad_conj(dc);
                let imag = [0, 1, 2, 3].map(|i| -ld[i] + ldc[i]);
                [0, 1, 2, 3].map(|i| Complex64::new(real[i], imag[i]))
            }
        }
    }

    /// Restriction to the inner or outer boundary circle.
    pub fn boundary_restriction(&self, side: Side) -> Result<CircleForm> {
        match (self, side) {
            (p, Side::Inner) if p.is_singular() => Err(Error::Singular(p.name())),
            (_, Side::Inner) => Ok(CircleForm::Uniform),
            (Propagator::Kontsevich | Propagator::HalfK, Side::Outer) => Ok(CircleForm::Split { upper: 2.0, lower: 0.0 }),
            (Propagator::AntiKontsevich | Propagator::HalfKAnti, Side::Outer) => {
                Ok(CircleForm::Split { upper: 0.0, lower: 2.0 })
            }
            (Propagator::Family(t), Side::Outer) => Ok(CircleForm::Split { upper: 2.0 * t, lower: 2.0 * (1.0 - t) }),
            (Propagator::Symmetrized | Propagator::VolumeS1, Side::Outer) => Ok(CircleForm::Uniform),
        }
    }
}

fn add(a: [f64; 4], b: [f64; 4], s: f64) -> [f64; 4] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

/// Gradient of `Arg(w1 - w2)`.
pub(crate) fn arg_grad_diff(u: Complex64) -> [f64; 4] {
    let r2 = u.norm_sqr();
    let (a, b) = (u.re / r2, u.im / r2);
    [-b, a, b, -a]
}

/// Gradient of `Arg(w1 - conj w2)`.
fn arg_grad_conj(u: Complex64) -> [f64; 4] {
    let r2 = u.norm_sqr();
    let (a, b) = (u.re / r2, u.im / r2);
    [-b, a, b, a]
}

/// Gradient of `ln|w1 - w2|`.
fn log_grad_diff(u: Complex64) -> [f64; 4] {
    let r2 = u.norm_sqr();
    let (a, b) = (u.re / r2, u.im / r2);
    [a, b, -a, -b]
}

/// Gradient of `ln|w1 - conj w2|`.
fn log_grad_conj(u: Complex64) -> [f64; 4] {
    let r2 = u.norm_sqr();
    let (a, b) = (u.re / r2, u.im / r2);
    [a, b, -a, b]
}

impl fmt::Display for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for Propagator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('-', "_");
        let perr = || Error::Parse { what: "propagator", detail: format!("unknown propagator `{}`", s) };
        Ok(match s.as_str() {
            "kontsevich" => Propagator::Kontsevich,
            "anti_kontsevich" => Propagator::AntiKontsevich,
            "symmetrized" => Propagator::Symmetrized,
            "half_k" => Propagator::HalfK,
            "half_k_anti" => Propagator::HalfKAnti,
            "volume_s1" => Propagator::VolumeS1,
            other => {
                let inner = other
                    .strip_prefix("family_t(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| other.strip_prefix("family_t:"))
                    .ok_or_else(perr)?;
                let t = parse_unit_rational(inner).ok_or_else(perr)?;
                Propagator::Family(t)
            }
        })
    }
}

fn parse_unit_rational(s: &str) -> Option<f64> {
    let t = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.trim().parse::<f64>().ok()?,
    };
    (0.0..=1.0).contains(&t).then_some(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Inner,
    Outer,
}

/// A 1-form `f(theta) d theta` on the circle, `theta = Arg(z_i - z_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CircleForm {
    /// `d theta`.
    Uniform,
    /// `upper d theta` on `(0, pi)` and `lower d theta` on `(pi, 2 pi)`.
    Split { upper: f64, lower: f64 },
}

impl CircleForm {
    pub fn density(&self, theta: f64) -> f64 {
        match *self {
            CircleForm::Uniform => 1.0,
            CircleForm::Split { upper, lower } => {
                if theta.sin() >= 0.0 {
                    upper
                } else {
                    lower
                }
            }
        }
    }

    /// Integral over the circle by the trapezoid rule with `nodes` nodes.
    pub fn circle_integral(&self, nodes: usize) -> f64 {
        let h = 2.0 * PI / nodes as f64;
        (0..nodes).map(|k| self.density((k as f64 + 0.5) * h) * h).sum()
    }
}

/// Where a configuration lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// Points of the plane modulo translations and positive scalings.
    Plane,
    /// Points of the upper half plane modulo real translations and positive scalings.
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationPoint {
    pub points: Vec<Complex64>,
    pub space: Space,
}

impl ConfigurationPoint {
    pub fn new(points: Vec<Complex64>, space: Space) -> Result<Self> {
        for (i, a) in points.iter().enumerate() {
            if space == Space::HalfPlane && a.im <= 0.0 {
                return Err(Error::Precondition(format!("point {} is not in the upper half plane", i + 1)));
            }
            if points[..i].iter().any(|b| b == a) {
                return Err(Error::Precondition(format!("point {} coincides with an earlier point", i + 1)));
            }
        }
        Ok(ConfigurationPoint { points, space })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// `mean(x) + i min(y)` and the index of the lowest point, or `None` on a tie.
    pub fn z_min(&self) -> Option<(Complex64, usize)> {
        let n = self.points.len() as f64;
        let xc = self.points.iter().map(|z| z.re).sum::<f64>() / n;
        let (k, lowest) = self
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.im.total_cmp(&b.1.im))?;
        if self.points.iter().enumerate().any(|(i, z)| i != k && z.im == lowest.im) {
            return None;
        }
        Some((Complex64::new(xc, lowest.im), k))
    }
}

/// How an edge `i -> j` sees the pair of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapMode {
    /// `(z_i, z_j)` itself.
    Plain,
    /// The renormalized pair through `z_min`.
    Renormalized,
    /// The unit vector `(z_i - z_j) / |z_i - z_j|` (configurations of the plane).
    Plane,
}

impl FromStr for MapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plain" => Ok(MapMode::Plain),
            "renormalized" => Ok(MapMode::Renormalized),
            "plane" => Ok(MapMode::Plane),
            other => Err(Error::Parse { what: "map mode", detail: format!("unknown map mode `{}`", other) }),
        }
    }
}

impl fmt::Display for MapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapMode::Plain => "plain",
            MapMode::Renormalized => "renormalized",
            MapMode::Plane => "plane",
        };
        write!(f, "{}", s)
    }
}

/// `(z_i - z_j) / |z_i - z_j|` (1-based indices).
pub fn forgetful_pi(p: &ConfigurationPoint, i: usize, j: usize) -> Result<Complex64> {
    check_pair(p, i, j)?;
    let d = p.points[i - 1] - p.points[j - 1];
    if d.norm() == 0.0 {
        return Err(Error::Precondition("coincident points".into()));
    }
    Ok(d / d.norm())
}

fn check_pair(p: &ConfigurationPoint, i: usize, j: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > p.n() || j > p.n() {
        return Err(Error::Precondition(format!("bad vertex pair ({}, {}) for {} points", i, j, p.n())));
    }
    Ok(())
}

/// The renormalized pair of points seen by the edge `i -> j`; `None` on a seam.
pub fn renormalized_fp(p: &ConfigurationPoint, i: usize, j: usize) -> Result<Option<(Complex64, Complex64)>> {
    check_pair(p, i, j)?;
    let Some((zmin, _)) = p.z_min() else {
        return Ok(None);
    };
    let (zi, zj) = (p.points[i - 1], p.points[j - 1]);
    if zi.im == zj.im {
        return Ok(None);
    }
    Ok(Some(if zi.im > zj.im { (zi - zj + zmin, zmin) } else { (zmin, zj - zi + zmin) }))
}

/// Pullback of `omega` along the edge map, as a covector over all point coordinates
/// `(x_1, y_1, ..., x_n, y_n)`. `Ok(None)` signals a seam (resample).
pub fn point_covector(
    omega: &Propagator,
    map: MapMode,
    p: &ConfigurationPoint,
    i: usize,
    j: usize,
) -> Result<Option<Vec<Complex64>>> {
    check_pair(p, i, j)?;
    let n = p.n();
    let mut row = vec![Complex64::new(0.0, 0.0); 2 * n];
    let (xi, yi, xj, yj) = (2 * (i - 1), 2 * (i - 1) + 1, 2 * (j - 1), 2 * (j - 1) + 1);
    match map {
        MapMode::Plain => {
            let g = omega.gradient(p.points[i - 1], p.points[j - 1]);
            row[xi] += g[0];
            row[yi] += g[1];
            row[xj] += g[2];
            row[yj] += g[3];
        }
        MapMode::Plane => {
            let d = p.points[i - 1] - p.points[j - 1];
            if d.norm_sqr() == 0.0 {
                return Ok(None);
            }
            let g = arg_grad_diff(d);
            for (k, idx) in [xi, yi, xj, yj].into_iter().enumerate() {
                row[idx] += Complex64::new(g[k], 0.0);
            }
        }
        MapMode::Renormalized => {
            let Some((w1, w2)) = renormalized_fp(p, i, j)? else {
                return Ok(None);
            };
            let (_, kmin) = p.z_min().expect("checked by renormalized_fp");
            let ymin = 2 * kmin + 1;
            let g = omega.gradient(w1, w2);
            let shift_x = (g[0] + g[2]) / n as f64;
            for k in 0..n {
                row[2 * k] += shift_x;
            }
            row[ymin] += g[1] + g[3];
            let (gx, gy, s) = if p.points[i - 1].im > p.points[j - 1].im { (g[0], g[1], 1.0) } else { (g[2], g[3], -1.0) };
            row[xi] += gx * s;
            row[yi] += gy * s;
            row[xj] -= gx * s;
            row[yj] -= gy * s;
        }
    }
    Ok(Some(row))
}

/// Pullback of a circle form along `pi_ij` on configurations of the plane.
pub fn circle_covector(form: &CircleForm, p: &ConfigurationPoint, i: usize, j: usize) -> Result<Option<Vec<f64>>> {
    check_pair(p, i, j)?;
    let d = p.points[i - 1] - p.points[j - 1];
    if d.norm_sqr() == 0.0 {
        return Ok(None);
    }
    let f = form.density(d.arg());
    let g = arg_grad_diff(d);
    let mut row = vec![0.0; 2 * p.n()];
    row[2 * (i - 1)] += f * g[0];
    row[2 * (i - 1) + 1] += f * g[1];
    row[2 * (j - 1)] += f * g[2];
    row[2 * (j - 1) + 1] += f * g[3];
    Ok(Some(row))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn forgetful_examples() {
        let p = ConfigurationPoint::new(vec![c(1.0, 1.0), c(0.0, 1.0)], Space::HalfPlane).unwrap();
        assert!((forgetful_pi(&p, 1, 2).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((forgetful_pi(&p, 2, 1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn renormalized_is_identity_for_two_points_up_to_real_shift() {
        let p = ConfigurationPoint::new(vec![c(0.3, 2.0), c(-0.5, 1.0)], Space::HalfPlane).unwrap();
        let (w1, w2) = renormalized_fp(&p, 1, 2).unwrap().unwrap();
        // same pair up to a real shift, which every angle function ignores
        assert!((w1 - w2 - (p.points[0] - p.points[1])).norm() < 1e-12);
        assert_eq!(w2.im, 1.0);
        for prop in [Propagator::Kontsevich, Propagator::AntiKontsevich, Propagator::HalfK] {
            let a = prop.angle(w1, w2);
            let b = prop.angle(p.points[0], p.points[1]);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetrized_gradient_at_unit_difference() {
        let g = Propagator::Symmetrized.gradient(c(1.0, 1.0), c(0.0, 1.0));
        assert!((g[0].re).abs() < 1e-15);
        assert!((g[1].re - 1.0).abs() < 1e-15);
        assert!((g[3].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_circles_are_normalized() {
        for p in [
            Propagator::Kontsevich,
            Propagator::AntiKontsevich,
            Propagator::Symmetrized,
            Propagator::Family(0.3),
            Propagator::VolumeS1,
        ] {
            for side in [Side::Inner, Side::Outer] {
                let f = p.boundary_restriction(side).unwrap();
                assert!((f.circle_integral(100_000) - 2.0 * PI).abs() < 1e-6);
            }
        }
        assert!(Propagator::HalfK.boundary_restriction(Side::Inner).is_err());
    }

    #[test]
    fn names_parse() {
        for p in [Propagator::Kontsevich, Propagator::HalfKAnti, Propagator::Family(0.25)] {
            assert_eq!(p.name().parse::<Propagator>().unwrap(), p);
        }
        assert_eq!("family_t:1/2".parse::<Propagator>().unwrap(), Propagator::Family(0.5));
        assert!("family_t(2)".parse::<Propagator>().is_err());
    }
}
