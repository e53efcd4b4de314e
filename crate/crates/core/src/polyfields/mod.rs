//! Exact polyvector fields, the divergence operator, the Schouten bracket, and the
//! multidifferential operators attached to graphs.

mod field;
mod graph_ops;
pub mod random;
mod text;

pub use field::{Grading, HSeries, Monomial, PolyField};
pub use graph_ops::{composition_identity_check, koszul_reorder_sign, phi, phi_sym};
pub use text::parse_polyfield;

use num_rational::BigRational;

/// `Delta = sum_a (-1)^{|x^a|} d^2 / dx^a dpsi_a`.
pub fn delta(f: &PolyField) -> PolyField {
    let g = f.grading().clone();
    let mut out = PolyField::zero(&g);
    for a in 0..g.dim() {
        let t = f.dpsi(a).dx(a);
        out = if g.x_degrees()[a].rem_euclid(2) == 1 { &out - &t } else { &out + &t };
    }
    out
}

/// `[a . b] = Delta(ab) - Delta(a) b - (-1)^{|a|} a Delta(b)`, extended linearly over
/// the homogeneous components of `a`.
pub fn schouten(a: &PolyField, b: &PolyField) -> PolyField {
    let mut out = PolyField::zero(a.grading());
    let db = delta(b);
    for (deg, part) in a.homogeneous_parts() {
        let t1 = delta(&(&part * b));
        let t2 = &delta(&part) * b;
        let t3 = &part * &db;
        let t = &(&t1 - &t2) - &if deg.rem_euclid(2) == 1 { -t3 } else { t3 };
        out = &out + &t;
    }
    out
}

/// The printed normalization `(-1)^{|a|} [a . b]` of the binary operation.
pub fn signed_schouten(a: &PolyField, b: &PolyField) -> PolyField {
    let mut out = PolyField::zero(a.grading());
    for (deg, part) in a.homogeneous_parts() {
        let t = schouten(&part, b);
        out = if deg.rem_euclid(2) == 1 { &out - &t } else { &out + &t };
    }
    out
}

/// Schouten bracket of hbar series, truncated at the common order.
pub fn schouten_series(a: &HSeries, b: &HSeries) -> HSeries {
    a.bilinear(b, schouten)
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
