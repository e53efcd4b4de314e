//! Polynomial polyvector fields on a graded coordinate space.
//!
//! Variables are numbered `0..2d`: index `a` is `x^{a+1}`, index `d + a` is `psi_{a+1}`.
//! A monomial is stored as an exponent vector in this canonical order, so the stored
//! product always reads `x^1 ... x^d psi_1 ... psi_d`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degrees `|x^a|`; the partner degrees `|psi_a| = 1 - |x^a|` are derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grading {
    degrees: Vec<i32>,
}

impl Grading {
    pub fn new(degrees: Vec<i32>) -> Self {
        Grading { degrees }
    }

    /// All coordinates of degree zero (ordinary polyvector fields).
    pub fn even(d: usize) -> Self {
        Grading { degrees: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn x_degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn var_count(&self) -> usize {
        2 * self.degrees.len()
    }

    pub fn var_degree(&self, v: usize) -> i32 {
        let d = self.dim();
        if v < d {
            self.degrees[v]
        } else {
            1 - self.degrees[v - d]
        }
    }

    pub fn var_odd(&self, v: usize) -> bool {
        self.var_degree(v).rem_euclid(2) == 1
    }

    pub fn x(&self, a: usize) -> usize {
        a
    }

    pub fn psi(&self, a: usize) -> usize {
        self.dim() + a
    }
}

pub type Monomial = Vec<u32>;

pub(crate) fn monomial_degree(g: &Grading, m: &[u32]) -> i32 {
    m.iter()
        .enumerate()
        .map(|(v, &e)| e as i32 * g.var_degree(v))
        .sum()
}

pub(crate) fn monomial_odd(g: &Grading, m: &[u32]) -> bool {
    m.iter()
        .enumerate()
        .filter(|&(v, &e)| e % 2 == 1 && g.var_odd(v))
        .count()
        % 2
        == 1
}

/// Product of two canonical monomials. Returns `None` when an odd variable squares.
pub(crate) fn monomial_mul(g: &Grading, a: &[u32], b: &[u32]) -> Option<(Monomial, bool)> {
    let mut out = Vec::with_capacity(a.len());
    let mut negative = false;
    // odd factors of `a` seen so far with index greater than the current one
    let mut odd_a_after = 0usize;
    for v in 0..a.len() {
        if g.var_odd(v) && a[v] > 0 {
            odd_a_after += 1;
        }
    }
    for v in 0..a.len() {
        let e = a[v] + b[v];
        if g.var_odd(v) {
            if e > 1 {
                return None;
            }
            if a[v] == 1 {
                odd_a_after -= 1;
            }
            if b[v] == 1 && odd_a_after % 2 == 1 {
                negative = !negative;
            }
        }
        out.push(e);
    }
    Some((out, negative))
}

/// Left derivative of a monomial by variable `v`: coefficient factor and result.
pub(crate) fn monomial_deriv(g: &Grading, m: &[u32], v: usize) -> Option<(i64, Monomial)> {
    if m[v] == 0 {
        return None;
    }
    let mut out = m.to_vec();
    out[v] -= 1;
    if g.var_odd(v) {
        let before = (0..v).filter(|&u| g.var_odd(u) && m[u] % 2 == 1).count();
        Some((if before % 2 == 1 { -1 } else { 1 }, out))
    } else {
        Some((m[v] as i64, out))
    }
}

/// A polyvector field with exact rational coefficients; zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyField {
    grading: Grading,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyField {
    pub fn zero(grading: &Grading) -> Self {
        PolyField { grading: grading.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(grading: &Grading, c: BigRational) -> Self {
        let mut f = Self::zero(grading);
        f.add_term(vec![0; grading.var_count()], c);
        f
    }

    pub fn one(grading: &Grading) -> Self {
        Self::constant(grading, BigRational::one())
    }

    /// The single variable with index `v` (see the module docs for numbering).
    pub fn var(grading: &Grading, v: usize) -> Self {
        let mut m = vec![0; grading.var_count()];
        m[v] = 1;
        let mut f = Self::zero(grading);
        f.add_term(m, BigRational::one());
        f
    }

    /// `x^{a+1}` (zero-based `a`).
    pub fn x(grading: &Grading, a: usize) -> Self {
        Self::var(grading, grading.x(a))
    }

    /// `psi_{a+1}` (zero-based `a`).
    pub fn psi(grading: &Grading, a: usize) -> Self {
        Self::var(grading, grading.psi(a))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigRational)>>(
        grading: &Grading,
        terms: I,
    ) -> Result<Self> {
        let mut f = Self::zero(grading);
        for (m, c) in terms {
            if m.len() != grading.var_count() {
                return Err(Error::GradingMismatch);
            }
            if m.iter().enumerate().any(|(v, &e)| e > 1 && grading.var_odd(v)) {
                continue;
            }
            f.add_term(m, c);
        }
        Ok(f)
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.grading);
        }
        PolyField {
            grading: self.grading.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    /// Degrees of the terms present, ascending.
    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> =
            self.terms.keys().map(|m| monomial_degree(&self.grading, m)).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// The degree when every term has the same one; `None` for zero or mixed fields.
    pub fn degree(&self) -> Option<i32> {
        let ds = self.degrees();
        if ds.len() == 1 {
            Some(ds[0])
        } else {
            None
        }
    }

    /// Split into homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<i32, PolyField> {
        let mut out: BTreeMap<i32, PolyField> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = monomial_degree(&self.grading, m);
            out.entry(d)
                .or_insert_with(|| Self::zero(&self.grading))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Number of psi factors (counted with multiplicity) in a monomial.
    pub fn psi_count(&self, m: &[u32]) -> u32 {
        m[self.grading.dim()..].iter().sum()
    }

    /// Left derivative with respect to variable `v`.
    pub fn deriv(&self, v: usize) -> Self {
        let mut out = Self::zero(&self.grading);
        for (m, c) in &self.terms {
            if let Some((k, m2)) = monomial_deriv(&self.grading, m, v) {
                out.add_term(m2, c * BigRational::from_integer(k.into()));
            }
        }
        out
    }

    pub fn dx(&self, a: usize) -> Self {
        self.deriv(self.grading.x(a))
    }

    pub fn dpsi(&self, a: usize) -> Self {
        self.deriv(self.grading.psi(a))
    }

    /// True when no term contains a psi variable.
    pub fn is_function(&self) -> bool {
        self.terms.keys().all(|m| self.psi_count(m) == 0)
    }

    /// Largest power of psi variables among the terms.
    pub fn max_psi_count(&self) -> u32 {
        self.terms.keys().map(|m| self.psi_count(m)).max().unwrap_or(0)
    }

    /// Largest total x-degree among the terms.
    pub fn max_x_degree(&self) -> u32 {
        let d = self.grading.dim();
        self.terms.keys().map(|m| m[..d].iter().sum()).max().unwrap_or(0)
    }

    /// Evaluate a field without psi dependence at a point (all-even grading only).
    pub fn eval_function(&self, point: &[BigRational]) -> Result<BigRational> {
        let d = self.grading.dim();
        if point.len() != d {
            return Err(Error::Arity { expected: d, got: point.len() });
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            if self.psi_count(m) > 0 {
                return Err(Error::Precondition("field depends on psi".into()));
            }
            let mut t = c.clone();
            for a in 0..d {
                for _ in 0..m[a] {
                    t *= &point[a];
                }
            }
            total += t;
        }
        Ok(total)
    }

    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.grading, other.grading, "grading mismatch between polyvector fields");
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.grading != other.grading {
            return Err(Error::GradingMismatch);
        }
        Ok(self * other)
    }
}

impl Add for &PolyField {
    type Output = PolyField;
    fn add(self, rhs: &PolyField) -> PolyField {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &PolyField {
    type Output = PolyField;
    fn sub(self, rhs: &PolyField) -> PolyField {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &PolyField {
    type Output = PolyField;
    fn neg(self) -> PolyField {
        PolyField {
            grading: self.grading.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &PolyField {
    type Output = PolyField;
    fn mul(self, rhs: &PolyField) -> PolyField {
        self.check_same(rhs);
        let mut out = PolyField::zero(&self.grading);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, neg)) = monomial_mul(&self.grading, ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for PolyField {
            type Output = PolyField;
            fn $f(self, rhs: PolyField) -> PolyField {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for PolyField {
    type Output = PolyField;
    fn neg(self) -> PolyField {
        -&self
    }
}

/// A formal power series in hbar with polyvector coefficients, truncated at `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSeries {
    coeffs: Vec<PolyField>,
}

impl HSeries {
    pub fn zero(grading: &Grading, order: usize) -> Self {
        HSeries { coeffs: vec![PolyField::zero(grading); order + 1] }
    }

    /// The constant series `f` (no hbar dependence).
    pub fn constant(f: PolyField, order: usize) -> Self {
        let mut s = Self::zero(f.grading(), order);
        s.coeffs[0] = f;
        s
    }

    pub fn from_coeffs(coeffs: Vec<PolyField>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("an hbar series needs at least one coefficient".into()));
        }
        let g = coeffs[0].grading().clone();
        if coeffs.iter().any(|c| *c.grading() != g) {
            return Err(Error::GradingMismatch);
        }
        Ok(HSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn grading(&self) -> &Grading {
        self.coeffs[0].grading()
    }

    pub fn coeff(&self, k: usize) -> &PolyField {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[PolyField] {
        &self.coeffs
    }

    /// Add `f` to the coefficient of `hbar^k`; silently dropped beyond the truncation.
    pub fn add_at(&mut self, k: usize, f: &PolyField) {
        if k < self.coeffs.len() {
            self.coeffs[k] = &self.coeffs[k] + f;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PolyField::is_zero)
    }

    /// Lowest hbar power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        HSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        HSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    /// Cauchy product of series using a bilinear map on coefficients.
    pub fn bilinear(&self, other: &Self, f: impl Fn(&PolyField, &PolyField) -> PolyField) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(self.grading(), order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let t = f(&self.coeffs[i], &other.coeffs[j]);
                out.coeffs[i + j] = &out.coeffs[i + j] + &t;
            }
        }
        out
    }
}
