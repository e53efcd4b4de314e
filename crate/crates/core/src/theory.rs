//! Homotopy Lie structures, their morphisms and the induced transformations of Poisson
//! structures, assembled from graph weights and graph operators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faceoperad::Operations;
use crate::graphs::{enumerate_classes, enumerate_graphs, wheel, wheel_union, DecoratedGraph, Direction};
use crate::integrator::stokes_identity_residual;
use crate::numbers::{bernoulli, factorial, modified_bernoulli};
use crate::polyfields::{phi, rat, schouten, Grading, HSeries, PolyField};

/// Arithmetic needed to combine weights in the Stokes identities.
pub trait WeightValue: Clone + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Result<Self>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn signed(&self, sign: i8) -> Self {
        match sign {
            0 => Self::nil(),
            s if s < 0 => self.neg(),
            _ => self.clone(),
        }
    }
}

impl WeightValue for BigRational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
}

/// A real estimate with first-order error propagation: the value, and for each
/// independent source the derivative of the value and the variance of the source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Uncertain {
    pub value: f64,
    sources: BTreeMap<String, (f64, f64)>,
}

impl Uncertain {
    pub fn exact(value: f64) -> Self {
        Uncertain { value, sources: BTreeMap::new() }
    }

    /// An independent estimate; estimates sharing an `id` are treated as the same one.
    pub fn estimate(id: impl Into<String>, value: f64, std_error: f64) -> Self {
        let mut sources = BTreeMap::new();
        sources.insert(id.into(), (1.0, std_error * std_error));
        Uncertain { value, sources }
    }

    pub fn std_error(&self) -> f64 {
        self.sources.values().map(|(d, v)| d * d * v).sum::<f64>().sqrt()
    }

    fn merge(a: &Self, fa: f64, b: &Self, fb: f64, value: f64) -> Self {
        let mut sources = BTreeMap::new();
        for (src, f) in [(a, fa), (b, fb)] {
            for (id, (d, v)) in &src.sources {
                let e = sources.entry(id.clone()).or_insert((0.0, *v));
                e.0 += d * f;
            }
        }
        Uncertain { value, sources }
    }
}

impl WeightValue for Uncertain {
    fn nil() -> Self {
        Uncertain::exact(0.0)
    }
    fn unit() -> Self {
        Uncertain::exact(1.0)
    }
    fn add(&self, other: &Self) -> Self {
        Uncertain::merge(self, 1.0, other, 1.0, self.value + other.value)
    }
    fn neg(&self) -> Self {
        Uncertain::merge(self, -1.0, &Uncertain::exact(0.0), 0.0, -self.value)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Uncertain::merge(self, other.value, other, self.value, self.value * other.value))
    }
}

/// An affine function of unknown weights, used to set up linear systems for them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    pub constant: BigRational,
    pub linear: BTreeMap<usize, BigRational>,
}

impl Affine {
    pub fn constant(c: BigRational) -> Self {
        Affine { constant: c, linear: BTreeMap::new() }
    }

    pub fn unknown(id: usize) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(id, BigRational::one());
        Affine { constant: BigRational::zero(), linear }
    }

    fn scaled(&self, c: &BigRational) -> Self {
        let linear = self
            .linear
            .iter()
            .map(|(k, v)| (*k, v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Affine { constant: &self.constant * c, linear }
    }
}

impl WeightValue for Affine {
    fn nil() -> Self {
        Affine::default()
    }
    fn unit() -> Self {
        Affine::constant(BigRational::one())
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (k, v) in &other.linear {
            *out.linear.entry(*k).or_insert_with(BigRational::zero) += v;
        }
        out.linear.retain(|_, v| !v.is_zero());
        out
    }
    fn neg(&self) -> Self {
        self.scaled(&-BigRational::one())
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        if self.linear.is_empty() {
            Ok(other.scaled(&self.constant))
        } else if other.linear.is_empty() {
            Ok(self.scaled(&other.constant))
        } else {
            Err(Error::Precondition("product of two unknown weights is not linear".into()))
        }
    }
}

/// Which integral a weight is: `c^in` and `c^out` on plane configurations, `C` on
/// half-plane configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    In,
    Out,
    Morphism,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeightKind::In => "in",
            WeightKind::Out => "out",
            WeightKind::Morphism => "morphism",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "in" => Ok(WeightKind::In),
            "out" => Ok(WeightKind::Out),
            "morphism" => Ok(WeightKind::Morphism),
            other => Err(Error::Parse { what: "weight kind", detail: format!("unknown kind `{}`", other) }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry<V> {
    pub value: V,
    pub provenance: String,
}

/// Weights keyed by isomorphism class. Lookups of any labeled, reordered or opposite
/// representative return the weight with the orientation sign applied; classes equal to
/// their own negative have weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<V> {
    entries: BTreeMap<(WeightKind, DecoratedGraph), TableEntry<V>>,
    fallback: Option<V>,
}

impl<V: WeightValue> Default for WeightTable<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: WeightValue> WeightTable<V> {
    pub fn new() -> Self {
        WeightTable { entries: BTreeMap::new(), fallback: None }
    }

    /// Value returned for classes without an entry (instead of an error).
    pub fn with_fallback(mut self, v: V) -> Self {
        self.fallback = Some(v);
        self
    }

    pub fn insert(&mut self, kind: WeightKind, g: &DecoratedGraph, value: V, provenance: &str) -> Result<()> {
        if !g.is_directed() {
            return Err(Error::InvalidGraph("weights are attached to directed graphs".into()));
        }
        let c = g.canonical();
        if c.sign == 0 {
            return Ok(());
        }
        self.entries
            .insert((kind, c.graph), TableEntry { value: value.signed(c.sign), provenance: provenance.to_string() });
        Ok(())
    }

    pub fn get(&self, kind: WeightKind, g: &DecoratedGraph) -> Result<V> {
        if kind == WeightKind::Morphism && g.n() == 1 && g.edge_count() == 0 {
            return Ok(V::unit().signed(g.parity()));
        }
        let c = g.canonical();
        if c.sign == 0 {
            return Ok(V::nil());
        }
        match self.entries.get(&(kind, c.graph)) {
            Some(e) => Ok(e.value.signed(c.sign)),
            None => self
                .fallback
                .clone()
                .map(|v| v.signed(c.sign))
                .ok_or_else(|| Error::MissingEntry(format!("{} weight of {}", kind, g))),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (WeightKind, &DecoratedGraph, &TableEntry<V>)> {
        self.entries.iter().map(|((k, g), e)| (*k, g, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The table of the homogeneous form `d Arg`: weight 1 on the two-vertex graph with one
/// edge (both as `c^in` and `c^out`), zero on every other graph.
pub fn omega0_table() -> WeightTable<BigRational> {
    let mut t = WeightTable::new().with_fallback(BigRational::zero());
    let e: DecoratedGraph = "2;1;1>2".parse().expect("valid graph literal");
    for kind in [WeightKind::In, WeightKind::Out] {
        t.insert(kind, &e, BigRational::one(), "analytic").expect("directed graph");
    }
    t
}

fn nonzero_weighted(
    table: &WeightTable<BigRational>,
    kind: WeightKind,
    graphs: impl Iterator<Item = DecoratedGraph>,
) -> Result<Vec<(DecoratedGraph, BigRational)>> {
    let mut out = Vec::new();
    for g in graphs {
        let c = table.get(kind, &g)?;
        if !c.is_zero() {
            out.push((g, c));
        }
    }
    Ok(out)
}

fn labeled(n: usize, l: usize) -> impl Iterator<Item = DecoratedGraph> {
    enumerate_graphs(n, l, Direction::Directed).into_iter().filter(|c| !c.is_odd()).map(|c| c.representative)
}

/// Operations `mu_n = sum c_G Phi_G` over labeled graphs with `n` vertices and
/// `2n - 3` edges; `mu_1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyStructure {
    pub mu: BTreeMap<usize, Vec<(DecoratedGraph, BigRational)>>,
    pub max_arity: usize,
    /// Weights come from a class-keyed table, hence are invariant under relabeling and
    /// the operations are graded symmetric.
    pub symmetric: bool,
}

pub fn build_mu(table: &WeightTable<BigRational>, kind: WeightKind, max_arity: usize) -> Result<HomotopyStructure> {
    let mut mu = BTreeMap::new();
    for n in 2..=max_arity {
        mu.insert(n, nonzero_weighted(table, kind, labeled(n, 2 * n - 3))?);
    }
    Ok(HomotopyStructure { mu, max_arity, symmetric: true })
}

fn weighted_sum(terms: &[(DecoratedGraph, BigRational)], args: &[PolyField]) -> Result<PolyField> {
    let mut out = PolyField::zero(args[0].grading());
    for (g, c) in terms {
        out = &out + &phi(g, args)?.scale(c);
    }
    Ok(out)
}

impl HomotopyStructure {
    pub fn apply(&self, args: &[PolyField]) -> Result<PolyField> {
        let n = args.len();
        if n == 0 {
            return Err(Error::Arity { expected: 1, got: 0 });
        }
        if n == 1 {
            return Ok(PolyField::zero(args[0].grading()));
        }
        let terms = self.mu.get(&n).ok_or_else(|| Error::MissingEntry(format!("mu_{}", n)))?;
        weighted_sum(terms, args)
    }
}

impl Operations for HomotopyStructure {
    fn mu(&self, args: &[PolyField]) -> Option<PolyField> {
        self.apply(args).ok()
    }
}

/// Components `F_1 = Id`, `F_n = sum C_G Phi_G` over labeled graphs with `n` vertices and
/// `2n - 2` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub components: BTreeMap<usize, Vec<(DecoratedGraph, BigRational)>>,
    pub max_arity: usize,
}

pub fn build_morphism(table: &WeightTable<BigRational>, max_arity: usize) -> Result<Morphism> {
    let mut components = BTreeMap::new();
    for n in 2..=max_arity {
        components.insert(n, nonzero_weighted(table, WeightKind::Morphism, labeled(n, 2 * n - 2))?);
    }
    Ok(Morphism { components, max_arity })
}

impl Morphism {
    pub fn apply(&self, args: &[PolyField]) -> Result<PolyField> {
        match args.len() {
            0 => Err(Error::Arity { expected: 1, got: 0 }),
            1 => Ok(args[0].clone()),
            n => {
                let terms = self.components.get(&n).ok_or_else(|| Error::MissingEntry(format!("F_{}", n)))?;
                weighted_sum(terms, args)
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.components.values().all(Vec::is_empty)
    }

    /// `sum_n hbar^{n-1} F_n(alpha, ..., alpha) / n!`, the labeled form of the action on
    /// Maurer-Cartan elements.
    pub fn act(&self, alpha: &HSeries, order: usize) -> Result<HSeries> {
        check_degree_two(alpha)?;
        let mut out = truncate(alpha, order);
        for n in 2..=(order + 1).min(self.max_arity) {
            let nf = BigRational::from_integer(factorial(n));
            for (g, c) in &self.components[&n] {
                let coeff = c / &nf;
                add_multilinear(&mut out, n - 1, order, alpha, n, &coeff, |args| phi(g, args))?;
            }
        }
        Ok(out)
    }
}

fn truncate(alpha: &HSeries, order: usize) -> HSeries {
    let mut out = HSeries::zero(alpha.grading(), order);
    for k in 0..=order.min(alpha.order()) {
        out.add_at(k, alpha.coeff(k));
    }
    out
}

fn check_degree_two(alpha: &HSeries) -> Result<()> {
    for c in alpha.coeffs() {
        if c.degrees().iter().any(|&d| d != 2) {
            return Err(Error::Precondition("Maurer-Cartan candidates have degree 2".into()));
        }
    }
    Ok(())
}

/// Adds `coeff * hbar^shift * op(alpha, ..., alpha)` (n arguments) expanded over the hbar
/// powers of `alpha`, truncated at `order`.
fn add_multilinear(
    out: &mut HSeries,
    shift: usize,
    order: usize,
    alpha: &HSeries,
    n: usize,
    coeff: &BigRational,
    op: impl Fn(&[PolyField]) -> Result<PolyField>,
) -> Result<()> {
    if shift > order {
        return Ok(());
    }
    let budget = order - shift;
    let top = budget.min(alpha.order());
    for powers in (0..n).map(|_| 0..=top).multi_cartesian_product() {
        let total: usize = powers.iter().sum();
        if total > budget || powers.iter().any(|&k| alpha.coeff(k).is_zero()) {
            continue;
        }
        let args: Vec<PolyField> = powers.iter().map(|&k| alpha.coeff(k).clone()).collect();
        let v = op(&args)?;
        if !v.is_zero() {
            out.add_at(shift + total, &v.scale(coeff));
        }
    }
    Ok(())
}

/// `F(alpha) = alpha + sum_{n >= 2} hbar^{n-1} sum_G (C_G / #Aut G) Phi_G(alpha, ..., alpha)`
/// over unlabeled graphs with `n` vertices and `2n - 2` edges, truncated at `hbar^order`.
pub fn transform_mc(table: &WeightTable<BigRational>, alpha: &HSeries, order: usize) -> Result<HSeries> {
    check_degree_two(alpha)?;
    let mut out = truncate(alpha, order);
    for n in 2..=order + 1 {
        for class in enumerate_classes(n, 2 * n - 2, Direction::Directed) {
            if class.is_odd() {
                continue;
            }
            let g = class.representative;
            let c = table.get(WeightKind::Morphism, &g)?;
            if c.is_zero() {
                continue;
            }
            let aut = BigRational::from_integer(BigInt::from(g.automorphism_count(true)));
            add_multilinear(&mut out, n - 1, order, alpha, n, &(c / aut), |args| phi(&g, args))?;
        }
    }
    Ok(out)
}

/// Solves the Stokes identities of the `d Arg` theory (`c^in = c^out` = [`omega0_table`])
/// for half-plane weights `C` on graphs with up to `max_n` vertices. Unknowns on `n`
/// vertices are fixed by the identities of graphs with `n + 1` vertices; unknowns left
/// free by them take the values `free(n, graph)`.
pub fn linear_stokes_solutions(
    max_n: usize,
    mut free: impl FnMut(usize, &DecoratedGraph) -> BigRational,
) -> Result<WeightTable<BigRational>> {
    let mut solved = omega0_table();
    for level in 2..=max_n {
        let unknowns: Vec<DecoratedGraph> = enumerate_classes(level, 2 * level - 2, Direction::Directed)
            .into_iter()
            .filter(|c| !c.is_odd())
            .map(|c| c.representative)
            .collect();
        let mut affine: WeightTable<Affine> = WeightTable::new();
        for (kind, g, e) in solved.entries() {
            affine.insert(kind, g, Affine::constant(e.value.clone()), &e.provenance)?;
        }
        for (id, g) in unknowns.iter().enumerate() {
            affine.insert(WeightKind::Morphism, g, Affine::unknown(id), "unknown")?;
        }
        // graphs with fewer vertices missing from the table have weight zero
        let affine = affine.with_fallback(Affine::nil());
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for class in enumerate_classes(level + 1, 2 * level - 1, Direction::Directed) {
            if class.is_odd() {
                continue;
            }
            let r = stokes_identity_residual(&class.representative, &affine)?;
            let mut row = vec![BigRational::zero(); unknowns.len() + 1];
            for (k, v) in &r.linear {
                row[*k] = v.clone();
            }
            row[unknowns.len()] = -r.constant;
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
        let values = solve_linear(rows, unknowns.len(), |k| free(level, &unknowns[k]))?;
        for (g, v) in unknowns.iter().zip(values) {
            solved.insert(WeightKind::Morphism, g, v, "stokes solution")?;
        }
    }
    Ok(solved.with_fallback(BigRational::zero()))
}

/// Solve `A x = b` (rows `[A | b]`) exactly; free variables take `free(k)`.
fn solve_linear(
    mut rows: Vec<Vec<BigRational>>,
    nvars: usize,
    mut free: impl FnMut(usize) -> BigRational,
) -> Result<Vec<BigRational>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=nvars {
                    let t = &rows[r][j] * &f;
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[nvars].is_zero()) {
        return Err(Error::Precondition("the Stokes identities have no solution".into()));
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let mut x: Vec<BigRational> = (0..nvars)
        .map(|k| if pivot_cols.contains(&k) { BigRational::zero() } else { free(k) })
        .collect();
    for &(row, col) in pivots.iter().rev() {
        let mut v = rows[row][nvars].clone();
        for j in 0..nvars {
            if j != col && !rows[row][j].is_zero() {
                v -= &rows[row][j] * &x[j];
            }
        }
        x[col] = v;
    }
    Ok(x)
}

/// Components `alpha^{ij} = d/dpsi_j d/dpsi_i alpha` of a field with at most two `psi`
/// per term (only the bivector part contributes).
pub fn bivector_components(alpha: &PolyField) -> Result<Vec<Vec<PolyField>>> {
    if alpha.max_psi_count() > 2 {
        return Err(Error::Precondition("expected a bivector field".into()));
    }
    let d = alpha.grading().dim();
    Ok((0..d).map(|i| (0..d).map(|j| alpha.dpsi(i).dpsi(j)).collect()).collect())
}

fn psi_pair(g: &Grading, i: usize, j: usize) -> PolyField {
    &PolyField::psi(g, i) * &PolyField::psi(g, j)
}

/// The contraction attached to the wheel with `n` spokes:
/// `-(-1)^{n(n-1)/2} (1/2) sum d^n g^{ij}/dx^{k_1}..dx^{k_n} dg^{k_1 l_1}/dx^{l_2} ...
/// dg^{k_n l_n}/dx^{l_1} psi_i psi_j`.
pub fn wheel_contraction(gamma: &PolyField, n: usize) -> Result<PolyField> {
    if n < 2 {
        return Err(Error::Precondition(format!("wheels have at least two spokes, got {}", n)));
    }
    let g = gamma.grading().clone();
    let d = g.dim();
    let comp = bivector_components(gamma)?;
    // B[k][l][l'] = d gamma^{kl} / dx^{l'}
    let b: Vec<Vec<Vec<PolyField>>> =
        (0..d).map(|k| (0..d).map(|l| (0..d).map(|lp| comp[k][l].dx(lp)).collect()).collect()).collect();
    let mut out = PolyField::zero(&g);
    for ks in (0..n).map(|_| 0..d).multi_cartesian_product() {
        for ls in (0..n).map(|_| 0..d).multi_cartesian_product() {
            let mut rim = PolyField::one(&g);
            for m in 0..n {
                rim = &rim * &b[ks[m]][ls[m]][ls[(m + 1) % n]];
                if rim.is_zero() {
                    break;
                }
            }
            if rim.is_zero() {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let mut c = comp[i][j].clone();
                    for &k in &ks {
                        c = c.dx(k);
                    }
                    if !c.is_zero() {
                        out = &out + &(&(&c * &rim) * &psi_pair(&g, i, j));
                    }
                }
            }
        }
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { -1 } else { 1 };
    Ok(out.scale(&rat(sign, 2)))
}

/// `alpha + sum_{n=2}^{order} hbar^n (C_n / n) Phi_{w_n}(alpha, ..., alpha)`, the wheel
/// part of the action on a bivector; missing coefficients count as zero.
pub fn wheel_series(alpha: &HSeries, coefficients: &BTreeMap<usize, BigRational>, order: usize) -> Result<HSeries> {
    for c in alpha.coeffs() {
        if c.max_psi_count() > 2 {
            return Err(Error::Precondition("wheel series needs a bivector".into()));
        }
    }
    let mut out = truncate(alpha, order);
    for n in 2..=order {
        let Some(c) = coefficients.get(&n) else { continue };
        if c.is_zero() {
            continue;
        }
        let w = wheel(n)?;
        let coeff = c / BigRational::from_integer(BigInt::from(n));
        add_multilinear(&mut out, n, order, alpha, n + 1, &coeff, |args| phi(&w, args))?;
    }
    Ok(out)
}

/// Structure constants `a[i][j][k]` of a linear bivector `(1/2) a^{ij}_k x^k psi_i psi_j`.
pub fn structure_constants(gamma2: &PolyField) -> Result<Vec<Vec<Vec<BigRational>>>> {
    let comp = bivector_components(gamma2)?;
    let g = gamma2.grading();
    let d = g.dim();
    let mut a = vec![vec![vec![BigRational::zero(); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for (m, c) in comp[i][j].terms() {
                let xs: u32 = m[..d].iter().sum();
                if xs != 1 || m[d..].iter().any(|&p| p > 0) {
                    return Err(Error::Precondition("expected a bivector linear in x".into()));
                }
                let k = m.iter().position(|&e| e == 1).expect("one x factor");
                a[i][j][k] = c.clone();
            }
        }
    }
    Ok(a)
}

/// Symbol of `Trace(ad^n)` as a polynomial in commuting variables `xi_k` (stored as
/// `x^k`): `tr(A^n)` with `A^l_{l'} = sum_k a^{kl}_{l'} xi_k`.
pub fn trace_symbol(g: &Grading, a: &[Vec<Vec<BigRational>>], n: usize) -> PolyField {
    let d = g.dim();
    let entry = |l: usize, lp: usize| -> PolyField {
        let mut e = PolyField::zero(g);
        for (k, ak) in a.iter().enumerate() {
            if !ak[l][lp].is_zero() {
                e = &e + &PolyField::x(g, k).scale(&ak[l][lp]);
            }
        }
        e
    };
    let base: Vec<Vec<PolyField>> = (0..d).map(|l| (0..d).map(|lp| entry(l, lp)).collect()).collect();
    let mut power = base.clone();
    for _ in 1..n {
        power = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut s = PolyField::zero(g);
                        for k in 0..d {
                            s = &s + &(&power[i][k] * &base[k][j]);
                        }
                        s
                    })
                    .collect()
            })
            .collect();
    }
    let mut tr = PolyField::zero(g);
    for (i, row) in power.iter().enumerate() {
        tr = &tr + &row[i];
    }
    tr
}

/// Apply a constant-coefficient symbol `P(xi)` as the operator `P(d/dx)`.
pub fn apply_symbol(symbol: &PolyField, f: &PolyField) -> PolyField {
    let d = f.grading().dim();
    let mut out = PolyField::zero(f.grading());
    for (m, c) in symbol.terms() {
        let mut t = f.clone();
        for (a, &e) in m[..d].iter().enumerate() {
            for _ in 0..e {
                t = t.dx(a);
            }
        }
        out = &out + &t.scale(c);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DufloVariant {
    /// Wheel weights `-(-1)^{n(n-1)/2} n B_n / (2 n n!)` of the antipropagator.
    Bernoulli,
    /// Wheel weights `(-1)^{n(n-1)/2} zeta(n) / (2 pi i)^n` of the half-antipropagator.
    Zeta,
}

impl FromStr for DufloVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bernoulli" => Ok(DufloVariant::Bernoulli),
            "zeta" => Ok(DufloVariant::Zeta),
            other => Err(Error::Parse { what: "Duflo variant", detail: format!("unknown variant `{}`", other) }),
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

/// Exact wheel weight `C'_{w_n}`, or `None` when it is irrational (odd `n`, zeta variant).
pub fn duflo_wheel_weight(n: usize, variant: DufloVariant) -> Option<BigRational> {
    let even = -BigRational::from_integer(wheel_sign(n).into()) * bernoulli(n)
        / BigRational::from_integer(BigInt::from(2) * factorial(n));
    match variant {
        DufloVariant::Bernoulli => Some(if n % 2 == 0 { even } else { BigRational::zero() }),
        // zeta(2k) / (2 pi i)^{2k} = -B_{2k} / (2 (2k)!)
        DufloVariant::Zeta => (n % 2 == 0).then_some(even),
    }
}

/// Coefficients `c_n` of the exponent `sum c_n hbar^n Trace(ad^n)`, as they follow from
/// the wheel weights: `c_n = B_n / (2 n n!)` (zero for odd `n` in the Bernoulli variant,
/// `None` for odd `n` in the zeta variant).
pub fn duflo_exponent_coefficient(n: usize, variant: DufloVariant) -> Option<BigRational> {
    match (variant, n % 2) {
        (_, 0) => Some(modified_bernoulli(n)),
        (DufloVariant::Bernoulli, _) => Some(BigRational::zero()),
        (DufloVariant::Zeta, _) => None,
    }
}

fn check_duflo_inputs(gamma2: &PolyField, gamma0: &PolyField) -> Result<Vec<Vec<Vec<BigRational>>>> {
    if *gamma2.grading() != *gamma0.grading() {
        return Err(Error::GradingMismatch);
    }
    let a = structure_constants(gamma2)?;
    if !gamma0.is_function() {
        return Err(Error::Precondition("the invariant polynomial must not contain psi".into()));
    }
    if !schouten(gamma2, gamma0).is_zero() {
        return Err(Error::Precondition("the polynomial is not invariant: [gamma2, gamma0] != 0".into()));
    }
    Ok(a)
}

/// `gamma2 + exp(sum_n c_n hbar^n Trace(ad^n)) gamma0`, truncated at `hbar^order`.
pub fn duflo_transform(gamma2: &PolyField, gamma0: &PolyField, variant: DufloVariant, order: usize) -> Result<HSeries> {
    let a = check_duflo_inputs(gamma2, gamma0)?;
    let g = gamma2.grading().clone();
    // exponent as a series of symbols
    let mut exponent: Vec<PolyField> = vec![PolyField::zero(&g); order + 1];
    for (n, slot) in exponent.iter_mut().enumerate().skip(2) {
        let sym = trace_symbol(&g, &a, n);
        match duflo_exponent_coefficient(n, variant) {
            Some(c) => *slot = sym.scale(&c),
            None => {
                if !apply_symbol(&sym, gamma0).is_zero() {
                    return Err(Error::Irrational(format!("the hbar^{} term (odd zeta value)", n)));
                }
            }
        }
    }
    // exp of a series without constant term
    let mut total: Vec<PolyField> = vec![PolyField::zero(&g); order + 1];
    total[0] = PolyField::one(&g);
    let mut power = total.clone();
    for m in 1..=order {
        let mut next = vec![PolyField::zero(&g); order + 1];
        for i in 0..=order {
            if power[i].is_zero() {
                continue;
            }
            for j in 1..=(order - i) {
                next[i + j] = &next[i + j] + &(&power[i] * &exponent[j]);
            }
        }
        power = next;
        let inv = BigRational::new(1.into(), factorial(m));
        for k in 0..=order {
            total[k] = &total[k] + &power[k].scale(&inv);
        }
    }
    let mut coeffs: Vec<PolyField> = total.iter().map(|sym| apply_symbol(sym, gamma0)).collect();
    coeffs[0] = &coeffs[0] + gamma2;
    HSeries::from_coeffs(coeffs)
}

/// Multisets of rim sizes `>= 2` with total at most `order`.
fn rim_multisets(order: usize) -> Vec<Vec<usize>> {
    fn go(min: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for r in min..=left {
            cur.push(r);
            out.push(cur.clone());
            go(r, left - r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2, order, &mut Vec::new(), &mut out);
    out
}

/// The same transform through graphs: unions of wheels sharing the center that carries
/// `gamma0`, weighted by products of wheel weights over automorphism counts.
pub fn duflo_wheel_route(gamma2: &PolyField, gamma0: &PolyField, variant: DufloVariant, order: usize) -> Result<HSeries> {
    check_duflo_inputs(gamma2, gamma0)?;
    let g = gamma2.grading().clone();
    let mut out = HSeries::zero(&g, order);
    out.add_at(0, &(gamma2 + gamma0));
    for rims in rim_multisets(order) {
        let graph = wheel_union(&rims)?;
        let total: usize = rims.iter().sum();
        let mut args = vec![gamma2.clone(); total];
        args.push(gamma0.clone());
        let value = phi(&graph, &args)?;
        if value.is_zero() {
            continue;
        }
        let mut weight = BigRational::one();
        for &r in &rims {
            match duflo_wheel_weight(r, variant) {
                Some(w) => weight *= w,
                None => {
                    return Err(Error::Irrational(format!("the weight of the wheel with {} spokes", r)));
                }
            }
        }
        let aut = BigRational::from_integer(BigInt::from(graph.automorphism_count(true)));
        out.add_at(total, &value.scale(&(weight / aut)));
    }
    Ok(out)
}

/// Linear Poisson structure of `so(3)`: `x3 psi1 psi2 - x2 psi1 psi3 + x1 psi2 psi3`.
pub fn so3_bivector() -> PolyField {
    PolyField::parse(&Grading::even(3), "x3*psi{1}*psi{2} - x2*psi{1}*psi{3} + x1*psi{2}*psi{3}")
        .expect("valid literal")
}

/// `(x1^2 + x2^2 + x3^2)^power`, invariant under `so(3)`.
pub fn so3_casimir(power: u32) -> PolyField {
    let g = Grading::even(3);
    let r2 = PolyField::parse(&g, "x1^2 + x2^2 + x3^2").expect("valid literal");
    (0..power).fold(PolyField::one(&g), |acc, _| &acc * &r2)
}

/// The bivector with components `a * sum_k eps^{ijk} df/dx^k` in three dimensions,
/// which is Poisson for all functions `a` and `f`.
pub fn nambu_bivector(a: &PolyField, f: &PolyField) -> Result<PolyField> {
    let g = a.grading().clone();
    if g.dim() != 3 || !a.is_function() || !f.is_function() || *f.grading() != g {
        return Err(Error::Precondition("expected two functions of three variables".into()));
    }
    let mut out = PolyField::zero(&g);
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let c = a * &f.dx(k);
        out = &out + &(&c * &psi_pair(&g, i, j));
    }
    Ok(out)
}

/// The tetrahedral flow `sum T^{ij} psi_i psi_j` with
/// `T^{ij} = d^3 a^{ij}/dk dl dm * da^{kk'}/dl' * da^{ll'}/dm' * da^{mm'}/dk'`, plus, with
/// `include_second_term`,
/// `(4/3) d^2 a^{im}/dk dl * da^{kk'}/dl' * da^{ll'}/dm' * d^2 a^{jm'}/dk' dm`.
/// The overall normalization is a convention.
pub fn tetrahedron_flow(alpha: &PolyField, include_second_term: bool) -> Result<PolyField> {
    let (first, second) = tetrahedron_terms(alpha)?;
    Ok(if include_second_term { &first + &second } else { first })
}

/// Both tetrahedral terms separately.
pub fn tetrahedron_terms(alpha: &PolyField) -> Result<(PolyField, PolyField)> {
    let g = alpha.grading().clone();
    if g.x_degrees().iter().any(|&k| k != 0) {
        return Err(Error::Precondition("the tetrahedral flow needs the all-even grading".into()));
    }
    if alpha.terms().keys().any(|m| alpha.psi_count(m) != 2) {
        return Err(Error::Precondition("the tetrahedral flow needs a bivector".into()));
    }
    let d = g.dim();
    let a = bivector_components(alpha)?;
    let d1: Vec<Vec<Vec<PolyField>>> =
        (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a[i][j].dx(k)).collect()).collect()).collect();
    // cyclic factor  W[k][l][m] = sum_{k',l',m'} da^{kk'}/dl' da^{ll'}/dm' da^{mm'}/dk'  with
    // the primed indices summed; the second term needs the open chain instead.
    let mut first = PolyField::zero(&g);
    let mut second = PolyField::zero(&g);
    for (k, l, m) in (0..3).map(|_| 0..d).multi_cartesian_product().map(|v| (v[0], v[1], v[2])) {
        let mut cyc = PolyField::zero(&g);
        for (kp, lp, mp) in (0..3).map(|_| 0..d).multi_cartesian_product().map(|v| (v[0], v[1], v[2])) {
            let t = &(&d1[k][kp][lp] * &d1[l][lp][mp]) * &d1[m][mp][kp];
            cyc = &cyc + &t;
        }
        if cyc.is_zero() {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                let c = a[i][j].dx(k).dx(l).dx(m);
                if !c.is_zero() {
                    first = &first + &(&(&c * &cyc) * &psi_pair(&g, i, j));
                }
            }
        }
    }
    for (k, l, kp, lp, mp) in
        (0..5).map(|_| 0..d).multi_cartesian_product().map(|v| (v[0], v[1], v[2], v[3], v[4]))
    {
        let chain = &d1[k][kp][lp] * &d1[l][lp][mp];
        if chain.is_zero() {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                for m in 0..d {
                    let left = a[i][m].dx(k).dx(l);
                    let right = a[j][mp].dx(kp).dx(m);
                    if left.is_zero() || right.is_zero() {
                        continue;
                    }
                    second = &second + &(&(&(&left * &chain) * &right) * &psi_pair(&g, i, j));
                }
            }
        }
    }
    Ok((first, second.scale(&rat(4, 3))))
}

/// `|v|` of the largest coefficient of a series, for reporting defects.
pub fn series_max_coefficient(s: &HSeries) -> BigRational {
    s.coeffs().iter().map(|c| c.max_abs_coefficient().abs()).max().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfields::random::{random_with_psi, RandomShape};
    use crate::polyfields::schouten_series;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gr(s: &str) -> DecoratedGraph {
        s.parse().unwrap()
    }

    fn p3(s: &str) -> PolyField {
        PolyField::parse(&Grading::even(3), s).unwrap()
    }

    #[test]
    fn uncertain_products_propagate_first_order() {
        let a = Uncertain::estimate("a", 2.0, 0.1);
        let b = Uncertain::estimate("b", 3.0, 0.2);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.value, 6.0);
        let expected = ((3.0f64 * 0.1).powi(2) + (2.0f64 * 0.2).powi(2)).sqrt();
        assert!((p.std_error() - expected).abs() < 1e-12);
        // correlated: a - a is exact
        assert!(a.sub(&a).std_error() < 1e-15);
        assert!((a.add(&a).std_error() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn affine_products_must_stay_linear() {
        let x = Affine::unknown(0);
        let two = Affine::constant(rat(2, 1));
        assert_eq!(x.mul(&two).unwrap().linear[&0], rat(2, 1));
        assert!(x.mul(&x).is_err());
    }

    #[test]
    fn table_lookup_applies_orientation_signs() {
        let mut t: WeightTable<BigRational> = WeightTable::new();
        let g = gr("3;4;1>2,1>3,2>3,3>2");
        t.insert(WeightKind::Morphism, &g, rat(1, 5), "test").unwrap();
        assert_eq!(t.get(WeightKind::Morphism, &g).unwrap(), rat(1, 5));
        assert_eq!(t.get(WeightKind::Morphism, &g.opposite()).unwrap(), rat(-1, 5));
        assert_eq!(t.get(WeightKind::Morphism, &g.reordered(&[1, 0, 2, 3]).unwrap()).unwrap(), rat(1, 5));
        let swapped = gr("3;4;1>3,1>2,2>3,3>2");
        assert_eq!(t.get(WeightKind::Morphism, &swapped).unwrap(), rat(-1, 5));
        assert_eq!(t.get(WeightKind::Morphism, &g.relabeled(&[3, 1, 2])).unwrap(), rat(1, 5));
        assert!(t.get(WeightKind::In, &g).is_err());
        assert!(t.get(WeightKind::Morphism, &gr("2;2;1>2,2>1")).unwrap().is_zero());
        assert_eq!(t.get(WeightKind::Morphism, &gr("1;0;")).unwrap(), rat(1, 1));
    }

    #[test]
    fn omega0_gives_the_bracket_and_nothing_else() {
        let mu = build_mu(&omega0_table(), WeightKind::Out, 4).unwrap();
        assert_eq!(mu.mu[&2].len(), 2);
        assert!(mu.mu[&3].is_empty() && mu.mu[&4].is_empty());
        let (a, b) = (p3("x1*x2*psi{3}"), p3("x3^2*psi{1}*psi{2}"));
        assert_eq!(mu.apply(&[a.clone(), b.clone()]).unwrap(), schouten(&a, &b));
    }

    fn random_morphism_table() -> WeightTable<BigRational> {
        let mut t = WeightTable::new().with_fallback(BigRational::zero());
        for n in 2..=3 {
            for (k, c) in enumerate_classes(n, 2 * n - 2, Direction::Directed).into_iter().enumerate() {
                if !c.is_odd() {
                    let v = rat(k as i64 % 5 - 2, (k as i64 % 3) + 1);
                    t.insert(WeightKind::Morphism, &c.representative, v, "test").unwrap();
                }
            }
        }
        t
    }

    #[test]
    fn unlabeled_action_equals_labeled_sum() {
        let t = random_morphism_table();
        let m = build_morphism(&t, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = RandomShape { max_terms: 3, max_x_power: 2, max_coeff: 4 };
        let g = Grading::even(2);
        let a0 = random_with_psi(&g, 2, &mut rng, &shape);
        let a1 = random_with_psi(&g, 2, &mut rng, &shape);
        let alpha = HSeries::from_coeffs(vec![a0, a1]).unwrap();
        assert_eq!(transform_mc(&t, &alpha, 2).unwrap(), m.act(&alpha, 2).unwrap());
    }

    #[test]
    fn wheels_reproduce_their_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shape = RandomShape { max_terms: 3, max_x_power: 2, max_coeff: 3 };
        for n in 2..=3 {
            let gam = random_with_psi(&Grading::even(3), 2, &mut rng, &shape);
            let direct = phi(&wheel(n).unwrap(), &vec![gam.clone(); n + 1]).unwrap();
            assert_eq!(direct, wheel_contraction(&gam, n).unwrap());
        }
    }

    #[test]
    fn wheel_series_leaves_constant_bivectors_alone() {
        let alpha = HSeries::constant(p3("psi{1}*psi{2} + 3*psi{2}*psi{3}"), 3);
        let coeffs = (2..=3).map(|n| (n, rat(1, n as i64))).collect();
        assert_eq!(wheel_series(&alpha, &coeffs, 3).unwrap(), alpha);
    }

    #[test]
    fn duflo_routes_agree() {
        let g2 = so3_bivector();
        for power in 1..=2 {
            let g0 = so3_casimir(power);
            for v in [DufloVariant::Bernoulli, DufloVariant::Zeta] {
                assert_eq!(duflo_transform(&g2, &g0, v, 4).unwrap(), duflo_wheel_route(&g2, &g0, v, 4).unwrap());
            }
        }
        assert_eq!(duflo_exponent_coefficient(2, DufloVariant::Bernoulli), Some(rat(1, 48)));
        assert_eq!(duflo_wheel_weight(2, DufloVariant::Bernoulli), Some(rat(1, 24)));
        assert!(duflo_transform(&g2, &p3("x1"), DufloVariant::Bernoulli, 2).is_err());
    }

    #[test]
    fn duflo_of_the_quadratic_casimir() {
        // Tr(ad_xi^2) = -2 |xi|^2 for so(3), so the hbar^2 term is (1/48)(-2)(6) = -1/4
        let d = duflo_transform(&so3_bivector(), &so3_casimir(1), DufloVariant::Bernoulli, 2).unwrap();
        assert_eq!(d.coeff(2), &PolyField::constant(&Grading::even(3), rat(-1, 4)));
    }

    #[test]
    fn tetrahedral_terms_vanish_for_so3() {
        let (t1, t2) = tetrahedron_terms(&so3_bivector()).unwrap();
        assert!(t1.is_zero() && t2.is_zero());
        assert!(tetrahedron_flow(&p3("x1*psi{1}"), true).is_err());
    }

    #[test]
    fn tetrahedral_cocycle_weight_on_nambu_structures() {
        for (a, f) in [("x1 + 2*x2*x3", "x1*x2 + x3^2"), ("x2", "x1^2*x3 + x2^3")] {
            let alpha = nambu_bivector(&p3(a), &p3(f)).unwrap();
            assert!(schouten(&alpha, &alpha).is_zero());
            let (t1, t2) = tetrahedron_terms(&alpha).unwrap();
            assert!(!schouten(&alpha, &t1).is_zero());
            let flow = &t1 - &t2.scale(&rat(9, 2));
            assert!(schouten(&alpha, &flow).is_zero());
        }
    }

    #[test]
    fn stokes_solutions_preserve_poisson_structures() {
        let table = linear_stokes_solutions(4, |_, g| rat(g.edges()[0].1 as i64, 2)).unwrap();
        for n in 3..=5 {
            for c in enumerate_classes(n, 2 * n - 3, Direction::Directed) {
                assert!(stokes_identity_residual(&c.representative, &table).unwrap().is_zero());
            }
        }
        let alpha = nambu_bivector(&p3("x1 + 2*x2*x3"), &p3("x1*x2 + x3^2")).unwrap();
        let s = HSeries::constant(alpha, 3);
        let f = transform_mc(&table, &s, 3).unwrap();
        assert!(!f.coeff(3).is_zero());
        assert!(schouten_series(&f, &f).is_zero());

        // some single-weight perturbation must break it
        let broken = table.entries().filter(|(k, g, _)| *k == WeightKind::Morphism && g.n() == 4).any(|(k, g, e)| {
            let mut bad = table.clone();
            bad.insert(k, g, &e.value + rat(1, 1), "perturbed").unwrap();
            let f = transform_mc(&bad, &s, 3).unwrap();
            !schouten_series(&f, &f).is_zero()
        });
        assert!(broken);
    }
}
