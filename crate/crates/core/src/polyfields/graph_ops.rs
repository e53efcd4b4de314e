//! Graph operators: each edge `i -> j` contracts `psi` in copy `i` with `x` in copy `j`.

use std::collections::HashMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use super::field::{monomial_deriv, monomial_mul, monomial_odd, Grading, Monomial, PolyField};
use crate::error::{Error, Result};
use crate::graphs::DecoratedGraph;

type State = Vec<Monomial>;

fn check_args(g: &DecoratedGraph, gammas: &[PolyField]) -> Result<Grading> {
    if gammas.len() != g.n() {
        return Err(Error::Arity { expected: g.n(), got: gammas.len() });
    }
    let grading = match gammas.first() {
        Some(f) => f.grading().clone(),
        None => return Err(Error::Arity { expected: g.n(), got: 0 }),
    };
    if gammas.iter().any(|f| *f.grading() != grading) {
        return Err(Error::GradingMismatch);
    }
    Ok(grading)
}

/// Left derivative of a tensor state by variable `v` of copy `k`.
fn state_deriv(g: &Grading, state: &State, k: usize, v: usize) -> Option<(i64, State)> {
    let (mut c, m) = monomial_deriv(g, &state[k], v)?;
    if g.var_odd(v) && state[..k].iter().filter(|m| monomial_odd(g, m)).count() % 2 == 1 {
        c = -c;
    }
    let mut out = state.clone();
    out[k] = m;
    Some((c, out))
}

/// Directed edges applied to the tensor product of the arguments (edge list in
/// operator order, outermost first), followed by identification of the copies.
fn contract(grading: &Grading, edges: &[(usize, usize)], gammas: &[PolyField]) -> PolyField {
    let n = gammas.len();
    let d = grading.dim();
    // terms that cannot survive the derivatives hitting their copy are dropped early
    let mut outdeg = vec![0u32; n];
    let mut indeg = vec![0u32; n];
    for &(s, t) in edges {
        outdeg[s - 1] += 1;
        indeg[t - 1] += 1;
    }
    let filtered: Vec<Vec<(&Monomial, &BigRational)>> = gammas
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.terms()
                .iter()
                .filter(|(m, _)| {
                    let psi: u32 = m[d..].iter().sum();
                    let xs: u32 = m[..d].iter().sum();
                    psi >= outdeg[i] && xs >= indeg[i]
                })
                .collect()
        })
        .collect();
    let mut states: HashMap<State, BigRational> = HashMap::new();
    for combo in filtered.iter().map(|v| v.iter()).multi_cartesian_product() {
        let state: State = combo.iter().map(|(m, _)| (*m).clone()).collect();
        let mut c = BigRational::from_integer(1.into());
        for (_, cc) in &combo {
            c *= *cc;
        }
        *states.entry(state).or_insert_with(BigRational::zero) += c;
    }
    if n == 0 {
        states.insert(Vec::new(), BigRational::from_integer(1.into()));
    }
    for &(s, t) in edges.iter().rev() {
        let mut next: HashMap<State, BigRational> = HashMap::new();
        for (state, c) in &states {
            for a in 0..d {
                let Some((c1, st1)) = state_deriv(grading, state, s - 1, grading.psi(a)) else {
                    continue;
                };
                let Some((c2, st2)) = state_deriv(grading, &st1, t - 1, grading.x(a)) else {
                    continue;
                };
                *next.entry(st2).or_insert_with(BigRational::zero) +=
                    c * BigRational::from_integer((c1 * c2).into());
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }
    let mut out = PolyField::zero(grading);
    let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
    'states: for (state, c) in states {
        let mut m = vec![0u32; grading.var_count()];
        let mut neg = false;
        for part in &state {
            match monomial_mul(grading, &m, part) {
                Some((mm, ng)) => {
                    m = mm;
                    neg ^= ng;
                }
                None => continue 'states,
            }
        }
        *acc.entry(m).or_insert_with(BigRational::zero) += if neg { -c } else { c };
    }
    for (m, c) in acc {
        out.add_term(m, c);
    }
    out
}

/// The multidifferential operator of a directed graph.
///
/// Edge operators are composed in the stored edge order (first edge outermost) and the
/// result is multiplied by the graph's orientation parity.
pub fn phi(g: &DecoratedGraph, gammas: &[PolyField]) -> Result<PolyField> {
    if !g.is_directed() {
        return Err(Error::InvalidGraph("phi needs a directed graph; use phi_sym".into()));
    }
    let grading = check_args(g, gammas)?;
    let out = contract(&grading, g.edges(), gammas);
    Ok(if g.parity() < 0 { -out } else { out })
}

/// Sign of reordering graded objects: the sequence `perm` (a permutation of `0..n`) of
/// objects with the given degrees is brought into increasing order.
pub fn koszul_reorder_sign(degrees: &[i32], perm: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j]
                && degrees[perm[i]].rem_euclid(2) == 1
                && degrees[perm[j]].rem_euclid(2) == 1
            {
                sign = -sign;
            }
        }
    }
    sign
}

fn homogeneous_expansions(gammas: &[PolyField]) -> Vec<(Vec<i32>, Vec<PolyField>)> {
    gammas
        .iter()
        .map(|f| f.homogeneous_parts().into_iter().collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().unzip())
        .collect()
}

/// The symmetrized operator of an undirected graph: average over vertex labelings of
/// the two-sided edge contraction.
pub fn phi_sym(g: &DecoratedGraph, gammas: &[PolyField]) -> Result<PolyField> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("phi_sym needs an undirected graph".into()));
    }
    let grading = check_args(g, gammas)?;
    let n = g.n();
    let mut total = PolyField::zero(&grading);
    if gammas.iter().any(PolyField::is_zero) {
        return Ok(total);
    }
    for (degrees, parts) in homogeneous_expansions(gammas) {
        for f in (1..=n).permutations(n) {
            // the product over vertices of gamma_{f(v)} is reordered into copy order
            let order: Vec<usize> = f.iter().map(|&k| k - 1).collect();
            let eps = koszul_reorder_sign(&degrees, &order);
            let relabeled = g.relabeled(&f);
            for orient in (0..relabeled.edge_count()).map(|_| [false, true]).multi_cartesian_product() {
                let edges: Vec<(usize, usize)> = relabeled
                    .edges()
                    .iter()
                    .zip(&orient)
                    .map(|(&(a, b), &flip)| if flip { (b, a) } else { (a, b) })
                    .collect();
                let t = contract(&grading, &edges, &parts);
                total = if eps < 0 { &total - &t } else { &total + &t };
            }
        }
    }
    let nfact: i64 = (1..=n as i64).product();
    let total = total.scale(&BigRational::new(1.into(), nfact.into()));
    Ok(if g.parity() < 0 { -total } else { total })
}

/// Both sides of the composition law for graph operators; returns LHS - RHS.
///
/// LHS is `Phi_{g1}(gamma_1, ..., gamma_{inf A - 1}, Phi_{g2}(gamma_A), rest)`; RHS sums
/// `Phi_G` over all graphs `G` with `G_A = g2` and `G / G_A = g1`, edges ordered as
/// (edges of `g1`, edges of `g2`), with Koszul signs from moving the inner operator and
/// the arguments.
pub fn composition_identity_check(
    g1: &DecoratedGraph,
    g2: &DecoratedGraph,
    a: &[usize],
    gammas: &[PolyField],
) -> Result<PolyField> {
    let n = gammas.len();
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() >= n || a[0] == 0 || *a.last().unwrap() > n {
        return Err(Error::InvalidSubset("A must be a nonempty proper subset of 1..=n".into()));
    }
    if g2.n() != a.len() || g1.n() != n - a.len() + 1 {
        return Err(Error::Precondition(format!(
            "incompatible shapes: |A| = {}, n = {}, graphs have {} and {} vertices",
            a.len(),
            n,
            g1.n(),
            g2.n()
        )));
    }
    let grading = check_args(&DecoratedGraph::directed(n, vec![])?, gammas)?;
    let inf = a[0];
    let rest: Vec<usize> = (inf + 1..=n).filter(|k| !a.contains(k)).collect();
    // vertex of g1 -> original label (None for the collapsed vertex)
    let outer: Vec<Option<usize>> = (1..=g1.n())
        .map(|u| {
            if u < inf {
                Some(u)
            } else if u == inf {
                None
            } else {
                Some(rest[u - inf - 1])
            }
        })
        .collect();
    let l2 = g2.edge_count() as i32;
    let mut lhs = PolyField::zero(&grading);
    let mut rhs = PolyField::zero(&grading);
    for (degrees, parts) in homogeneous_expansions(gammas) {
        let inner_args: Vec<PolyField> = a.iter().map(|&k| parts[k - 1].clone()).collect();
        let inner = phi(g2, &inner_args)?;
        let mut outer_args: Vec<PolyField> = (1..inf).map(|k| parts[k - 1].clone()).collect();
        outer_args.push(inner);
        outer_args.extend(rest.iter().map(|&k| parts[k - 1].clone()));
        lhs = &lhs + &phi(g1, &outer_args)?;

        let mut order: Vec<usize> = (0..inf - 1).collect();
        order.extend(a.iter().map(|&k| k - 1));
        order.extend(rest.iter().map(|&k| k - 1));
        let mut sign = koszul_reorder_sign(&degrees, &order);
        let before: i32 = degrees[..inf - 1].iter().sum();
        if (l2 * before).rem_euclid(2) == 1 {
            sign = -sign;
        }
        let inner_edges: Vec<(usize, usize)> =
            g2.edges().iter().map(|&(s, t)| (a[s - 1], a[t - 1])).collect();
        let choices: Vec<Vec<(usize, usize)>> = g1
            .edges()
            .iter()
            .map(|&(s, t)| {
                let ends = |u: usize| -> Vec<usize> {
                    match outer[u - 1] {
                        Some(v) => vec![v],
                        None => a.clone(),
                    }
                };
                ends(s)
                    .into_iter()
                    .cartesian_product(ends(t))
                    .filter(|(x, y)| x != y)
                    .collect()
            })
            .collect();
        let lifts: Vec<Vec<(usize, usize)>> = if choices.is_empty() {
            vec![vec![]]
        } else {
            choices.into_iter().multi_cartesian_product().collect()
        };
        for lift in lifts {
            let mut edges = lift;
            edges.extend(&inner_edges);
            let g = DecoratedGraph::directed(n, edges)?.with_parity(g1.parity() * g2.parity());
            let t = phi(&g, &parts)?;
            rhs = if sign < 0 { &rhs - &t } else { &rhs + &t };
        }
    }
    Ok(&lhs - &rhs)
}
