//! Random polyvector fields for property checks and the CLI's self-tests.

use num_rational::BigRational;
use rand::Rng;

use super::field::{Grading, Monomial, PolyField};

/// Shape of random fields: term count, maximal x-degree per variable and coefficient range.
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_terms: usize,
    pub max_x_power: u32,
    pub max_coeff: i64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_terms: 4, max_x_power: 2, max_coeff: 5 }
    }
}

fn random_x_part<R: Rng + ?Sized>(g: &Grading, rng: &mut R, shape: &RandomShape) -> Vec<u32> {
    (0..g.dim())
        .map(|a| {
            if g.var_odd(a) {
                rng.gen_range(0..=1)
            } else {
                rng.gen_range(0..=shape.max_x_power)
            }
        })
        .collect()
}

fn random_coeff<R: Rng + ?Sized>(rng: &mut R, shape: &RandomShape) -> BigRational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-shape.max_coeff..=shape.max_coeff);
    }
    BigRational::from_integer(c.into())
}

/// A random field all of whose terms contain exactly `psi_count` psi factors
/// (homogeneous when the grading is all even).
pub fn random_with_psi<R: Rng + ?Sized>(
    g: &Grading,
    psi_count: usize,
    rng: &mut R,
    shape: &RandomShape,
) -> PolyField {
    let d = g.dim();
    let terms: Vec<(Monomial, BigRational)> = (0..rng.gen_range(1..=shape.max_terms))
        .map(|_| {
            let mut m = random_x_part(g, rng, shape);
            let mut psi = vec![0u32; d];
            let mut left = psi_count;
            let mut guard = 0;
            while left > 0 && guard < 64 {
                guard += 1;
                let a = rng.gen_range(0..d);
                if g.var_odd(d + a) && psi[a] == 1 {
                    continue;
                }
                psi[a] += 1;
                left -= 1;
            }
            m.extend(psi);
            (m, random_coeff(rng, shape))
        })
        .collect();
    PolyField::from_terms(g, terms).expect("sizes match the grading")
}

/// A random homogeneous field of the given total degree, or zero when the random
/// attempts find no monomial of that degree.
pub fn random_homogeneous<R: Rng + ?Sized>(
    g: &Grading,
    degree: i32,
    rng: &mut R,
    shape: &RandomShape,
) -> PolyField {
    let mut out = PolyField::zero(g);
    for _ in 0..(shape.max_terms * 40) {
        if out.len() >= shape.max_terms {
            break;
        }
        let f = random_with_psi(g, rng.gen_range(0..=g.dim()), rng, &RandomShape { max_terms: 1, ..*shape });
        for (deg, part) in f.homogeneous_parts() {
            if deg == degree {
                out = &out + &part;
            }
        }
    }
    out
}
