//! Seeded random polynomial data for property tests.
//!
//! Components are sparse polynomials of total degree at most two with small
//! rational coefficients. The same seed always yields the same object.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Block, Expr, VarRef};
use crate::geometry::TensorField;

use super::index::binomial;
use super::linear::{FormOnT, SlotKind};
use super::nonlinear::NonlinearForm;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f0e5)
}

fn coefficient(rng: &mut ChaCha8Rng) -> Expr {
    let num = loop {
        let v = rng.gen_range(-4i64..=4);
        if v != 0 {
            break v;
        }
    };
    Expr::ratio(num, rng.gen_range(1i64..=3))
}

/// A polynomial of degree at most two in `vars` with up to `max_terms` terms.
pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[VarRef], max_terms: usize) -> Expr {
    let terms = rng.gen_range(1..=max_terms.max(1));
    Expr::sum((0..terms).map(|_| {
        let degree = if vars.is_empty() { 0 } else { rng.gen_range(0..=2) };
        let mut factors = vec![coefficient(rng)];
        for _ in 0..degree {
            factors.push(Expr::var(vars[rng.gen_range(0..vars.len())]));
        }
        Expr::product(factors)
    }))
}

fn block_vars(blocks: &[Block], dim: usize) -> Vec<VarRef> {
    blocks
        .iter()
        .flat_map(|&block| (0..dim).map(move |index| VarRef { block, index }))
        .collect()
}

/// A tensor field of type `(upper, lower)` with polynomial components in `x`.
pub fn random_tensor(dim: usize, upper: usize, lower: usize, seed: u64) -> TensorField {
    let mut r = rng(seed);
    let vars = block_vars(&[Block::Point(0)], dim);
    let comps = (0..dim.pow((upper + lower) as u32))
        .map(|_| random_poly(&mut r, &vars, 3))
        .collect();
    TensorField::new(dim, upper, lower, comps)
}

/// An `m`-point `k`-form with polynomial components in all point copies.
pub fn random_nonlinear(dim: usize, copies: usize, degree: usize, seed: u64) -> NonlinearForm {
    let mut r = rng(seed);
    let blocks: Vec<Block> = (0..copies as u8).map(Block::Point).collect();
    let vars = block_vars(&blocks, dim);
    let comps = (0..binomial(dim, degree))
        .map(|_| random_poly(&mut r, &vars, 3))
        .collect();
    NonlinearForm::new(dim, copies, degree, comps)
}

/// A seed for nonlinear invariant extension: components depend only on the
/// relative points in blocks `1..copies`.
pub fn random_relative_seed(dim: usize, copies: usize, degree: usize, seed: u64) -> NonlinearForm {
    let mut r = rng(seed);
    let blocks: Vec<Block> = (1..copies as u8).map(Block::Point).collect();
    let vars = block_vars(&blocks, dim);
    let comps = (0..binomial(dim, degree))
        .map(|_| random_poly(&mut r, &vars, 3))
        .collect();
    NonlinearForm::new(dim, copies, degree, comps)
}

/// A form over the tangent bundle. Linear forms are multilinear in the fiber
/// slots with polynomial coefficients in `x`; general ones are polynomials
/// in `x` and every fiber coordinate.
pub fn random_form_on_t(dim: usize, degree: usize, slots: &[SlotKind], linear: bool, seed: u64) -> FormOnT {
    let mut r = rng(seed);
    let xs = block_vars(&[Block::Point(0)], dim);
    let fibers: Vec<Block> = (0..slots.len() as u8).map(Block::Fiber).collect();
    let comps = (0..binomial(dim, degree))
        .map(|_| {
            if linear {
                Expr::sum((0..2).map(|_| {
                    let mut factors = vec![random_poly(&mut r, &xs, 2)];
                    for &b in &fibers {
                        factors.push(Expr::var(VarRef {
                            block: b,
                            index: r.gen_range(0..dim),
                        }));
                    }
                    Expr::product(factors)
                }))
            } else {
                let mut vars = xs.clone();
                vars.extend(block_vars(&fibers, dim));
                random_poly(&mut r, &vars, 4)
            }
        })
        .collect();
    FormOnT::new(dim, degree, slots.to_vec(), comps, linear)
}

/// A seed form over the tangent space at one point: multilinear with
/// constant coefficients when `linear`, otherwise a polynomial in the
/// fiber coordinates alone.
pub fn random_seed_on_t(dim: usize, degree: usize, slots: &[SlotKind], linear: bool, seed: u64) -> FormOnT {
    let mut r = rng(seed);
    let fibers: Vec<Block> = (0..slots.len() as u8).map(Block::Fiber).collect();
    let comps = (0..binomial(dim, degree))
        .map(|_| {
            if linear {
                Expr::sum((0..2).map(|_| {
                    let mut factors = vec![coefficient(&mut r)];
                    for &b in &fibers {
                        factors.push(Expr::var(VarRef {
                            block: b,
                            index: r.gen_range(0..dim),
                        }));
                    }
                    Expr::product(factors)
                }))
            } else {
                random_poly(&mut r, &block_vars(&fibers, dim), 3)
            }
        })
        .collect();
    FormOnT::new(dim, degree, slots.to_vec(), comps, linear)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_tensor(3, 1, 1, 7);
        let b = random_tensor(3, 1, 1, 7);
        let sa: Vec<String> = a.comps.iter().map(|e| e.to_string()).collect();
        let sb: Vec<String> = b.comps.iter().map(|e| e.to_string()).collect();
        assert_eq!(sa, sb);
        let c = random_tensor(3, 1, 1, 8);
        assert_ne!(sa, c.comps.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    }

    #[test]
    fn polynomial_degree_bounded() {
        let f = random_nonlinear(2, 2, 1, 3);
        for c in &f.comps {
            assert!(c
                .variables()
                .iter()
                .all(|v| matches!(v.block, Block::Point(0) | Block::Point(1))));
        }
    }
}
