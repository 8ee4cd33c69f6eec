//! Seeded generators for fuzzing and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{build, LieAlgebroid};
use crate::cech::{ParityEdge, ParityGraph};
use crate::symcore::{Chart, RatExpr};

/// Deterministic generator; the same seed gives the same stream everywhere.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A polynomial in `vars` of total degree at most `max_degree` with small
/// integer coefficients, each monomial present with probability one half.
pub fn polynomial<R: Rng, S: AsRef<str>>(rng: &mut R, vars: &[S], max_degree: u32) -> RatExpr {
    let mut out = RatExpr::zero();
    for exps in monomials(vars.len(), max_degree) {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let c = rng.gen_range(-4i64..=4);
        if c == 0 {
            continue;
        }
        let mut term = RatExpr::int(c);
        for (v, &e) in vars.iter().zip(&exps) {
            term = &term * &RatExpr::var(v.as_ref()).pow(e);
        }
        out = &out + &term;
    }
    out
}

/// A quotient of two random polynomials with a nonzero denominator.
pub fn rational_function<R: Rng, S: AsRef<str>>(rng: &mut R, vars: &[S], max_degree: u32) -> RatExpr {
    let num = polynomial(rng, vars, max_degree);
    loop {
        let den = polynomial(rng, vars, max_degree);
        if let Ok(r) = num.try_div(&den) {
            return r;
        }
    }
}

fn monomials(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|m: Vec<u32>| {
                let used: u32 = m.iter().sum();
                (0..=max_degree - used).map(move |e| {
                    let mut next = m.clone();
                    next.push(e);
                    next
                })
            })
            .collect();
    }
    out
}

/// The cotangent algebroid of a random bivector on the plane. Every
/// bivector in dimension two is Poisson, so the result always validates.
pub fn plane_poisson<R: Rng>(rng: &mut R, max_degree: u32) -> LieAlgebroid {
    let chart = Chart::new(["x", "y"]).expect("valid names");
    let pi = polynomial(rng, chart.names(), max_degree);
    build::poisson_plane(&chart, pi).expect("plane bivectors are Poisson")
}

/// A random parity graph on at most `max_nodes` nodes.
pub fn parity_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> ParityGraph {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let m = rng.gen_range(0..=2 * n);
    let edges = (0..m)
        .map(|_| ParityEdge {
            a: rng.gen_range(0..n),
            b: rng.gen_range(0..n),
            parity: if rng.gen_bool(0.5) { 1 } else { -1 },
            label: None,
        })
        .collect();
    ParityGraph::new((0..n).map(|i| format!("U{i}")).collect(), edges).expect("indices are in range")
}
