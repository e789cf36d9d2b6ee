//! Shared generators for the integration suites.
#![allow(dead_code)]

use quatdyn::{HMatrix, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Quaternion<f64>;

pub const GOLDEN: f64 = 0.6180339887;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cis(t: f64) -> Q {
    let a = 2.0 * std::f64::consts::PI * t;
    Q::new(a.cos(), a.sin(), 0.0, 0.0)
}

pub fn random_q(r: &mut impl Rng) -> Q {
    Q::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_unit_q(r: &mut impl Rng) -> Q {
    loop {
        let q = random_q(r);
        let n = q.norm();
        if n > 0.1 {
            return q.scale(&(1.0 / n));
        }
    }
}

pub fn random_matrix(n: usize, r: &mut impl Rng) -> HMatrix {
    HMatrix::from_fn(n, n, |_, _| random_q(r))
}

pub fn random_vector(n: usize, r: &mut impl Rng) -> Vec<Q> {
    (0..n).map(|_| random_q(r)).collect()
}

/// Random invertible matrix with condition number of Φ at most `max_cond`.
pub fn conjugator(n: usize, max_cond: f64, r: &mut impl Rng) -> HMatrix {
    loop {
        let t = HMatrix::from_fn(n, n, |i, j| if i == j { random_q(r) + Q::real(2.0) } else { random_q(r) });
        if t.condition_number() <= max_cond {
            return t;
        }
    }
}

/// Quaternionic unitary matrix from Gram-Schmidt on a random matrix.
pub fn unitary(n: usize, r: &mut impl Rng) -> HMatrix {
    let cols = quatdyn::projective::orthonormal_hbasis(&(0..n).map(|_| random_vector(n, r)).collect::<Vec<_>>(), 1e-12);
    assert_eq!(cols.len(), n);
    HMatrix::from_columns(&cols).unwrap()
}

pub fn conjugate(t: &HMatrix, g: &HMatrix) -> HMatrix {
    t.matmul(g).unwrap().matmul(&t.inverse().unwrap()).unwrap()
}

/// Direct sum of Jordan blocks `J(λ, k)`.
pub fn jordan_sum(blocks: &[(Q, usize)]) -> HMatrix {
    HMatrix::direct_sum(&blocks.iter().map(|&(l, k)| HMatrix::jordan_block(l, k)).collect::<Vec<_>>())
}

/// Partitions of `n` into positive parts, in nonincreasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Zero-based coordinates kept when the last vector of every block with
/// index in `dropped` is removed.
pub fn all_but_last_of(sizes: &[usize], dropped: &[usize]) -> Vec<usize> {
    let mut keep = Vec::new();
    let mut start = 0;
    for (b, &k) in sizes.iter().enumerate() {
        for i in start..start + k {
            if !(dropped.contains(&b) && i == start + k - 1) {
                keep.push(i);
            }
        }
        start += k;
    }
    keep
}

/// Unit phases used by the sweeps: trivial, a quarter turn, an irrational
/// surrogate, and a rotation in the `j` plane.
pub fn phases() -> [Q; 4] {
    let a = 2.0 * std::f64::consts::PI * GOLDEN;
    [Q::one(), cis(0.25), cis(GOLDEN), Q::new(a.cos(), 0.0, a.sin(), 0.0)]
}

/// Jordan shapes with `n + 1 ≤ max_n1`, each block given an eigenvalue of
/// modulus in `moduli` and a phase from [`phases`]. Assignments are drawn
/// from a seeded generator, `per_shape` per partition.
pub fn sweep(max_n1: usize, moduli: &[f64], per_shape: usize, seed: u64) -> Vec<Vec<(Q, usize)>> {
    let mut r = rng(seed);
    let ph = phases();
    let mut out = Vec::new();
    for n1 in 2..=max_n1 {
        for part in partitions(n1) {
            for _ in 0..per_shape {
                out.push(
                    part.iter()
                        .map(|&k| {
                            let m = moduli[r.gen_range(0..moduli.len())];
                            (ph[r.gen_range(0..ph.len())].scale(&m), k)
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

/// Forward limit kernel of a Jordan sum computed straight from the block
/// list: drop the last vector of each block whose `(log|λ|, size)` is
/// maximal.
pub fn expected_kernel(blocks: &[(Q, usize)], backward: bool) -> Vec<usize> {
    let sign = if backward { -1.0 } else { 1.0 };
    let key = |&(l, k): &(Q, usize)| (sign * l.norm().ln(), k);
    let best = blocks.iter().map(key).fold((f64::NEG_INFINITY, 0), |a, b| {
        if b.0 > a.0 + 1e-9 || ((b.0 - a.0).abs() <= 1e-9 && b.1 > a.1) {
            b
        } else {
            a
        }
    });
    let dropped: Vec<usize> = blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| {
            let k = key(b);
            (k.0 - best.0).abs() <= 1e-9 && k.1 == best.1
        })
        .map(|(i, _)| i)
        .collect();
    let sizes: Vec<usize> = blocks.iter().map(|b| b.1).collect();
    all_but_last_of(&sizes, &dropped)
}

/// Semisimple with all moduli equal, so unit after rescaling to
/// determinant one.
pub fn is_elliptic(blocks: &[(Q, usize)]) -> bool {
    let m = blocks[0].0.norm();
    blocks.iter().all(|&(l, k)| k == 1 && (l.norm() / m - 1.0).abs() < 1e-9)
}
