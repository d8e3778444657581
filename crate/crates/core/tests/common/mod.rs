//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the crate's inference code:
//! report laws are re-typed from the published tables and posteriors are
//! computed by brute-force enumeration in plain probability space.

#![allow(dead_code)]

use statrs::distribution::{Beta, Continuous};

/// `P(a | r1)` of the cynical model, rows (friend, rival).
pub const CYNICAL_FRIEND: [f64; 3] = [0.0, 0.5, 0.5];
pub const CYNICAL_RIVAL: [f64; 3] = [0.5, 0.5, 0.0];

/// `P(a | r1)` for `q ~ Beta(12, 12)` as tabulated (exact rationals).
pub const BETA12_FRIEND: [f64; 3] = [0.14, 0.48, 0.38];
pub const BETA12_RIVAL: [f64; 3] = [0.38, 0.48, 0.14];

/// `P(a | q, friend)` as printed in the polynomial table.
pub fn friend_given_q(q: f64) -> [f64; 3] {
    [
        1.0 - 3.0 * q + 3.0 * q * q - q * q * q,
        3.0 * q - 5.0 * q * q + 2.0 * q * q * q,
        2.0 * q * q - q * q * q,
    ]
}

/// `P(a | q, rival)` as printed in the polynomial table.
pub fn rival_given_q(q: f64) -> [f64; 3] {
    [
        1.0 - q - q * q + q * q * q,
        q + q * q - 2.0 * q * q * q,
        q * q * q,
    ]
}

/// Distribution of the sum of two independent Bernoulli draws.
pub fn bernoulli_sum(p1: f64, p2: f64) -> [f64; 3] {
    [
        (1.0 - p1) * (1.0 - p2),
        p1 * (1.0 - p2) + (1.0 - p1) * p2,
        p1 * p2,
    ]
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// `E[g(q)]` for `q ~ Beta(alpha, beta)` by quadrature (needs alpha, beta ≥ 1).
pub fn beta_expectation(alpha: f64, beta: f64, g: impl Fn(f64) -> f64) -> f64 {
    let d = Beta::new(alpha, beta).unwrap();
    simpson(|q| g(q) * d.pdf(q), 0.0, 1.0, 20_000)
}

/// Direct (non-sequential) posterior over all `2^pool` configurations given
/// data `(suggested members, a)`, with prior uniform. `None` if the data
/// have zero probability under every configuration.
pub fn direct_posterior(pool: usize, data: &[(Vec<usize>, usize)], friend: [f64; 3], rival: [f64; 3]) -> Option<Vec<f64>> {
    let n = 1usize << pool;
    let mut w = vec![0.0; n];
    for (bits, wj) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for (s, a) in data {
            let friends = s.iter().filter(|&&i| bits >> i & 1 == 1).count();
            let f = friends as f64 / s.len() as f64;
            p *= f * friend[*a] + (1.0 - f) * rival[*a];
        }
        *wj = p;
    }
    let z: f64 = w.iter().sum();
    if z == 0.0 {
        return None;
    }
    Some(w.into_iter().map(|x| x / z).collect())
}

/// Shannon entropy in bits.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Table of `(mean, variance) -> (alpha, beta)` published for the quality sweep.
pub const SWEEP_TABLE: [((f64, f64), (f64, f64)); 9] = [
    ((0.25, 0.05), (0.6875, 2.0625)),
    ((0.25, 0.01), (4.4375, 13.3125)),
    ((0.25, 0.005), (9.125, 27.375)),
    ((0.5, 0.05), (2.0, 2.0)),
    ((0.5, 0.01), (12.0, 12.0)),
    ((0.5, 0.005), (24.5, 24.5)),
    ((0.75, 0.05), (2.0625, 0.6875)),
    ((0.75, 0.01), (13.3125, 4.4375)),
    ((0.75, 0.005), (27.375, 9.125)),
];

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}
