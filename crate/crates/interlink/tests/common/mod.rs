//! Shared oracles for the integration suites. Everything here is written
//! straight from definitions, independent of the library's code paths.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A small positive digraph as plain edge triples.
#[derive(Debug, Clone)]
pub struct TinyGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Enumerate all set partitions of `n` elements as restricted growth
/// strings (module of element 0 is always 0).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(current: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for value in 0..=max_used + 1 {
            current[pos] = value;
            rec(current, pos + 1, max_used.max(value), out);
        }
    }
    if n == 0 {
        return out;
    }
    rec(&mut current, 1, 0, &mut out);
    out
}

/// Stationary visit rates by dense fixed-point iteration (reference path).
pub fn reference_visit_rates(g: &TinyGraph, teleport: f64) -> Vec<f64> {
    let n = g.n;
    let mut weights = vec![vec![0.0; n]; n];
    for &(s, t, w) in &g.edges {
        weights[s][t] += w;
    }
    let mut transition = vec![vec![0.0; n]; n];
    let mut dangling = vec![false; n];
    for i in 0..n {
        let total: f64 = weights[i].iter().sum();
        if total == 0.0 {
            dangling[i] = true;
        } else {
            for j in 0..n {
                transition[i][j] = weights[i][j] / total;
            }
        }
    }
    let u = 1.0 / n as f64;
    let mut p = vec![u; n];
    for _ in 0..200_000 {
        let dangling_mass: f64 = (0..n).filter(|&i| dangling[i]).map(|i| p[i]).sum();
        let mut next = vec![(1.0 - teleport) * dangling_mass * u + teleport * u; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += (1.0 - teleport) * p[i] * transition[i][j];
            }
        }
        let residual: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if residual < 1e-15 {
            break;
        }
    }
    p
}

/// Stationary visit rates by direct linear solve of the one-step operator
/// (Gaussian elimination with partial pivoting; the normalization row
/// replaces the last equation).
pub fn linear_solve_visit_rates(g: &TinyGraph, teleport: f64) -> Vec<f64> {
    let n = g.n;
    let mut weights = vec![vec![0.0; n]; n];
    for &(s, t, w) in &g.edges {
        weights[s][t] += w;
    }
    let u = 1.0 / n as f64;
    // one-step operator: next[j] = sum_i A[j][i] p[i]
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        let total: f64 = weights[i].iter().sum();
        for j in 0..n {
            let follow = if total == 0.0 {
                u
            } else {
                weights[i][j] / total
            };
            a[j][i] = (1.0 - teleport) * follow + teleport * u;
        }
    }
    // (A - I) p = 0 with sum(p) = 1
    let mut m = vec![vec![0.0; n + 1]; n];
    for j in 0..n {
        for i in 0..n {
            m[j][i] = a[j][i] - if i == j { 1.0 } else { 0.0 };
        }
        m[j][n] = 0.0;
    }
    for i in 0..n {
        m[n - 1][i] = 1.0;
    }
    m[n - 1][n] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| m[r1][col].abs().partial_cmp(&m[r2][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        let pivot_value = m[col][col];
        assert!(pivot_value.abs() > 1e-14, "singular stationary system");
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col] / pivot_value;
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

fn entropy(dist: &[f64]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &x in dist {
        if x > 0.0 {
            let share = x / total;
            h -= share * share.log2();
        }
    }
    h
}

/// Two-level map equation evaluated literally from its definition:
/// q * H(exit distribution) + sum_m (p_m + q_m) * H(within-module
/// distribution), with recorded teleportation.
pub fn reference_codelength(
    g: &TinyGraph,
    teleport: f64,
    visit: &[f64],
    assignment: &[usize],
) -> f64 {
    let n = g.n;
    let modules = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut weights = vec![vec![0.0; n]; n];
    for &(s, t, w) in &g.edges {
        weights[s][t] += w;
    }
    let mut transition = vec![vec![0.0; n]; n];
    let mut dangling = vec![false; n];
    for i in 0..n {
        let total: f64 = weights[i].iter().sum();
        if total == 0.0 {
            dangling[i] = true;
        } else {
            for j in 0..n {
                transition[i][j] = weights[i][j] / total;
            }
        }
    }

    let nf = n as f64;
    let mut exit = vec![0.0; modules];
    for i in 0..n {
        let m = assignment[i];
        let module_size = assignment.iter().filter(|&&x| x == m).count() as f64;
        let outside_edges: f64 = (0..n)
            .filter(|&j| assignment[j] != m)
            .map(|j| transition[i][j])
            .sum();
        let spread = if dangling[i] { 1.0 } else { 0.0 };
        let outside_share = (nf - module_size) / nf;
        exit[m] += visit[i]
            * ((1.0 - teleport) * (outside_edges + spread * outside_share)
                + teleport * outside_share);
    }

    let q: f64 = exit.iter().sum();
    let mut length = q * entropy(&exit);
    for m in 0..modules {
        let mut within: Vec<f64> = vec![exit[m]];
        for i in 0..n {
            if assignment[i] == m {
                within.push(visit[i]);
            }
        }
        let total: f64 = within.iter().sum();
        length += total * entropy(&within);
    }
    length
}

/// Exhaustive minimum codelength over all partitions, via the reference
/// evaluator. Returns (codelength, argmin assignment).
pub fn brute_force_minimum(g: &TinyGraph, teleport: f64) -> (f64, Vec<usize>) {
    let visit = reference_visit_rates(g, teleport);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for partition in all_partitions(g.n) {
        let length = reference_codelength(g, teleport, &visit, &partition);
        if best.as_ref().is_none_or(|(b, _)| length < *b) {
            best = Some((length, partition));
        }
    }
    best.expect("at least one partition")
}

/// Seeded random positive digraph with no isolated node (every node gets at
/// least one outgoing edge; extra edges at the given density).
pub fn random_positive_digraph(seed: u64, n: usize, density: f64) -> TinyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for i in 0..n {
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        present[i][j] = true;
        edges.push((i, j, rng.gen_range(0.1..1.0)));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !present[i][j] && rng.gen_bool(density) {
                edges.push((i, j, rng.gen_range(0.1..1.0)));
            }
        }
    }
    TinyGraph { n, edges }
}

/// Pearson correlation (duplicated here so test oracles do not depend on
/// the library's estimator).
pub fn pearson_reference(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Two-sided permutation p-value: the share of shuffles whose |r| meets or
/// exceeds the observed |r| (with the +1 correction for the identity).
pub fn permutation_p_value(xs: &[f64], ys: &[f64], shuffles: usize, seed: u64) -> f64 {
    use rand::seq::SliceRandom;
    let observed = pearson_reference(xs, ys).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled: Vec<f64> = ys.to_vec();
    let mut hits = 0usize;
    for _ in 0..shuffles {
        shuffled.shuffle(&mut rng);
        if pearson_reference(xs, &shuffled).abs() >= observed {
            hits += 1;
        }
    }
    (hits + 1) as f64 / (shuffles + 1) as f64
}

/// Canonical form of a partition (modules relabeled by first appearance),
/// for comparisons up to relabeling.
pub fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::BTreeMap::new();
    let mut next = 0;
    assignment
        .iter()
        .map(|&m| {
            *map.entry(m).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}
