//! Brute-force oracles shared by the integration suites. Nothing here calls
//! into the library's algorithms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

pub const REF_POWERS: [f64; 3] = [0.0, 2.0, 8.0];
pub const REF_P: [[f64; 3]; 3] = [[0.90, 0.08, 0.02], [0.10, 0.80, 0.10], [0.05, 0.15, 0.80]];
pub const REF_SIGNAL: f64 = 10.0;
pub const REF_NOISE: f64 = 1.0;
pub const REF_THETA: f64 = 1.0;

pub fn ref_chain() -> resilnet_core::MarkovChain {
    resilnet_core::MarkovChain::new(REF_POWERS.to_vec(), REF_P.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn ref_link() -> resilnet_core::LinkModel {
    resilnet_core::LinkModel::new(REF_SIGNAL, REF_NOISE, REF_THETA).unwrap()
}

/// Rayleigh per-unit success, straight from the closed form.
pub fn success(signal: f64, noise: f64, theta: f64, interference: f64) -> f64 {
    (-theta * (noise + interference) / signal).exp()
}

pub fn mixture_outage(weights: &[f64], powers: &[f64], n: u32, signal: f64, noise: f64, theta: f64) -> f64 {
    weights
        .iter()
        .zip(powers)
        .map(|(w, &i)| {
            let q = 1.0 - success(signal, noise, theta, i);
            let mut prod = 1.0;
            for _ in 0..n {
                prod *= q;
            }
            w * prod
        })
        .sum()
}

/// Linear scan for the smallest n meeting the target; `None` if none ≤ n_max.
pub fn scan_min_n(
    weights: &[f64],
    powers: &[f64],
    eps: f64,
    n_max: u32,
    signal: f64,
    noise: f64,
    theta: f64,
) -> Option<u32> {
    (1..=n_max).find(|&n| mixture_outage(weights, powers, n, signal, noise, theta) <= eps)
}

/// Stationary distribution by plain power iteration.
pub fn power_iteration(p: &[Vec<f64>], steps: usize) -> Vec<f64> {
    let k = p.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..steps {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += pi[i] * p[i][j];
            }
        }
        pi = next;
    }
    pi
}

/// Oracle per-state allocations for the reference scenario.
pub fn ref_oracle_ns(eps: f64) -> Vec<u32> {
    (0..3)
        .map(|s| {
            let mut w = [0.0; 3];
            w[s] = 1.0;
            scan_min_n(&w, &REF_POWERS, eps, 64, REF_SIGNAL, REF_NOISE, REF_THETA).unwrap()
        })
        .collect()
}

/// Allocation when the belief equals the true transition row of each state.
pub fn ref_true_row_ns(eps: f64) -> Vec<u32> {
    REF_P.iter().map(|row| scan_min_n(row, &REF_POWERS, eps, 64, REF_SIGNAL, REF_NOISE, REF_THETA).unwrap()).collect()
}

pub fn ref_stationary() -> Vec<f64> {
    power_iteration(&REF_P.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 5_000)
}

// ---- graphs -------------------------------------------------------------

pub fn adjacency(n: usize, edges: &[(u32, u32)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        adj[a as usize].insert(b as usize);
        adj[b as usize].insert(a as usize);
    }
    adj
}

/// Connected iff the alive nodes form one component (false when none alive).
pub fn alive_connected(adj: &[BTreeSet<usize>], alive: &[bool]) -> bool {
    let Some(start) = alive.iter().position(|&a| a) else {
        return false;
    };
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if alive[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..adj.len()).all(|v| !alive[v] || seen[v])
}

/// Smallest removal set (leaving ≥ 2 nodes) that disconnects; n−1 if none.
pub fn brute_vertex_connectivity(n: usize, edges: &[(u32, u32)]) -> usize {
    let adj = adjacency(n, edges);
    let mut best = n - 1;
    for mask in 0u32..(1 << n) {
        let removed = mask.count_ones() as usize;
        if removed >= best || n - removed < 2 {
            continue;
        }
        let alive: Vec<bool> = (0..n).map(|v| mask & (1 << v) == 0).collect();
        if !alive_connected(&adj, &alive) {
            best = removed;
        }
    }
    best
}

pub fn brute_articulation(n: usize, edges: &[(u32, u32)]) -> BTreeSet<u32> {
    let adj = adjacency(n, edges);
    (0..n)
        .filter(|&v| {
            let alive: Vec<bool> = (0..n).map(|u| u != v).collect();
            n > 1 && !alive_connected(&adj, &alive)
        })
        .map(|v| v as u32)
        .collect()
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in (a + 1)..n as u32 {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(u32, u32)> {
    let mut set: BTreeSet<(u32, u32)> = BTreeSet::new();
    for v in 1..n as u32 {
        let u = rng.gen_range(0..v);
        set.insert((u, v));
    }
    for (a, b) in random_graph(rng, n, density) {
        set.insert((a, b));
    }
    set.into_iter().collect()
}

/// Every simple path from s to t over allowed nodes.
pub fn all_simple_paths(adj: &[BTreeSet<usize>], allowed: &[bool], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn dfs(
        adj: &[BTreeSet<usize>],
        allowed: &[bool],
        v: usize,
        t: usize,
        path: &mut Vec<usize>,
        on: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &w in &adj[v] {
            if allowed[w] && !on[w] {
                on[w] = true;
                path.push(w);
                dfs(adj, allowed, w, t, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; adj.len()];
    on[s] = true;
    dfs(adj, allowed, s, t, &mut vec![s], &mut on, &mut out);
    out
}

/// Shortest avoiding path, lexicographically smallest on ties.
pub fn best_path_by_enumeration(adj: &[BTreeSet<usize>], allowed: &[bool], s: usize, t: usize) -> Option<Vec<usize>> {
    all_simple_paths(adj, allowed, s, t).into_iter().min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
}

// ---- traces -------------------------------------------------------------

/// Trapezoidal integral of `s` over sample indices `[a, k]`.
pub fn trapezoid(times: &[f64], values: &[f64], a: usize, k: usize) -> f64 {
    let mut acc = 0.0;
    for i in a..k {
        acc += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
    }
    acc
}

/// Random trace with at least one recovered dip: starts at 1, ends at 1.
pub fn random_trace<R: Rng>(rng: &mut R, len: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = 0.0;
    let mut times = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    for i in 0..len {
        times.push(t);
        t += rng.gen_range(0.1..2.0);
        let v = if i == 0 || i == len - 1 {
            1.0
        } else if i == 1 {
            rng.gen_range(0.0..0.99)
        } else {
            rng.gen_range(0.0..1.4)
        };
        values.push(v);
    }
    (times, values)
}
