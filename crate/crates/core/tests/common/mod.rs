//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's algorithms; only plain data goes in and out.

#![allow(dead_code, clippy::manual_contains, clippy::needless_range_loop)]

/// Value of a position in the naive game tree: `Some(r)` when Waiter can
/// force the goal in `r` more rounds, `None` when Client survives.
pub type NaiveValue = Option<u32>;

/// Edge `(u, v)` with `u < v` on `n` vertices, listed in the order
/// `(0,1), (0,2), (1,2), (0,3), …`.
pub fn edge_list(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for v in 1..n {
        for u in 0..v {
            out.push((u, v));
        }
    }
    out
}

fn subsets(n: u32, size: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, n: u32, left: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for x in start..n {
            if n - x < left {
                break;
            }
            acc.push(x);
            rec(x + 1, n, left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// All partitions of `0..n` into blocks of size `k`.
pub fn partitions(n: u32, k: u32) -> Vec<Vec<Vec<u32>>> {
    fn rec(rest: Vec<u32>, k: usize, acc: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = rest[0];
        let others = &rest[1..];
        for pick in subsets(others.len() as u32, k as u32 - 1) {
            let mut block = vec![first];
            block.extend(pick.iter().map(|&i| others[i as usize]));
            let left: Vec<u32> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| !pick.contains(&(*i as u32)))
                .map(|(_, &x)| x)
                .collect();
            acc.push(block);
            rec(left, k, acc, out);
            acc.pop();
        }
    }
    if k == 0 || !n.is_multiple_of(k) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec((0..n).collect(), k as usize, &mut Vec::new(), &mut out);
    out
}

fn position(edges: &[(u32, u32)], a: u32, b: u32) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    edges.iter().position(|&e| e == (a, b)).expect("edge exists")
}

/// Winning edge sets as bitmasks over [`edge_list`] positions. `factor` is
/// a `K_k`-factor goal, otherwise a single `K_k`.
pub fn goal_sets(n: u32, k: u32, factor: bool) -> Vec<u64> {
    let edges = edge_list(n);
    let clique_mask = |c: &[u32]| {
        let mut m = 0u64;
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                m |= 1 << position(&edges, a, b);
            }
        }
        m
    };
    if factor {
        partitions(n, k)
            .into_iter()
            .map(|p| p.iter().fold(0, |m, b| m | clique_mask(b)))
            .collect()
    } else {
        subsets(n, k).iter().map(|c| clique_mask(c)).collect()
    }
}

/// Plain recursive minimax without memoization or pruning.
pub fn naive_value(edges: u32, goals: &[u64], red: u64, blue: u64) -> NaiveValue {
    if goals.iter().any(|&g| g & red == g) {
        return Some(0);
    }
    let free: Vec<u32> = (0..edges).filter(|&i| (red | blue) >> i & 1 == 0).collect();
    if free.len() < 2 {
        return None;
    }
    let mut best: NaiveValue = None;
    for (i, &a) in free.iter().enumerate() {
        for &b in &free[i + 1..] {
            let (ma, mb) = (1u64 << a, 1u64 << b);
            let ra = naive_value(edges, goals, red | ma, blue | mb);
            let rb = naive_value(edges, goals, red | mb, blue | ma);
            // Client picks the reply that is worse for Waiter.
            let worst = match (ra, rb) {
                (Some(x), Some(y)) => Some(x.max(y) + 1),
                _ => None,
            };
            best = match (best, worst) {
                (None, w) => w,
                (Some(x), Some(y)) => Some(x.min(y)),
                (b, None) => b,
            };
        }
    }
    best
}

/// Whether the graph with adjacency test `adj` on `0..n` has a `K_k`-factor,
/// by trying every partition.
pub fn has_factor_brute(n: u32, k: u32, adj: &dyn Fn(u32, u32) -> bool) -> bool {
    partitions(n, k).iter().any(|p| {
        p.iter().all(|block| {
            block
                .iter()
                .enumerate()
                .all(|(i, &a)| block[i + 1..].iter().all(|&b| adj(a, b)))
        })
    })
}

/// Good pairs per vertex: for every triangle, credit the vertex opposite the
/// triangle's last edge.
pub fn good_pairs_by_triangles(k: usize, order: &[(u32, u32)]) -> Vec<usize> {
    let mut when = vec![vec![usize::MAX; k]; k];
    for (t, &(a, b)) in order.iter().enumerate() {
        when[a as usize][b as usize] = t;
        when[b as usize][a as usize] = t;
    }
    let mut counts = vec![0; k];
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let sides = [(when[b][c], a), (when[a][c], b), (when[a][b], c)];
                let last = sides.iter().max_by_key(|s| s.0).expect("three sides");
                counts[last.1] += 1;
            }
        }
    }
    counts
}

/// Component pairs per vertex by replaying the ordering with explicit
/// component labels: an edge inside a component credits every member.
pub fn component_pairs_by_labels(k: usize, order: &[(u32, u32)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..k).collect();
    let mut counts = vec![0; k];
    for &(a, b) in order {
        let (la, lb) = (label[a as usize], label[b as usize]);
        if la == lb {
            for v in 0..k {
                if label[v] == la {
                    counts[v] += 1;
                }
            }
        } else {
            for l in label.iter_mut() {
                if *l == lb {
                    *l = la;
                }
            }
        }
    }
    counts
}

/// A uniformly random ordering of the edges of `K_k` from a tiny xorshift
/// generator, so the oracle side does not share the library's sampler.
pub fn shuffled_edges(k: u32, seed: u64) -> Vec<(u32, u32)> {
    let mut edges = edge_list(k);
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    for i in (1..edges.len()).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let j = (s % (i as u64 + 1)) as usize;
        edges.swap(i, j);
    }
    edges
}

/// Every position on `K_n` with equal red and blue counts and at most
/// `max_claimed` claimed edges, as `(red, blue)` masks.
pub fn positions(n: u32, max_claimed: u32) -> Vec<(u64, u64)> {
    let e = edge_list(n).len() as u32;
    let mut out = Vec::new();
    let total = 3u64.pow(e);
    for code in 0..total {
        let (mut red, mut blue, mut c) = (0u64, 0u64, code);
        for i in 0..e {
            match c % 3 {
                1 => red |= 1 << i,
                2 => blue |= 1 << i,
                _ => {}
            }
            c /= 3;
        }
        let (r, b) = (red.count_ones(), blue.count_ones());
        if r == b && r + b <= max_claimed {
            out.push((red, blue));
        }
    }
    out
}

/// Random red edge list on `n` vertices from a seeded xorshift stream, with
/// edge probability `p_num / 16`, optionally with a planted `K_k`-factor.
pub fn random_red_edges(n: u32, k: u32, seed: u64, p_num: u64, plant: bool) -> Vec<(u32, u32)> {
    let mut s = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s
    };
    let mut edges: Vec<(u32, u32)> = edge_list(n).into_iter().filter(|_| next() % 16 < p_num).collect();
    if plant {
        let mut perm: Vec<u32> = (0..n).collect();
        for i in (1..perm.len()).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        for block in perm.chunks(k as usize) {
            for (i, &a) in block.iter().enumerate() {
                for &b in &block[i + 1..] {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        // knock one planted edge back out half the time
        if next() % 2 == 0 {
            let (a, b) = (perm[0].min(perm[1]), perm[0].max(perm[1]));
            edges.retain(|&e| e != (a, b));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Every `(ys, zs)` with `1 ≤ y_i ≤ cap` and `1 ≤ z_i ≤ i + 1`, for
/// `k − 1` entries of `ys` and `k − 2` of `zs`.
pub fn z_vectors(k: u32, cap: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    let m = (k - 1) as usize;
    let mut out = Vec::new();
    let mut ys = vec![1u32; m];
    loop {
        let mut zs = vec![1u32; m - 1];
        loop {
            out.push((ys.clone(), zs.clone()));
            let mut i = 0;
            while i < zs.len() {
                if zs[i] < i as u32 + 2 {
                    zs[i] += 1;
                    break;
                }
                zs[i] = 1;
                i += 1;
            }
            if i == zs.len() {
                break;
            }
        }
        let mut i = 0;
        while i < m {
            if ys[i] < cap {
                ys[i] += 1;
                break;
            }
            ys[i] = 1;
            i += 1;
        }
        if i == m {
            return out;
        }
    }
}

/// Component pairs per vertex from a union-find replay: an edge whose
/// endpoints already share a root credits every vertex under that root.
pub fn component_pairs_by_union_find(k: usize, order: &[(u32, u32)]) -> Vec<usize> {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..k).collect();
    let mut counts = vec![0; k];
    for &(a, b) in order {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra == rb {
            for v in 0..k {
                if find(&mut parent, v) == ra {
                    counts[v] += 1;
                }
            }
        } else {
            parent[rb] = ra;
        }
    }
    counts
}
