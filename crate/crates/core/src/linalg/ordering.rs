use std::collections::VecDeque;

use super::CsrMatrix;

/// Reverse Cuthill-McKee ordering of the (symmetric) pattern of `m`.
///
/// Returns `perm` with `perm[new] = old`. Each connected component is started
/// from a pseudo-peripheral node found by repeated BFS.
pub fn reverse_cuthill_mckee(m: &CsrMatrix) -> Vec<usize> {
    let n = m.nrows();
    let adj = |i: usize| m.row(i).map(|(j, _)| j).filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| adj(i).count()).collect();

    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut level = vec![usize::MAX; n];

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| degree[i])
            .unwrap();
        let start = pseudo_peripheral(seed, &adj, &degree, &mut level);

        let mut queue = VecDeque::new();
        queue.push_back(start);
        placed[start] = true;
        let mut nbrs = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adj(v).filter(|&w| !placed[w]));
            nbrs.sort_unstable_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral<'a, F, I>(
    seed: usize,
    adj: &F,
    degree: &[usize],
    level: &mut [usize],
) -> usize
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize> + 'a,
{
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (depth, last_level) = bfs_levels(current, adj, level);
        let candidate = last_level
            .into_iter()
            .min_by_key(|&v| degree[v])
            .unwrap_or(current);
        if depth <= ecc {
            break;
        }
        ecc = depth;
        current = candidate;
    }
    current
}

fn bfs_levels<'a, F, I>(start: usize, adj: &F, level: &mut [usize]) -> (usize, Vec<usize>)
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize> + 'a,
{
    let mut visited = vec![start];
    level[start] = 0;
    let mut frontier = vec![start];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for w in adj(v) {
                if level[w] == usize::MAX {
                    level[w] = depth + 1;
                    visited.push(w);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        frontier = next;
    }
    for v in visited {
        level[v] = usize::MAX;
    }
    (depth, frontier)
}

#[cfg(test)]
/// Half-bandwidth of `m` under `perm` (`perm[new] = old`).
pub(crate) fn bandwidth_under(m: &CsrMatrix, perm: &[usize]) -> usize {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut bw = 0;
    for i in 0..m.nrows() {
        for (j, _) in m.row(i) {
            bw = bw.max(inv[i].abs_diff(inv[j]));
        }
    }
    bw
}
