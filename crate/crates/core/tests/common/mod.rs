//! Fixtures and independent oracles shared by the integration tests. None of
//! the oracles call into the library beyond building graphs.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use flowspec::graph::{generate, Family, Graph};
use flowspec::integral::{DemandGraph, IntegralFlow, Side};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph: a random recursive tree plus extra edges.
pub fn random_connected(n: usize, extra_p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(extra_p) {
                edges.insert((u, v));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Graph::from_edges(n, edges).expect("tree plus edges is connected")
}

/// `count` random connected graphs with `3 ≤ n ≤ 12`.
pub fn corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=12);
            let p = rng.random_range(0.05..0.5);
            random_connected(n, p, &mut rng)
        })
        .collect()
}

/// Named graphs with at most six vertices.
pub fn small_fixtures() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    let mut add = |name: String, f: Family| out.push((name, generate(&f).unwrap()));
    for n in 3..=6 {
        add(format!("path{n}"), Family::Path { n });
        add(format!("complete{n}"), Family::Complete { n });
    }
    for n in 4..=6 {
        add(format!("cycle{n}"), Family::Cycle { n });
    }
    for leaves in 3..=5 {
        add(format!("star{leaves}"), Family::Star { leaves });
    }
    add("grid2d(2)".into(), Family::Grid2d { side: 2 });
    out
}

/// All simple paths from `a` to `b`.
pub fn simple_paths(g: &Graph, a: usize, b: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, b: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == b {
            out.push(path.clone());
            return;
        }
        for &w in g.neighbors(u) {
            if !on[w] {
                on[w] = true;
                path.push(w);
                walk(g, b, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    on[a] = true;
    let mut out = Vec::new();
    walk(g, b, &mut vec![a], &mut on, &mut out);
    out
}

fn project_simplex(x: &mut [f64]) {
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Bracket `[lower, upper]` on `min con₂` from an explicit-path convex solve.
pub struct OracleBracket {
    pub lower: f64,
    pub upper: f64,
}

/// Minimizes `Σ_v c_v²` over path weights on the product of per-pair
/// simplices with accelerated projected gradient, then brackets the
/// optimum: `‖c‖` of the iterate from above and `Λ_s` at `s = c/‖c‖`,
/// evaluated by path enumeration, from below.
pub fn brute_force_con2(g: &Graph, rel_width: f64, max_iters: usize) -> OracleBracket {
    let n = g.n();
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            blocks.push(simple_paths(g, a, b));
        }
    }
    let load = |x: &[Vec<f64>]| {
        let mut c = vec![0.0; n];
        for (paths, w) in blocks.iter().zip(x) {
            for (p, &wp) in paths.iter().zip(w) {
                for &v in p {
                    c[v] += wp;
                }
            }
        }
        c
    };
    let bracket = |x: &[Vec<f64>]| {
        let c = load(x);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let lower: f64 = blocks
            .iter()
            .map(|paths| {
                paths
                    .iter()
                    .map(|p| p.iter().map(|&v| c[v] / norm).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        OracleBracket { lower, upper: norm }
    };
    // The gradient of Σc² is 2‖A‖²-Lipschitz for the vertex-path incidence
    // A, and ‖A‖² ≤ (max column sum)(max row sum).
    let mut row = vec![0.0f64; n];
    let mut max_col = 0.0f64;
    for paths in &blocks {
        for p in paths {
            max_col = max_col.max(p.len() as f64);
            for &v in p {
                row[v] += 1.0;
            }
        }
    }
    let lip = 2.0 * max_col * row.iter().cloned().fold(0.0, f64::max);
    let mut x: Vec<Vec<f64>> = blocks.iter().map(|p| vec![1.0 / p.len() as f64; p.len()]).collect();
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = bracket(&x);
    for it in 0..max_iters {
        let c = load(&y);
        let mut next = y.clone();
        for ((paths, w), yw) in blocks.iter().zip(next.iter_mut()).zip(&y) {
            for ((p, wp), &yp) in paths.iter().zip(w.iter_mut()).zip(yw) {
                let grad: f64 = 2.0 * p.iter().map(|&v| c[v]).sum::<f64>();
                *wp = yp - grad / lip;
            }
            project_simplex(w);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        for ((yw, nw), xw) in y.iter_mut().zip(&next).zip(&x) {
            for ((yp, &np), &xp) in yw.iter_mut().zip(nw).zip(xw) {
                *yp = np + beta * (np - xp);
            }
        }
        x = next;
        t = t_next;
        if it % 50 == 0 {
            let b = bracket(&x);
            if b.upper < best.upper {
                best.upper = b.upper;
            }
            if b.lower > best.lower {
                best.lower = b.lower;
            }
            if best.upper - best.lower <= rel_width * best.upper {
                break;
            }
        }
    }
    best
}

/// Vertex-weighted all-pairs distances by Floyd–Warshall.
pub fn floyd_vertex_metric(g: &Graph, s: &[f64]) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for u in 0..n {
        d[u][u] = s[u];
        for &v in g.neighbors(u) {
            d[u][v] = s[u] + s[v];
        }
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                let via = d[u][w] + d[w][v] - s[w];
                if via < d[u][v] {
                    d[u][v] = via;
                }
            }
        }
    }
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0.0;
    }
    d
}

/// Hop distances by BFS from every vertex.
pub fn hop_table(g: &Graph) -> Vec<Vec<f64>> {
    (0..g.n())
        .map(|a| {
            let mut d = vec![f64::INFINITY; g.n()];
            d[a] = 0.0;
            let mut queue = VecDeque::from([a]);
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if d[w].is_infinite() {
                        d[w] = d[u] + 1.0;
                        queue.push_back(w);
                    }
                }
            }
            d
        })
        .collect()
}

/// Vertex loads of one path per demand.
pub fn integral_loads(n: usize, paths: &[Vec<usize>]) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for p in paths {
        for &v in p {
            c[v] += 1;
        }
    }
    c
}

/// Pairs of demand edges with four distinct endpoints whose paths meet.
pub fn brute_inter(edges: &[(usize, usize)], paths: &[Vec<usize>]) -> u64 {
    let mut count = 0;
    for e in 0..edges.len() {
        for f in e + 1..edges.len() {
            let (a, b) = edges[e];
            let (c, d) = edges[f];
            let ends: HashSet<usize> = [a, b, c, d].into_iter().collect();
            if ends.len() < 4 {
                continue;
            }
            let on: HashSet<usize> = paths[e].iter().copied().collect();
            if paths[f].iter().any(|v| on.contains(v)) {
                count += 1;
            }
        }
    }
    count
}

/// Shortest path by BFS with neighbours scanned in index order.
pub fn bfs_path(g: &Graph, a: usize, b: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; g.n()];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        let mut nb: Vec<usize> = g.neighbors(u).to_vec();
        nb.sort_unstable();
        for w in nb {
            if prev[w] == usize::MAX {
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![b];
    while *path.last().unwrap() != a {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    path
}

/// `K₆` demands on six boundary vertices of a 6×6 grid, routed along
/// BFS shortest paths.
pub fn k6_in_grid() -> (Graph, IntegralFlow) {
    let g = generate(&Family::Grid2d { side: 6 }).unwrap();
    let terminals = vec![0, 3, 5, 18, 30, 35];
    let h = DemandGraph::complete(terminals.clone()).unwrap();
    let paths = h
        .edges()
        .iter()
        .map(|&(i, j)| bfs_path(&g, terminals[i], terminals[j]))
        .collect();
    let flow = IntegralFlow::new(&g, h, paths).unwrap();
    (g, flow)
}

/// Star `K_{1,4}` with demands {1,2} and {3,4} routed through the centre.
pub fn star_fixture() -> (Graph, IntegralFlow) {
    let g = generate(&Family::Star { leaves: 4 }).unwrap();
    let h = DemandGraph::new(vec![1, 2, 3, 4], vec![(0, 1), (2, 3)]).unwrap();
    let flow = IntegralFlow::new(&g, h, vec![vec![1, 0, 2], vec![3, 0, 4]]).unwrap();
    (g, flow)
}

/// `K_{2,2}` routed along the boundary of the 4×4 grid.
pub fn grid_k22() -> (Graph, IntegralFlow) {
    let g = generate(&Family::Grid2d { side: 4 }).unwrap();
    let h = DemandGraph::bipartite(
        vec![0, 3, 15, 12],
        vec![Side::Left, Side::Right, Side::Left, Side::Right],
        vec![(0, 1), (0, 3), (2, 1), (2, 3)],
    )
    .unwrap();
    let paths = vec![
        vec![0, 1, 2, 3],
        vec![0, 4, 8, 12],
        vec![15, 11, 7, 3],
        vec![15, 14, 13, 12],
    ];
    let flow = IntegralFlow::new(&g, h, paths).unwrap();
    (g, flow)
}

/// Random bipartite demand graph of minimum degree 2, realised in a graph
/// built from one random tree per demand vertex and one private connector
/// path per demand edge, plus a few random chords. Each demand edge is
/// routed through its own trees and connector, so paths of demand edges
/// with four distinct endpoints never meet.
pub fn intersection_free_fixture(seed: u64) -> (Graph, IntegralFlow) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a = rng.random_range(2..=4);
        let b = rng.random_range(2..=4);
        let mut h_edges: Vec<(usize, usize)> = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))).collect();
        h_edges.shuffle(&mut rng);
        let mut deg = vec![0usize; a + b];
        h_edges.iter().for_each(|&(i, j)| {
            deg[i] += 1;
            deg[j] += 1;
        });
        let mut kept = Vec::new();
        for (i, j) in h_edges {
            if deg[i] > 2 && deg[j] > 2 && rng.random_bool(0.4) {
                deg[i] -= 1;
                deg[j] -= 1;
            } else {
                kept.push((i, j));
            }
        }
        let k = a + b;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut next = 0usize;
        // Tree per demand vertex; vertex 0 of each tree is the terminal.
        let mut trees: Vec<(Vec<usize>, Vec<usize>)> = Vec::new(); // (members, parent)
        for _ in 0..k {
            let size = rng.random_range(1..=4);
            let members: Vec<usize> = (next..next + size).collect();
            next += size;
            let mut parent = vec![usize::MAX; size];
            for t in 1..size {
                parent[t] = rng.random_range(0..t);
                edges.push((members[parent[t]], members[t]));
            }
            trees.push((members, parent));
        }
        let root_path = |tree: &(Vec<usize>, Vec<usize>), mut t: usize| {
            let mut p = vec![tree.0[t]];
            while t != 0 {
                t = tree.1[t];
                p.push(tree.0[t]);
            }
            p.reverse();
            p
        };
        let mut paths = Vec::new();
        for &(i, j) in &kept {
            let ti = rng.random_range(0..trees[i].0.len());
            let tj = rng.random_range(0..trees[j].0.len());
            let len = rng.random_range(0..=3);
            let connector: Vec<usize> = (next..next + len).collect();
            next += len;
            let mut path = root_path(&trees[i], ti);
            path.extend(&connector);
            let mut tail = root_path(&trees[j], tj);
            tail.reverse();
            path.extend(tail);
            for w in path.windows(2) {
                edges.push((w[0].min(w[1]), w[0].max(w[1])));
            }
            paths.push(path);
        }
        for _ in 0..rng.random_range(0..=3) {
            let u = rng.random_range(0..next);
            let v = rng.random_range(0..next);
            if u != v {
                edges.push((u.min(v), u.max(v)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let Ok(g) = Graph::from_edges(next, edges) else {
            continue;
        };
        let terminals = trees.iter().map(|t| t.0[0]).collect();
        let sides = (0..k).map(|i| if i < a { Side::Left } else { Side::Right }).collect();
        let h = DemandGraph::bipartite(terminals, sides, kept).unwrap();
        let flow = IntegralFlow::new(&g, h, paths).unwrap();
        return (g, flow);
    }
}

/// Connectivity, disjointness and witness edges of branch sets, checked
/// from scratch.
pub fn check_minor(
    g: &Graph,
    demand_edges: &[(usize, usize)],
    sets: &[Vec<usize>],
    witnesses: &[(usize, usize)],
) -> Result<(), String> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(format!("branch set {i} is empty"));
        }
        for &v in set {
            if owner[v] != usize::MAX {
                return Err(format!("vertex {v} in sets {} and {i}", owner[v]));
            }
            owner[v] = i;
        }
    }
    for (i, set) in sets.iter().enumerate() {
        let mut seen = HashSet::from([set[0]]);
        let mut queue = VecDeque::from([set[0]]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if owner[w] == i && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != set.len() {
            return Err(format!("branch set {i} is not connected"));
        }
    }
    if witnesses.len() != demand_edges.len() {
        return Err("one witness per demand edge required".into());
    }
    for (&(i, j), &(x, y)) in demand_edges.iter().zip(witnesses) {
        if !g.neighbors(x).contains(&y) {
            return Err(format!("witness ({x}, {y}) is not an edge"));
        }
        let ok = (owner[x] == i && owner[y] == j) || (owner[x] == j && owner[y] == i);
        if !ok {
            return Err(format!("witness ({x}, {y}) does not join sets {i} and {j}"));
        }
    }
    Ok(())
}
