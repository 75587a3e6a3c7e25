use std::collections::VecDeque;

use super::{intersection_number, IntegralFlow, Side};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Disjoint connected branch sets, one per demand vertex, with one graph
/// edge per demand edge joining the corresponding sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchDecomposition {
    /// Sorted members of each branch set, indexed by demand vertex.
    pub branch_sets: Vec<Vec<usize>>,
    /// Witness edge per demand edge, oriented (in `C_i`, in `C_j`).
    pub witness_edges: Vec<(usize, usize)>,
}

impl BranchDecomposition {
    /// `i : members` per demand vertex, then `witness i j : x y` per demand
    /// edge.
    pub fn to_text(&self, demand_edges: &[(usize, usize)]) -> String {
        let mut out = String::new();
        for (i, set) in self.branch_sets.iter().enumerate() {
            let members: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{i} : {}\n", members.join(" ")));
        }
        for (&(i, j), &(x, y)) in demand_edges.iter().zip(&self.witness_edges) {
            out.push_str(&format!("witness {i} {j} : {x} {y}\n"));
        }
        out
    }
}

/// Builds an `H`-minor of `g` from an intersection-free integral flow over
/// a bipartite demand graph with minimum degree 2.
///
/// Left-side sets grow from their terminal along each routed path until the
/// path first touches a vertex used by another left vertex's paths; right
/// sets take what their paths cover outside the left sets. The result is
/// verified before it is returned.
pub fn extract_minor(g: &Graph, flow: &IntegralFlow) -> Result<BranchDecomposition> {
    let h = flow.demands();
    let sides = h
        .bipartition()
        .ok_or_else(|| Error::Precondition("minor extraction needs a bipartite demand graph".into()))?;
    let k = h.terminals().len();
    if let Some(i) = (0..k).find(|&i| h.degree(i) < 2) {
        return Err(Error::Precondition(format!(
            "demand vertex {i} has degree {} < 2",
            h.degree(i)
        )));
    }
    let inter = intersection_number(flow);
    if inter != 0 {
        return Err(Error::Precondition(format!(
            "flow has {inter} intersecting demand pairs"
        )));
    }
    let n = g.n();

    // paths oriented left -> right
    let oriented: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .zip(flow.paths())
        .map(|(&(a, _), p)| {
            let mut p = p.clone();
            if sides[a] == Side::Right {
                p.reverse();
            }
            p
        })
        .collect();
    let left_of = |e: usize| {
        let (a, b) = h.edges()[e];
        if sides[a] == Side::Left {
            (a, b)
        } else {
            (b, a)
        }
    };

    // owners[v]: left vertices whose V_r contains v
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, p) in oriented.iter().enumerate() {
        let (l, _) = left_of(e);
        for &v in p {
            if !owners[v].contains(&l) {
                owners[v].push(l);
            }
        }
    }

    const NONE: usize = usize::MAX;
    let mut member = vec![NONE; n];
    for (e, p) in oriented.iter().enumerate() {
        let (l, _) = left_of(e);
        for &v in p {
            if owners[v].iter().any(|&r| r != l) {
                break;
            }
            member[v] = l;
        }
    }
    for (e, p) in oriented.iter().enumerate() {
        let (_, r) = left_of(e);
        for &v in p {
            let taken = member[v];
            if taken == NONE {
                member[v] = r;
            } else if taken != r && sides[taken] == Side::Right {
                return Err(Error::Internal(format!(
                    "vertex {v} claimed by right-side sets {taken} and {r}"
                )));
            }
        }
    }

    let mut branch_sets = vec![Vec::new(); k];
    for (v, &m) in member.iter().enumerate() {
        if m != NONE {
            branch_sets[m].push(v);
        }
    }

    let mut witness_edges = Vec::with_capacity(h.edges().len());
    for (e, &(a, b)) in h.edges().iter().enumerate() {
        let path = &flow.paths()[e];
        let hit = path.windows(2).find_map(|w| {
            if member[w[0]] == a && member[w[1]] == b {
                Some((w[0], w[1]))
            } else if member[w[0]] == b && member[w[1]] == a {
                Some((w[1], w[0]))
            } else {
                None
            }
        });
        match hit {
            Some(edge) => witness_edges.push(edge),
            None => {
                return Err(Error::Internal(format!(
                    "no witness edge for demand edge ({a}, {b})"
                )))
            }
        }
    }

    let bd = BranchDecomposition {
        branch_sets,
        witness_edges,
    };
    verify_branch_decomposition(g, h.edges(), &bd).map_err(|msg| {
        Error::Internal(format!("extracted branch decomposition failed verification: {msg}"))
    })?;
    Ok(bd)
}

/// Checks the minor conditions from scratch: branch sets non-empty,
/// pairwise disjoint and connected in `g`; each witness edge is an edge of
/// `g` joining the branch sets of its demand edge.
pub fn verify_branch_decomposition(
    g: &Graph,
    demand_edges: &[(usize, usize)],
    bd: &BranchDecomposition,
) -> std::result::Result<(), String> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, set) in bd.branch_sets.iter().enumerate() {
        if set.is_empty() {
            return Err(format!("branch set {i} is empty"));
        }
        for &v in set {
            if v >= g.n() {
                return Err(format!("branch set {i} contains out-of-range vertex {v}"));
            }
            if owner[v] != usize::MAX {
                return Err(format!("vertex {v} lies in branch sets {} and {i}", owner[v]));
            }
            owner[v] = i;
        }
    }
    for (i, set) in bd.branch_sets.iter().enumerate() {
        let reached = bfs_within(g, set[0], &owner, i);
        if reached.iter().filter(|&&d| d != usize::MAX).count() != set.len() {
            return Err(format!("branch set {i} is not connected"));
        }
    }
    if bd.witness_edges.len() != demand_edges.len() {
        return Err("one witness edge per demand edge required".into());
    }
    for (&(a, b), &(x, y)) in demand_edges.iter().zip(&bd.witness_edges) {
        if x >= g.n() || y >= g.n() || !g.has_edge(x, y) {
            return Err(format!("witness ({x}, {y}) is not an edge"));
        }
        let ok = (owner[x] == a && owner[y] == b) || (owner[x] == b && owner[y] == a);
        if !ok {
            return Err(format!("witness ({x}, {y}) does not join sets {a} and {b}"));
        }
    }
    Ok(())
}

// BFS distances restricted to vertices with owner == tag; usize::MAX if unreached
fn bfs_within(g: &Graph, source: usize, owner: &[usize], tag: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if owner[w] == tag && dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist.into_iter()
        .enumerate()
        .map(|(v, d)| if owner[v] == tag { d } else { usize::MAX })
        .collect()
}

/// Diameter of the subgraph of `g` induced by `set`, in edges; `None` if it
/// is disconnected or empty.
pub fn branch_set_diameter(g: &Graph, set: &[usize]) -> Option<usize> {
    if set.is_empty() {
        return None;
    }
    let mut owner = vec![usize::MAX; g.n()];
    for &v in set {
        owner[v] = 0;
    }
    let mut diameter = 0;
    for &s in set {
        let dist = bfs_within(g, s, &owner, 0);
        for &v in set {
            if dist[v] == usize::MAX {
                return None;
            }
            diameter = diameter.max(dist[v]);
        }
    }
    Some(diameter)
}
