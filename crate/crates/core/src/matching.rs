//! Maximum bipartite matching on small multigraphs (augmenting paths).

use crate::error::{Error, Result};

/// An undirected multigraph that must be bipartite. Vertices are `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerGraph {
    vertices: u32,
    edges: Vec<(u32, u32)>,
    side: Vec<bool>,
}

impl LayerGraph {
    pub fn new(vertices: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        let side = two_color(vertices, &edges)?;
        Ok(LayerGraph { vertices, edges, side })
    }

    /// `size` disjoint edges on `2 * size` vertices.
    pub fn perfect_matching(size: u32) -> Self {
        Self::new(2 * size, (0..size).map(|i| (i, size + i)).collect()).expect("matching is bipartite")
    }

    pub fn vertices(&self) -> u32 {
        self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Endpoints of edge `e` ordered as (left, right).
    pub fn oriented(&self, e: usize) -> (u32, u32) {
        let (a, b) = self.edges[e];
        if self.side[a as usize] {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Edge indices of one maximum matching.
    pub fn max_matching(&self) -> Vec<usize> {
        let n = self.vertices as usize;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for e in 0..self.edges.len() {
            let (l, r) = self.oriented(e);
            adj[l as usize].push((r as usize, e));
        }
        let mut match_r: Vec<Option<(usize, usize)>> = vec![None; n];
        for l in (0..n).filter(|&v| !self.side[v]) {
            let mut seen = vec![false; n];
            augment(l, &adj, &mut match_r, &mut seen);
        }
        let mut out: Vec<usize> = match_r.into_iter().flatten().map(|(_, e)| e).collect();
        out.sort_unstable();
        out
    }

    pub fn matching_size(&self) -> usize {
        self.max_matching().len()
    }

    /// True iff the listed edges (with repetition) share no endpoint.
    pub fn is_matching(&self, edge_ids: &[usize]) -> bool {
        let mut used = vec![false; self.vertices as usize];
        for &e in edge_ids {
            let (a, b) = self.edges[e];
            if used[a as usize] || used[b as usize] {
                return false;
            }
            used[a as usize] = true;
            used[b as usize] = true;
        }
        true
    }
}

fn augment(l: usize, adj: &[Vec<(usize, usize)>], match_r: &mut [Option<(usize, usize)>], seen: &mut [bool]) -> bool {
    for &(r, e) in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let free = match match_r[r] {
            None => true,
            Some((other, _)) => augment(other, adj, match_r, seen),
        };
        if free {
            match_r[r] = Some((l, e));
            return true;
        }
    }
    false
}

fn two_color(vertices: u32, edges: &[(u32, u32)]) -> Result<Vec<bool>> {
    let n = vertices as usize;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= vertices || b >= vertices {
            return Err(Error::InvalidParameter(format!("edge ({a}, {b}) outside {vertices} vertices")));
        }
        if a == b {
            return Err(Error::NotBipartite(format!("self-loop at {a}")));
        }
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut color: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let c = color[v].expect("colored");
            for &w in &adj[v] {
                match color[w] {
                    None => {
                        color[w] = Some(!c);
                        stack.push(w);
                    }
                    Some(cw) if cw == c => {
                        return Err(Error::NotBipartite(format!("odd cycle through {v} and {w}")));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(color.into_iter().map(|c| c.unwrap_or(false)).collect())
}
