//! Grouping of bonds into the ancilla qubits that mediate them.
//!
//! Group ids are handed out in order of first appearance along the bond list,
//! so the assignment is a pure function of the graph.

use std::collections::{BTreeSet, HashMap};

use super::{AncillaId, AncillaStrategy};
use crate::error::{Error, Result};

pub(crate) fn assign(
    n_sites: usize,
    pairs: &[(usize, usize)],
    strategy: AncillaStrategy,
) -> Result<Vec<AncillaId>> {
    let key_of: Vec<usize> = match strategy {
        AncillaStrategy::PerEdge => (0..pairs.len()).collect(),
        AncillaStrategy::KagomeTriangles => triangle_keys(n_sites, pairs)?,
        AncillaStrategy::LiebMidpoints => midpoint_keys(n_sites, pairs)?,
    };
    let mut ids = HashMap::new();
    Ok(key_of
        .into_iter()
        .map(|key| {
            let next = ids.len() as u32;
            AncillaId(*ids.entry(key).or_insert(next))
        })
        .collect())
}

fn adjacency(n_sites: usize, pairs: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n_sites];
    for &(a, b) in pairs {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    adj
}

/// Each bond is keyed by its triangle, or by itself when it lies on none.
fn triangle_keys(n_sites: usize, pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
    let fail = |reason: String| Error::IncompatibleStrategy {
        strategy: AncillaStrategy::KagomeTriangles.name(),
        reason,
    };
    let adj = adjacency(n_sites, pairs);
    let mut triangle_of = vec![None; pairs.len()];
    let mut n_triangles = 0;
    let index: HashMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| ((a.min(b), a.max(b)), i))
        .collect();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for &c in adj[a].intersection(&adj[b]) {
            let (lo, hi) = (a.min(b), a.max(b));
            if c < hi {
                continue; // count each triangle once, from its two lowest sites
            }
            let t = pairs.len() + n_triangles;
            n_triangles += 1;
            for e in [i, index[&(lo, c)], index[&(hi, c)]] {
                if triangle_of[e].replace(t).is_some() {
                    let (x, y) = pairs[e];
                    return Err(fail(format!("bond ({x}, {y}) lies on two triangles")));
                }
            }
        }
    }
    if n_triangles == 0 {
        return Err(fail("the graph has no triangles".into()));
    }
    Ok(triangle_of
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.unwrap_or(i))
        .collect())
}

/// Each bond is keyed by its endpoint on the midpoint sublattice: the side of
/// the bipartition on which no site has more than two bonds.
fn midpoint_keys(n_sites: usize, pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
    let fail = |reason: String| Error::IncompatibleStrategy {
        strategy: AncillaStrategy::LiebMidpoints.name(),
        reason,
    };
    let adj = adjacency(n_sites, pairs);
    let mut side = vec![None::<(usize, bool)>; n_sites];
    let mut components = 0;
    for root in 0..n_sites {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some((components, false));
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let (comp, s) = side[v].expect("visited");
            for &w in &adj[v] {
                match side[w] {
                    None => {
                        side[w] = Some((comp, !s));
                        stack.push(w);
                    }
                    Some((_, t)) if t == s => {
                        return Err(fail("the graph is not bipartite".into()));
                    }
                    Some(_) => {}
                }
            }
        }
        components += 1;
    }
    // Per component, prefer the side not holding the component's lowest site.
    let mut midpoint_side = vec![None; components];
    for (comp, slot) in midpoint_side.iter_mut().enumerate() {
        let light = |flag: bool| {
            (0..n_sites)
                .filter(|&v| side[v] == Some((comp, flag)))
                .all(|v| adj[v].len() <= 2)
        };
        *slot = if light(true) {
            Some(true)
        } else if light(false) {
            Some(false)
        } else {
            None
        };
    }
    pairs
        .iter()
        .map(|&(a, b)| {
            let (comp, sa) = side[a].expect("visited");
            match midpoint_side[comp] {
                Some(m) if sa == m => Ok(a),
                Some(_) => Ok(b),
                None => Err(fail(format!(
                    "no midpoint sublattice around bond ({a}, {b}): both sides have sites with more than two bonds"
                ))),
            }
        })
        .collect()
}
