//! Rooted isomorphism of small balls by backtracking.

use crate::error::GraphError;
use crate::graph::{Ball, Graph, NodeId};

/// Largest ball accepted by the isomorphism search.
pub const MAX_BALL_NODES: usize = 40;

/// Whether `ball(g1, v1, r)` and `ball(g2, v2, r)` are isomorphic by a map
/// sending `v1` to `v2` and preserving distance from the center.
pub fn ball_isomorphic(g1: &Graph, v1: NodeId, g2: &Graph, v2: NodeId, r: usize) -> Result<bool, GraphError> {
    let b1 = g1.ball(v1, r)?;
    let b2 = g2.ball(v2, r)?;
    Ok(rooted_isomorphism(&b1, &b2)?.is_some())
}

/// A rooted, distance-preserving isomorphism from `b1` to `b2` as a map on
/// original node ids (`map[i]` is the image of `b1.nodes[i]`).
pub fn rooted_isomorphism(b1: &Ball, b2: &Ball) -> Result<Option<Vec<NodeId>>, GraphError> {
    for b in [b1, b2] {
        if b.nodes.len() > MAX_BALL_NODES {
            return Err(GraphError::BallTooLarge { size: b.nodes.len(), limit: MAX_BALL_NODES });
        }
    }
    let n = b1.nodes.len();
    if n != b2.nodes.len() || b1.graph.edge_count() != b2.graph.edge_count() {
        return Ok(None);
    }
    let sig = |b: &Ball, i: usize| (b.distances[i], b.graph.degree(i));
    let mut s1: Vec<_> = (0..n).map(|i| sig(b1, i)).collect();
    let mut s2: Vec<_> = (0..n).map(|i| sig(b2, i)).collect();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(None);
    }

    // map nodes in BFS layers so each new node has mapped neighbours
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (b1.distances[i], i));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[b1.center] = b2.center;
    used[b2.center] = true;
    if sig(b1, b1.center) != sig(b2, b2.center) {
        return Ok(None);
    }
    if extend(b1, b2, &order, 1, &mut map, &mut used) {
        Ok(Some(map.iter().map(|&j| b2.nodes[j]).collect()))
    } else {
        Ok(None)
    }
}

fn extend(b1: &Ball, b2: &Ball, order: &[usize], pos: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if pos == order.len() {
        return true;
    }
    let x = order[pos];
    for y in 0..b2.nodes.len() {
        if used[y] || b2.distances[y] != b1.distances[x] || b2.graph.degree(y) != b1.graph.degree(x) {
            continue;
        }
        let consistent = order[..pos].iter().all(|&p| b1.graph.has_edge(x, p) == b2.graph.has_edge(y, map[p]));
        if !consistent {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if extend(b1, b2, order, pos + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

/// Whether `f` (on original ids) restricted to `b1` is a rooted,
/// distance-preserving isomorphism onto `b2`.
pub fn is_rooted_isomorphism<F: Fn(NodeId) -> Option<NodeId>>(b1: &Ball, b2: &Ball, f: F) -> bool {
    if b1.nodes.len() != b2.nodes.len() {
        return false;
    }
    let mut local = Vec::with_capacity(b1.nodes.len());
    let mut hit = vec![false; b2.nodes.len()];
    for (i, &v) in b1.nodes.iter().enumerate() {
        let Some(j) = f(v).and_then(|w| b2.local(w)) else {
            return false;
        };
        if hit[j] || b2.distances[j] != b1.distances[i] {
            return false;
        }
        hit[j] = true;
        local.push(j);
    }
    if local[b1.center] != b2.center {
        return false;
    }
    let n = local.len();
    (0..n).all(|x| (x + 1..n).all(|y| b1.graph.has_edge(x, y) == b2.graph.has_edge(local[x], local[y])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflexive_and_degree_sensitive() {
        let k4 = Graph::complete(4);
        assert!(ball_isomorphic(&k4, 0, &k4, 2, 1).unwrap());
        let k3 = Graph::complete(3);
        assert!(!ball_isomorphic(&k3, 0, &k4, 0, 1).unwrap());
    }

    #[test]
    fn distance_layers_matter() {
        // star center vs leaf
        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!ball_isomorphic(&star, 0, &star, 1, 2).unwrap());
        assert!(ball_isomorphic(&star, 1, &star, 2, 2).unwrap());
    }

    #[test]
    fn rejects_large_balls() {
        let k = Graph::complete(41);
        assert!(matches!(ball_isomorphic(&k, 0, &k, 0, 1), Err(GraphError::BallTooLarge { .. })));
    }
}
