//! Latent projection of unrolled graphs.
//!
//! Dropped nodes are projected out so that the result preserves all
//! d-separation statements over the kept nodes: a directed edge i -> j
//! appears when i reaches j through dropped nodes only, and a bidirected
//! edge i <-> j appears when some dropped node reaches both i and j through
//! dropped nodes only. Bidirected edges of the input act as a shared hidden
//! parent of their two endpoints.

use super::unrolled::{NodeSet, UnrolledGraph};
use super::GraphError;

impl UnrolledGraph {
    /// Project the graph onto `keep`, marginalizing out every other node.
    pub fn marginalize(&self, keep: &NodeSet) -> Result<UnrolledGraph, GraphError> {
        for &n in keep {
            if !self.contains(n) {
                return Err(GraphError::KeepOutsideGraph(self.render_node(n)));
            }
        }
        let n = self.components().len() * self.window();
        let mut kept = vec![false; n];
        for &node in keep {
            kept[self.idx(node)] = true;
        }

        // Kept nodes reachable from `start` by a directed path whose
        // intermediate nodes are all dropped. `start` itself is not included.
        let reach_kept = |start: usize| -> Vec<usize> {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            let mut out = Vec::new();
            while let Some(v) = stack.pop() {
                for c in self.children_of(self.node(v)) {
                    let ci = self.idx(c);
                    if seen[ci] {
                        continue;
                    }
                    seen[ci] = true;
                    if kept[ci] {
                        out.push(ci);
                    } else {
                        stack.push(ci);
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
            out
        };

        let mut projected =
            UnrolledGraph::from_edges(self.components().to_vec(), self.window(), &[], &[]);
        for i in 0..n {
            if !kept[i] {
                projected.deactivate(i);
            }
        }

        // Directed part: direct edges between kept nodes, plus paths through
        // dropped nodes.
        for node in self.nodes() {
            let i = self.idx(node);
            if !kept[i] {
                continue;
            }
            for c in self.children_of(node) {
                let ci = self.idx(c);
                if kept[ci] {
                    projected.add_directed_idx(i, ci);
                } else {
                    for j in reach_kept(ci) {
                        if j != i {
                            projected.add_directed_idx(i, j);
                        }
                    }
                }
            }
        }

        // Bidirected part, clause A: a dropped node with dropped-only
        // directed paths to two kept nodes confounds them.
        for node in self.nodes() {
            let u = self.idx(node);
            if kept[u] {
                continue;
            }
            let targets = reach_kept(u);
            for (a, &i) in targets.iter().enumerate() {
                for &j in targets.iter().skip(a + 1) {
                    projected.add_bidirected_idx(i, j);
                }
            }
        }

        // Bidirected part, clause B: an input bidirected edge stands for a
        // hidden common parent of its endpoints; each endpoint contributes
        // itself when kept, or its dropped-only reachable kept set otherwise.
        let endpoint_set = |v: usize| -> Vec<usize> {
            if kept[v] {
                vec![v]
            } else {
                reach_kept(v)
            }
        };
        for (a, b) in self.bidirected_edges() {
            let (ai, bi) = (self.idx(a), self.idx(b));
            for &i in &endpoint_set(ai) {
                for &j in &endpoint_set(bi) {
                    if i != j {
                        projected.add_bidirected_idx(i, j);
                    }
                }
            }
        }

        projected.renormalize();
        Ok(projected)
    }

    /// Drop every latent component's nodes, keeping all observed nodes.
    pub fn marginalize_to_observed(&self) -> Result<UnrolledGraph, GraphError> {
        let keep: NodeSet = self
            .nodes()
            .filter(|node| self.components()[node.comp].observed)
            .collect();
        self.marginalize(&keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Component, NodeId, RolledTimeGraph};

    fn chain_graph() -> UnrolledGraph {
        // A -> L -> B
        UnrolledGraph::from_edges(
            vec![
                Component::observed("A"),
                Component::latent("L"),
                Component::observed("B"),
            ],
            1,
            &[
                (NodeId::new(0, 0), NodeId::new(0, 1)),
                (NodeId::new(0, 1), NodeId::new(0, 2)),
            ],
            &[],
        )
    }

    #[test]
    fn chain_through_dropped_becomes_direct() {
        let g = chain_graph();
        let keep: NodeSet = [NodeId::new(0, 0), NodeId::new(0, 2)].into_iter().collect();
        let m = g.marginalize(&keep).unwrap();
        assert_eq!(m.directed_edges(), vec![(NodeId::new(0, 0), NodeId::new(0, 2))]);
        assert!(m.bidirected_edges().is_empty());
        assert_eq!(m.num_active_nodes(), 2);
    }

    #[test]
    fn fork_through_dropped_becomes_bidirected() {
        // A <- L -> B
        let g = UnrolledGraph::from_edges(
            vec![
                Component::observed("A"),
                Component::latent("L"),
                Component::observed("B"),
            ],
            1,
            &[
                (NodeId::new(0, 1), NodeId::new(0, 0)),
                (NodeId::new(0, 1), NodeId::new(0, 2)),
            ],
            &[],
        );
        let keep: NodeSet = [NodeId::new(0, 0), NodeId::new(0, 2)].into_iter().collect();
        let m = g.marginalize(&keep).unwrap();
        assert!(m.directed_edges().is_empty());
        assert_eq!(m.bidirected_edges(), vec![(NodeId::new(0, 0), NodeId::new(0, 2))]);
    }

    #[test]
    fn keeping_all_nodes_is_identity() {
        let mut rolled = RolledTimeGraph::new(vec![
            Component::observed("W"),
            Component::observed("P"),
            Component::observed("D"),
        ])
        .unwrap();
        rolled.add_directed("W", 1, "W").unwrap();
        rolled.add_directed("W", 0, "P").unwrap();
        rolled.add_directed("P", 0, "D").unwrap();
        rolled.add_bidirected("P", 0, "D").unwrap();
        let g = rolled.unroll(4).unwrap();
        let keep: NodeSet = g.nodes().collect();
        let m = g.marginalize(&keep).unwrap();
        let mut de = g.directed_edges();
        de.sort();
        let mut mde = m.directed_edges();
        mde.sort();
        assert_eq!(de, mde);
        let mut be = g.bidirected_edges();
        be.sort();
        let mut mbe = m.bidirected_edges();
        mbe.sort();
        assert_eq!(be, mbe);
    }

    /// Single-period market snapshot with the demand disturbance explicit:
    /// U_D -> P, U_D -> D, W -> P, P -> D. Dropping U_D yields
    /// W -> P, P -> D, P <-> D.
    #[test]
    fn market_snapshot_projection() {
        let g = UnrolledGraph::from_edges(
            vec![
                Component::observed("W"),
                Component::observed("P"),
                Component::observed("D"),
                Component::latent("U_D"),
            ],
            1,
            &[
                (NodeId::new(0, 0), NodeId::new(0, 1)), // W -> P
                (NodeId::new(0, 1), NodeId::new(0, 2)), // P -> D
                (NodeId::new(0, 3), NodeId::new(0, 1)), // U_D -> P
                (NodeId::new(0, 3), NodeId::new(0, 2)), // U_D -> D
            ],
            &[],
        );
        let keep: NodeSet = [NodeId::new(0, 0), NodeId::new(0, 1), NodeId::new(0, 2)]
            .into_iter()
            .collect();
        let m = g.marginalize(&keep).unwrap();
        let mut de = m.directed_edges();
        de.sort();
        assert_eq!(
            de,
            vec![
                (NodeId::new(0, 0), NodeId::new(0, 1)),
                (NodeId::new(0, 1), NodeId::new(0, 2)),
            ]
        );
        assert_eq!(m.bidirected_edges(), vec![(NodeId::new(0, 1), NodeId::new(0, 2))]);
    }

    #[test]
    fn bidirected_endpoint_lifts_through_dropped_node() {
        // X <-> L, L -> Y: the hidden parent behind X <-> L reaches Y
        // through the dropped L, so X <-> Y after dropping L.
        let g = UnrolledGraph::from_edges(
            vec![
                Component::observed("X"),
                Component::latent("L"),
                Component::observed("Y"),
            ],
            1,
            &[(NodeId::new(0, 1), NodeId::new(0, 2))],
            &[(NodeId::new(0, 0), NodeId::new(0, 1))],
        );
        let keep: NodeSet = [NodeId::new(0, 0), NodeId::new(0, 2)].into_iter().collect();
        let m = g.marginalize(&keep).unwrap();
        assert_eq!(m.bidirected_edges(), vec![(NodeId::new(0, 0), NodeId::new(0, 2))]);
    }

    #[test]
    fn marginalize_is_idempotent() {
        let g = chain_graph();
        let keep: NodeSet = [NodeId::new(0, 0), NodeId::new(0, 2)].into_iter().collect();
        let once = g.marginalize(&keep).unwrap();
        let twice = once.marginalize(&keep).unwrap();
        assert_eq!(once.directed_edges(), twice.directed_edges());
        assert_eq!(once.bidirected_edges(), twice.bidirected_edges());
    }

    #[test]
    fn keep_must_be_subset() {
        let g = chain_graph();
        let keep: NodeSet = [NodeId::new(5, 0)].into_iter().collect();
        assert!(matches!(g.marginalize(&keep), Err(GraphError::KeepOutsideGraph(_))));
    }
}
