//! d-separation on unrolled graphs with bidirected edges.
//!
//! A path is blocked by S when some intermediate node v either
//! (i) is a non-collider on the path and lies in S, or
//! (ii) is a collider on the path and neither v nor any descendant of v lies
//! in S. A collider is a node where two consecutive path edges both carry
//! arrowheads, so bidirected endpoints count.
//!
//! The decision procedure is a reachability search over (node, entry-mark)
//! states; witness extraction runs a separate shortest-path search so the
//! reported path is simple and deterministic.

use super::unrolled::{NodeSet, UnrolledGraph};
use super::{GraphError, NodeId};
use std::collections::VecDeque;

/// One hop of a witness path, as seen from the preceding node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    /// `prev -> next`
    Forward,
    /// `prev <- next`
    Backward,
    /// `prev <-> next`
    Bidirected,
}

/// An unblocked path from a node of `a` to a node of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub nodes: Vec<NodeId>,
    /// `steps[i]` connects `nodes[i]` to `nodes[i + 1]`.
    pub steps: Vec<PathStep>,
}

impl Witness {
    /// Render as `W@t5 <- W@t4 -> P@t4 -> D@t4 -> D@t5`.
    pub fn render(&self, g: &UnrolledGraph) -> String {
        self.render_with(|n| g.render_node(n))
    }

    pub fn render_with(&self, mut label: impl FnMut(NodeId) -> String) -> String {
        let mut out = label(self.nodes[0]);
        for (i, step) in self.steps.iter().enumerate() {
            let glyph = match step {
                PathStep::Forward => "->",
                PathStep::Backward => "<-",
                PathStep::Bidirected => "<->",
            };
            out.push_str(&format!(" {} {}", glyph, label(self.nodes[i + 1])));
        }
        out
    }
}

/// Incident edge of `v`: neighbor, arrowhead-at-v, arrowhead-at-neighbor, glyph.
#[derive(Debug, Clone, Copy)]
struct Incident {
    nbr: usize,
    head_here: bool,
    head_there: bool,
    step: PathStep,
}

fn incident_edges(g: &UnrolledGraph, v: NodeId) -> Vec<Incident> {
    let mut out = Vec::new();
    for c in g.children_of(v) {
        out.push(Incident {
            nbr: index_of(g, c),
            head_here: false,
            head_there: true,
            step: PathStep::Forward,
        });
    }
    for p in g.parents_of(v) {
        out.push(Incident {
            nbr: index_of(g, p),
            head_here: true,
            head_there: false,
            step: PathStep::Backward,
        });
    }
    for s in g.spouses_of(v) {
        out.push(Incident {
            nbr: index_of(g, s),
            head_here: true,
            head_there: true,
            step: PathStep::Bidirected,
        });
    }
    // Deterministic exploration order: by (t, comp), then edge kind.
    out.sort_by_key(|e| (e.nbr, e.step as u8));
    out
}

fn index_of(g: &UnrolledGraph, n: NodeId) -> usize {
    n.t * g.components().len() + n.comp
}

fn node_of(g: &UnrolledGraph, idx: usize) -> NodeId {
    NodeId::new(idx / g.components().len(), idx % g.components().len())
}

fn check_disjoint(g: &UnrolledGraph, sets: &[&NodeSet]) -> Result<(), GraphError> {
    for (i, a) in sets.iter().enumerate() {
        for b in sets.iter().skip(i + 1) {
            if let Some(n) = a.intersection(b).next() {
                return Err(GraphError::OverlappingSets(g.render_node(*n)));
            }
        }
    }
    Ok(())
}

/// `collider_open[v]`: v or one of its descendants lies in S, so a collider
/// at v does not block. Equivalently v is in S or a strict ancestor of S.
fn collider_open_mask(g: &UnrolledGraph, s: &NodeSet) -> Vec<bool> {
    let n = g.components().len() * g.window();
    let mut open = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &node in s {
        let i = index_of(g, node);
        open[i] = true;
        queue.push_back(i);
    }
    while let Some(v) = queue.pop_front() {
        for p in g.parents_of(node_of(g, v)) {
            let pi = index_of(g, p);
            if !open[pi] {
                open[pi] = true;
                queue.push_back(pi);
            }
        }
    }
    open
}

/// Decide whether every path between `a` and `b` is blocked by `s`.
pub fn d_separated(
    g: &UnrolledGraph,
    a: &NodeSet,
    b: &NodeSet,
    s: &NodeSet,
) -> Result<bool, GraphError> {
    g.validate_nodes(a)?;
    g.validate_nodes(b)?;
    g.validate_nodes(s)?;
    check_disjoint(g, &[a, b, s])?;
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }

    let n = g.components().len() * g.window();
    let open = collider_open_mask(g, s);
    let in_s = {
        let mut m = vec![false; n];
        for &node in s {
            m[index_of(g, node)] = true;
        }
        m
    };
    let in_b = {
        let mut m = vec![false; n];
        for &node in b {
            m[index_of(g, node)] = true;
        }
        m
    };

    // State: (node, entered-with-arrowhead-at-node).
    let mut visited = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
    for &start in a {
        for e in incident_edges(g, start) {
            if in_b[e.nbr] {
                return Ok(false);
            }
            if !visited[e.nbr][e.head_there as usize] {
                visited[e.nbr][e.head_there as usize] = true;
                queue.push_back((e.nbr, e.head_there));
            }
        }
    }
    while let Some((v, entered_head)) = queue.pop_front() {
        let vn = node_of(g, v);
        for e in incident_edges(g, vn) {
            let collider = entered_head && e.head_here;
            let passable = if collider { open[v] } else { !in_s[v] };
            if !passable {
                continue;
            }
            if in_b[e.nbr] {
                return Ok(false);
            }
            if !visited[e.nbr][e.head_there as usize] {
                visited[e.nbr][e.head_there as usize] = true;
                queue.push_back((e.nbr, e.head_there));
            }
        }
    }
    Ok(true)
}

/// Find the shortest unblocked simple path between `a` and `b` given `s`,
/// breaking length ties lexicographically on the (time, component) sequence.
/// Returns `None` when `a` and `b` are d-separated.
pub fn witness_path(
    g: &UnrolledGraph,
    a: &NodeSet,
    b: &NodeSet,
    s: &NodeSet,
) -> Result<Option<Witness>, GraphError> {
    if d_separated(g, a, b, s)? {
        return Ok(None);
    }
    let n = g.components().len() * g.window();
    let open = collider_open_mask(g, s);
    let in_s = {
        let mut m = vec![false; n];
        for &node in s {
            m[index_of(g, node)] = true;
        }
        m
    };
    let in_b = {
        let mut m = vec![false; n];
        for &node in b {
            m[index_of(g, node)] = true;
        }
        m
    };

    // Iterative deepening over exact path length; sorted starts and sorted
    // neighbor exploration give the lexicographic tie-break.
    let starts: Vec<NodeId> = a.iter().copied().collect();
    for depth in 1..n.max(2) {
        for &start in &starts {
            let mut on_path = vec![false; n];
            on_path[index_of(g, start)] = true;
            let mut nodes = vec![start];
            let mut steps = Vec::new();
            if dfs_exact(
                g, &open, &in_s, &in_b, depth, start, false, &mut on_path, &mut nodes, &mut steps,
            ) {
                return Ok(Some(Witness { nodes, steps }));
            }
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn dfs_exact(
    g: &UnrolledGraph,
    open: &[bool],
    in_s: &[bool],
    in_b: &[bool],
    remaining: usize,
    at: NodeId,
    entered_head: bool,
    on_path: &mut Vec<bool>,
    nodes: &mut Vec<NodeId>,
    steps: &mut Vec<PathStep>,
) -> bool {
    let ai = index_of(g, at);
    for e in incident_edges(g, at) {
        // Intermediate-node blocking applies only once `at` has a predecessor.
        if nodes.len() > 1 {
            let collider = entered_head && e.head_here;
            let passable = if collider { open[ai] } else { !in_s[ai] };
            if !passable {
                continue;
            }
        }
        if on_path[e.nbr] {
            continue;
        }
        let nbr_node = node_of(g, e.nbr);
        if remaining == 1 {
            if in_b[e.nbr] {
                nodes.push(nbr_node);
                steps.push(e.step);
                return true;
            }
            continue;
        }
        if in_b[e.nbr] {
            // Endpoint reached early; a shorter depth already covered it.
            continue;
        }
        on_path[e.nbr] = true;
        nodes.push(nbr_node);
        steps.push(e.step);
        if dfs_exact(
            g,
            open,
            in_s,
            in_b,
            remaining - 1,
            nbr_node,
            e.head_there,
            on_path,
            nodes,
            steps,
        ) {
            return true;
        }
        on_path[e.nbr] = false;
        nodes.pop();
        steps.pop();
    }
    false
}
