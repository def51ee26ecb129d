//! Plain-text serialization of rolled time graphs.
//!
//! ```text
//! # Model 1
//! observed: W, P, D
//! latent: B
//! W[-1] -> W
//! W -> P
//! P <-> D
//! ```
//!
//! One edge per line; `name[-k]` references a component k steps in the past,
//! a bare `name` means lag 0. `#` starts a comment.

use super::{Component, EdgeKind, GraphError, RolledTimeGraph};

fn parse_endpoint(s: &str, line: usize) -> Result<(String, u32), GraphError> {
    let s = s.trim();
    if let Some(open) = s.find('[') {
        let name = s[..open].trim();
        let rest = &s[open + 1..];
        let close = rest.find(']').ok_or_else(|| GraphError::Parse {
            line,
            msg: format!("missing `]` in `{s}`"),
        })?;
        let lag_str = rest[..close].trim();
        if !rest[close + 1..].trim().is_empty() {
            return Err(GraphError::Parse { line, msg: format!("trailing text after `]` in `{s}`") });
        }
        let lag: i64 = lag_str.parse().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid lag `{lag_str}`"),
        })?;
        if lag > 0 {
            return Err(GraphError::Parse {
                line,
                msg: format!("lag must be 0 or negative (past), got `{lag_str}`"),
            });
        }
        Ok((name.to_string(), (-lag) as u32))
    } else {
        if s.is_empty() {
            return Err(GraphError::Parse { line, msg: "empty endpoint".to_string() });
        }
        Ok((s.to_string(), 0))
    }
}

/// Parse the text format into a rolled graph.
pub fn parse_rolled_graph(text: &str) -> Result<RolledTimeGraph, GraphError> {
    let mut observed: Vec<String> = Vec::new();
    let mut latent: Vec<String> = Vec::new();
    let mut edge_lines: Vec<(usize, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("observed:") {
            observed.extend(rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        } else if let Some(rest) = line.strip_prefix("latent:") {
            latent.extend(rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        } else {
            edge_lines.push((line_no, line.to_string()));
        }
    }

    if observed.is_empty() {
        return Err(GraphError::Parse {
            line: 0,
            msg: "missing `observed:` component declaration".to_string(),
        });
    }
    let mut components: Vec<Component> =
        observed.iter().map(|n| Component::observed(n)).collect();
    components.extend(latent.iter().map(|n| Component::latent(n)));
    let mut g = RolledTimeGraph::new(components)?;

    for (line_no, line) in edge_lines {
        if let Some((lhs, rhs)) = line.split_once("<->") {
            let (a, lag) = parse_endpoint(lhs, line_no)?;
            let (b, blag) = parse_endpoint(rhs, line_no)?;
            if blag != 0 {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: "the right endpoint of an edge is implicitly at lag 0".to_string(),
                });
            }
            g.add_bidirected(&a, lag, &b)?;
        } else if let Some((lhs, rhs)) = line.split_once("->") {
            let (a, lag) = parse_endpoint(lhs, line_no)?;
            let (b, blag) = parse_endpoint(rhs, line_no)?;
            if blag != 0 {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: "the right endpoint of an edge is implicitly at lag 0".to_string(),
                });
            }
            g.add_directed(&a, lag, &b)?;
        } else {
            return Err(GraphError::Parse {
                line: line_no,
                msg: format!("expected `->` or `<->` in `{line}`"),
            });
        }
    }
    Ok(g)
}

/// Render a rolled graph in the text format (canonical component and edge
/// order).
pub fn render_rolled_graph(g: &RolledTimeGraph) -> String {
    let mut out = String::new();
    let observed: Vec<&str> = g
        .components()
        .iter()
        .filter(|c| c.observed)
        .map(|c| c.name.as_str())
        .collect();
    let latent: Vec<&str> = g
        .components()
        .iter()
        .filter(|c| !c.observed)
        .map(|c| c.name.as_str())
        .collect();
    out.push_str(&format!("observed: {}\n", observed.join(", ")));
    if !latent.is_empty() {
        out.push_str(&format!("latent: {}\n", latent.join(", ")));
    }
    let endpoint = |comp: usize, lag: u32| {
        if lag == 0 {
            g.component_name(comp).to_string()
        } else {
            format!("{}[-{}]", g.component_name(comp), lag)
        }
    };
    let mut lines: Vec<String> = g
        .edges()
        .iter()
        .map(|e| {
            let glyph = match e.kind {
                EdgeKind::Directed => "->",
                EdgeKind::Bidirected => "<->",
            };
            format!(
                "{} {} {}",
                endpoint(e.source.0, e.source.1),
                glyph,
                g.component_name(e.target)
            )
        })
        .collect();
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Parse a node reference of the form `W@0` or `W@-2` (component at a lag).
/// A bare component name means lag 0.
pub fn parse_node_ref(s: &str) -> Result<(String, u32), GraphError> {
    let s = s.trim();
    match s.split_once('@') {
        None => {
            if s.is_empty() {
                return Err(GraphError::Parse { line: 0, msg: "empty node reference".into() });
            }
            Ok((s.to_string(), 0))
        }
        Some((name, off)) => {
            let off: i64 = off.trim().parse().map_err(|_| GraphError::Parse {
                line: 0,
                msg: format!("invalid offset in `{s}`"),
            })?;
            if off > 0 {
                return Err(GraphError::Parse {
                    line: 0,
                    msg: format!("node offsets are 0 or negative (past), got `{s}`"),
                });
            }
            Ok((name.trim().to_string(), (-off) as u32))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtins::{builtin_graph, BuiltinModel};

    #[test]
    fn round_trip_builtin_graphs() {
        for (_, g) in crate::graph::builtin_graphs() {
            let text = render_rolled_graph(&g);
            let parsed = parse_rolled_graph(&text).unwrap();
            assert_eq!(render_rolled_graph(&parsed), text);
        }
    }

    #[test]
    fn parse_with_comments_and_blanks() {
        let text = "\
# inertial demand
observed: W, P, D

W[-1] -> W   # wind memory
W -> P
D[-1] -> P
P -> D
D[-1] -> D
P <-> D
";
        let g = parse_rolled_graph(text).unwrap();
        let canon = render_rolled_graph(&builtin_graph(BuiltinModel::Model1));
        assert_eq!(render_rolled_graph(&g), canon);
    }

    #[test]
    fn missing_observed_header_rejected() {
        assert!(matches!(
            parse_rolled_graph("W -> P\n"),
            Err(GraphError::Parse { .. })
        ));
    }

    #[test]
    fn positive_lag_rejected() {
        let text = "observed: A, B\nA[1] -> B\n";
        assert!(matches!(parse_rolled_graph(text), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn unknown_edge_component_rejected() {
        let text = "observed: A\nA -> Z\n";
        assert!(matches!(
            parse_rolled_graph(text),
            Err(GraphError::UnknownComponent(_))
        ));
    }

    #[test]
    fn node_refs() {
        assert_eq!(parse_node_ref("W@0").unwrap(), ("W".to_string(), 0));
        assert_eq!(parse_node_ref("W@-2").unwrap(), ("W".to_string(), 2));
        assert_eq!(parse_node_ref("P").unwrap(), ("P".to_string(), 0));
        assert!(parse_node_ref("W@3").is_err());
        assert!(parse_node_ref("").is_err());
    }
}
