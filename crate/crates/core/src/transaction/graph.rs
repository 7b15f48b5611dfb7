use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qcore::{is_product, MeasurementBasis, SubsystemId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    Source,
    Detector,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Source => "source",
            NodeKind::Detector => "detector",
        }
    }
}

/// Offer waves run forward in time from a source to a detector;
/// confirmation waves run back along the same particle line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WaveKind {
    Offer,
    Confirmation,
}

impl WaveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WaveKind::Offer => "offer",
            WaveKind::Confirmation => "confirmation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveNode {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WaveEdge {
    pub from: String,
    pub to: String,
    pub wave: WaveKind,
    pub line: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub id: String,
    pub lines: Vec<String>,
}

/// A detector and the particle lines its basis vectors involve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorSpec {
    pub id: String,
    pub lines: Vec<String>,
}

/// Wiring of sources, particle lines and detectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WaveLayout {
    pub sources: Vec<SourceSpec>,
    pub detectors: Vec<DetectorSpec>,
}

impl WaveLayout {
    pub fn new() -> Self {
        WaveLayout::default()
    }

    pub fn source<I, S>(mut self, id: impl Into<String>, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.sources.push(SourceSpec {
            id: id.into(),
            lines: lines.into_iter().map(|l| l.to_string()).collect(),
        });
        self
    }

    pub fn detector<I, S>(mut self, id: impl Into<String>, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.detectors.push(DetectorSpec {
            id: id.into(),
            lines: lines.into_iter().map(|l| l.to_string()).collect(),
        });
        self
    }

    /// Adds the detectors that realize `basis`.
    ///
    /// If every outcome vector factorizes over the basis subsystems, the
    /// measurement is a set of independent single-line detectors named
    /// `{prefix}{line}`. Otherwise each outcome gets its own detector
    /// `{prefix}:{label}` touching every line the basis acts on.
    pub fn measurement(mut self, prefix: &str, basis: &MeasurementBasis) -> Result<Self> {
        let lines: Vec<String> = basis.subsystems().iter().map(ToString::to_string).collect();
        let factorizes = basis.subsystems().len() == 1
            || basis.outcomes().iter().try_fold(true, |acc, (_, v)| {
                if !acc {
                    return Ok::<bool, Error>(false);
                }
                for id in basis.subsystems() {
                    if !is_product(v, std::slice::from_ref::<SubsystemId>(id))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })?;
        if factorizes {
            for line in lines {
                self.detectors.push(DetectorSpec {
                    id: format!("{prefix}{line}"),
                    lines: vec![line],
                });
            }
        } else {
            for label in basis.labels() {
                self.detectors.push(DetectorSpec {
                    id: format!("{prefix}:{label}"),
                    lines: lines.clone(),
                });
            }
        }
        Ok(self)
    }
}

/// Directed graph of offer and confirmation waves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveGraph {
    nodes: BTreeMap<String, NodeKind>,
    edges: BTreeSet<WaveEdge>,
}

impl WaveGraph {
    /// Offer edges run from the emitting source to every detector touching a
    /// line; each such detector sends a confirmation edge back along it.
    pub fn build(layout: &WaveLayout) -> Result<Self> {
        let mut nodes = BTreeMap::new();
        let mut emitter_of: BTreeMap<&str, &str> = BTreeMap::new();
        for s in &layout.sources {
            if nodes.insert(s.id.clone(), NodeKind::Source).is_some() {
                return Err(Error::InvalidConfig(format!("node `{}` declared twice", s.id)));
            }
            for line in &s.lines {
                if emitter_of.insert(line, &s.id).is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "particle line `{line}` emitted by two sources"
                    )));
                }
            }
        }
        let mut edges = BTreeSet::new();
        let mut absorbed: BTreeSet<&str> = BTreeSet::new();
        for d in &layout.detectors {
            if nodes.insert(d.id.clone(), NodeKind::Detector).is_some() {
                return Err(Error::InvalidConfig(format!("node `{}` declared twice", d.id)));
            }
            for line in &d.lines {
                let source = emitter_of
                    .get(line.as_str())
                    .ok_or_else(|| Error::UnsourcedLine(line.clone()))?;
                absorbed.insert(line);
                edges.insert(WaveEdge {
                    from: source.to_string(),
                    to: d.id.clone(),
                    wave: WaveKind::Offer,
                    line: line.clone(),
                });
                edges.insert(WaveEdge {
                    from: d.id.clone(),
                    to: source.to_string(),
                    wave: WaveKind::Confirmation,
                    line: line.clone(),
                });
            }
        }
        if let Some(line) = emitter_of.keys().find(|l| !absorbed.contains(*l)) {
            return Err(Error::DanglingLine(line.to_string()));
        }
        Ok(WaveGraph { nodes, edges })
    }

    pub fn nodes(&self) -> impl Iterator<Item = WaveNode> + '_ {
        self.nodes.iter().map(|(id, kind)| WaveNode {
            id: id.clone(),
            kind: *kind,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = &WaveEdge> {
        self.edges.iter()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Weak connectivity: edge direction is ignored.
    pub fn connected(&self, x: &str, y: &str) -> Result<bool> {
        for id in [x, y] {
            if !self.contains(id) {
                return Err(Error::UnknownNode(id.to_owned()));
            }
        }
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.edges {
            adjacency.entry(&e.from).or_default().push(&e.to);
            adjacency.entry(&e.to).or_default().push(&e.from);
        }
        let mut seen = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(n) = queue.pop_front() {
            if n == y {
                return Ok(true);
            }
            for &m in adjacency.get(n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        Ok(false)
    }

    /// DOT rendering with nodes and edges sorted by id. Offer edges are
    /// solid, confirmation edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph waves {\n");
        for (id, kind) in &self.nodes {
            let shape = match kind {
                NodeKind::Source => "ellipse",
                NodeKind::Detector => "box",
            };
            let _ = writeln!(out, "  \"{id}\" [kind={}, shape={shape}];", kind.as_str());
        }
        for e in &self.edges {
            let style = match e.wave {
                WaveKind::Offer => "solid",
                WaveKind::Confirmation => "dashed",
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [wave={}, line=\"{}\", style={style}];",
                e.from,
                e.to,
                e.wave.as_str(),
                e.line
            );
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_source_single_detector() {
        let layout = WaveLayout::new().source("S", ["p"]).detector("D", ["p"]);
        let g = WaveGraph::build(&layout).unwrap();
        assert_eq!(g.nodes().count(), 2);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges.len(), 2);
        assert_eq!(edges.iter().filter(|e| e.wave == WaveKind::Offer).count(), 1);
        assert!(g.connected("S", "D").unwrap());
        assert!(g.connected("D", "D").unwrap());
    }

    #[test]
    fn dangling_line_rejected() {
        let layout = WaveLayout::new().source("S", ["p", "q"]).detector("D", ["p"]);
        assert_eq!(WaveGraph::build(&layout).unwrap_err(), Error::DanglingLine("q".into()));
    }

    #[test]
    fn unsourced_line_rejected() {
        let layout = WaveLayout::new().source("S", ["p"]).detector("D", ["p", "r"]);
        assert_eq!(WaveGraph::build(&layout).unwrap_err(), Error::UnsourcedLine("r".into()));
    }

    #[test]
    fn unknown_node() {
        let layout = WaveLayout::new().source("S", ["p"]).detector("D", ["p"]);
        let g = WaveGraph::build(&layout).unwrap();
        assert_eq!(g.connected("S", "X").unwrap_err(), Error::UnknownNode("X".into()));
    }

    #[test]
    fn dot_is_sorted() {
        let layout = WaveLayout::new().source("S", ["p"]).detector("D", ["p"]);
        let dot = WaveGraph::build(&layout).unwrap().to_dot();
        assert_eq!(
            dot,
            "digraph waves {\n  \"D\" [kind=detector, shape=box];\n  \"S\" [kind=source, shape=ellipse];\n  \"D\" -> \"S\" [wave=confirmation, line=\"p\", style=dashed];\n  \"S\" -> \"D\" [wave=offer, line=\"p\", style=solid];\n}\n"
        );
    }
}
