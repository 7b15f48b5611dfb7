use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{config_hash, Experiment, ScenarioKind, ScenarioResult};
use crate::error::{Error, Result};
use crate::qcore::{
    bell_state, conditional_state, outcome_distribution, pick_outcome, BellKind, Distribution, MeasurementAxis,
    MeasurementBasis, StateVector, SubsystemId, IMPOSSIBLE,
};
use crate::rng::TrialRng;
use crate::transaction::{WaveGraph, WaveLayout};

/// Eve's joint measurement on particles 2 and 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EveBasis {
    Bell,
    Product,
}

impl fmt::Display for EveBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EveBasis::Bell => "bell",
            EveBasis::Product => "product",
        })
    }
}

impl std::str::FromStr for EveBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell" => Ok(EveBasis::Bell),
            "product" => Ok(EveBasis::Product),
            other => Err(Error::InvalidConfig(format!("unknown eve basis `{other}`"))),
        }
    }
}

/// Whether Eve measures before or after particles 1 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementOrdering {
    EveFirst,
    EdgesFirst,
}

impl fmt::Display for MeasurementOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementOrdering::EveFirst => "eve-first",
            MeasurementOrdering::EdgesFirst => "edges-first",
        })
    }
}

impl std::str::FromStr for MeasurementOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eve-first" => Ok(MeasurementOrdering::EveFirst),
            "edges-first" => Ok(MeasurementOrdering::EdgesFirst),
            other => Err(Error::InvalidConfig(format!("unknown ordering `{other}`"))),
        }
    }
}

/// Alice prepares |Ψ⁻⟩₁₂, Bob prepares |Ψ⁻⟩₃₄; Eve measures (2, 3) and the
/// edge particles 1 and 4 are measured along `axis1` and `axis4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwapConfig {
    pub eve_basis: EveBasis,
    pub ordering: MeasurementOrdering,
    pub axis1: MeasurementAxis,
    pub axis4: MeasurementAxis,
}

impl Default for SwapConfig {
    fn default() -> Self {
        SwapConfig {
            eve_basis: EveBasis::Bell,
            ordering: MeasurementOrdering::EveFirst,
            axis1: MeasurementAxis::z(),
            axis4: MeasurementAxis::z(),
        }
    }
}

impl SwapConfig {
    pub fn new(eve_basis: EveBasis, ordering: MeasurementOrdering) -> Self {
        SwapConfig {
            eve_basis,
            ordering,
            ..Default::default()
        }
    }

    pub fn with_axes(mut self, axis1: MeasurementAxis, axis4: MeasurementAxis) -> Self {
        self.axis1 = axis1;
        self.axis4 = axis4;
        self
    }

    pub fn eve_measurement(&self) -> Result<MeasurementBasis> {
        match self.eve_basis {
            EveBasis::Bell => MeasurementBasis::bell(2, 3),
            EveBasis::Product => MeasurementBasis::computational(&[2, 3]),
        }
    }

    /// `|Ψ⁻⟩₁₂ ⊗ |Ψ⁻⟩₃₄` over subsystems (1, 2, 3, 4).
    pub fn initial_state() -> Result<StateVector> {
        bell_state(BellKind::PsiMinus, 1, 2)?.tensor(&bell_state(BellKind::PsiMinus, 3, 4)?)
    }

    /// Sources S12 and S34, detectors for particles 1 and 4, and Eve's
    /// detectors as dictated by her basis.
    pub fn wave_layout(&self) -> Result<WaveLayout> {
        WaveLayout::new()
            .source("S12", [1, 2])
            .source("S34", [3, 4])
            .measurement("D", &self.axis1.basis(1)?)?
            .measurement("D", &self.axis4.basis(4)?)?
            .measurement("Eve", &self.eve_measurement()?)
    }

    pub fn wave_graph(&self) -> Result<WaveGraph> {
        WaveGraph::build(&self.wave_layout()?)
    }
}

const STAGE_EVE: &str = "eve";
const STAGE_1: &str = "1";
const STAGE_4: &str = "4";

/// Sequential measurement tree: every possible branch with its probability
/// and post-measurement state.
#[derive(Debug, Clone)]
struct Node {
    stage: &'static str,
    labels: Vec<String>,
    probabilities: Vec<f64>,
    children: Vec<Option<Child>>,
}

#[derive(Debug, Clone)]
struct Child {
    state: StateVector,
    next: Option<Box<Node>>,
}

fn build_tree(state: &StateVector, stages: &[(&'static str, MeasurementBasis)]) -> Result<Option<Box<Node>>> {
    let Some(((stage, basis), rest)) = stages.split_first() else {
        return Ok(None);
    };
    let dist = outcome_distribution(state, basis)?;
    let mut children = Vec::with_capacity(dist.len());
    for (label, &p) in &dist {
        if p <= IMPOSSIBLE {
            children.push(None);
            continue;
        }
        let after = conditional_state(state, basis, label)?;
        let next = build_tree(&after, rest)?;
        children.push(Some(Child { state: after, next }));
    }
    Ok(Some(Box::new(Node {
        stage,
        labels: dist.keys().cloned().collect(),
        probabilities: dist.values().copied().collect(),
        children,
    })))
}

/// One Eve outcome with its probability and the (1, 4) state it leaves.
#[derive(Debug, Clone)]
pub struct SwapBranch {
    pub label: String,
    pub probability: f64,
    pub state: Option<StateVector>,
}

#[derive(Debug, Clone)]
pub struct SwapExperiment {
    config: SwapConfig,
    hash: String,
    tree: Box<Node>,
    eve_labels: Vec<String>,
    edge1_labels: Vec<String>,
    edge4_labels: Vec<String>,
}

/// Canonical joint label, independent of the measurement order.
pub fn swap_label(eve: &str, one: &str, four: &str) -> String {
    format!("eve={eve};1={one};4={four}")
}

impl SwapExperiment {
    pub fn new(config: SwapConfig) -> Result<Self> {
        let eve = config.eve_measurement()?;
        let edge1 = config.axis1.basis(1)?;
        let edge4 = config.axis4.basis(4)?;
        let eve_labels = eve.labels().map(str::to_owned).collect();
        let edge1_labels = edge1.labels().map(str::to_owned).collect();
        let edge4_labels = edge4.labels().map(str::to_owned).collect();
        let stages = match config.ordering {
            MeasurementOrdering::EveFirst => vec![(STAGE_EVE, eve), (STAGE_1, edge1), (STAGE_4, edge4)],
            MeasurementOrdering::EdgesFirst => vec![(STAGE_1, edge1), (STAGE_4, edge4), (STAGE_EVE, eve)],
        };
        let tree = build_tree(&SwapConfig::initial_state()?, &stages)?.expect("three stages");
        Ok(SwapExperiment {
            hash: config_hash(ScenarioKind::Swap, &config),
            config,
            tree,
            eve_labels,
            edge1_labels,
            edge4_labels,
        })
    }

    pub fn config(&self) -> &SwapConfig {
        &self.config
    }

    /// Eve's outcomes measured on the initial state, each with the
    /// normalized (1, 4) state it leaves behind.
    pub fn eve_branches(&self) -> Result<Vec<SwapBranch>> {
        let initial = SwapConfig::initial_state()?;
        let basis = self.config.eve_measurement()?;
        outcome_distribution(&initial, &basis)?
            .into_iter()
            .map(|(label, probability)| {
                let state = if probability > IMPOSSIBLE {
                    Some(
                        conditional_state(&initial, &basis, &label)?
                            .reorder(&[SubsystemId::from(1), SubsystemId::from(4)])?,
                    )
                } else {
                    None
                };
                Ok(SwapBranch {
                    label,
                    probability,
                    state,
                })
            })
            .collect()
    }

    fn walk<F: FnMut(&str, &str, &StateVector)>(&self, draws: &mut impl FnMut(&Node) -> usize, mut visit: F) -> f64 {
        let mut node = Some(&*self.tree);
        let mut probability = 1.0;
        while let Some(n) = node {
            let i = draws(n);
            probability *= n.probabilities[i];
            let child = n.children[i].as_ref().expect("sampler never picks impossible branches");
            visit(n.stage, &n.labels[i], &child.state);
            node = child.next.as_deref();
        }
        probability
    }

    /// Probability of every joint outcome, in canonical label order.
    fn joint(&self) -> Distribution {
        let mut leaves = std::collections::HashMap::new();
        fn collect(
            node: &Node,
            prefix: &mut Vec<(&'static str, String)>,
            p: f64,
            out: &mut std::collections::HashMap<String, f64>,
        ) {
            for (i, label) in node.labels.iter().enumerate() {
                prefix.push((node.stage, label.clone()));
                let q = p * node.probabilities[i];
                match node.children[i].as_ref().and_then(|c| c.next.as_deref()) {
                    Some(next) => collect(next, prefix, q, out),
                    None => {
                        let get = |s: &str| prefix.iter().find(|(st, _)| *st == s).map(|(_, l)| l.as_str());
                        // impossible branches have no subtree; their leaves carry probability 0
                        if let (Some(e), Some(a), Some(b)) = (get(STAGE_EVE), get(STAGE_1), get(STAGE_4)) {
                            out.insert(swap_label(e, a, b), q);
                        }
                    }
                }
                prefix.pop();
            }
        }
        collect(&self.tree, &mut Vec::new(), 1.0, &mut leaves);
        let mut dist = Distribution::new();
        for e in &self.eve_labels {
            for a in &self.edge1_labels {
                for b in &self.edge4_labels {
                    let label = swap_label(e, a, b);
                    let p = leaves.get(&label).copied().unwrap_or(0.0);
                    dist.insert(label, p);
                }
            }
        }
        dist
    }

    /// Draws only the outcome indices of one trial, as (eve, 1, 4) labels.
    /// Consumes the random stream exactly as [`Experiment::trial`] does.
    pub fn sample_labels<R: Rng + ?Sized>(&self, rng: &mut R) -> (&str, &str, &str) {
        let mut eve = "";
        let mut one = "";
        let mut four = "";
        let mut node = Some(&*self.tree);
        while let Some(n) = node {
            let i = pick_outcome(&n.probabilities, rng.random());
            let label = n.labels[i].as_str();
            match n.stage {
                STAGE_EVE => eve = label,
                STAGE_1 => one = label,
                _ => four = label,
            }
            node = n.children[i].as_ref().and_then(|c| c.next.as_deref());
        }
        (eve, one, four)
    }
}

impl Experiment for SwapExperiment {
    fn kind(&self) -> ScenarioKind {
        ScenarioKind::Swap
    }

    fn config_hash(&self) -> &str {
        &self.hash
    }

    fn analytic_distribution(&self) -> Distribution {
        self.joint()
    }

    fn trial(&self, rng: &mut TrialRng) -> ScenarioResult {
        let seed = rng.seed();
        let mut stages = Vec::with_capacity(3);
        let mut conditional = None;
        let eve_first = self.config.ordering == MeasurementOrdering::EveFirst;
        let probability = self.walk(
            &mut |n: &Node| pick_outcome(&n.probabilities, rng.random()),
            |stage, label, state| {
                if eve_first && stage == STAGE_EVE {
                    conditional = Some(state.clone());
                }
                stages.push((stage.to_owned(), label.to_owned()));
            },
        );
        let get = |s: &str| {
            stages
                .iter()
                .find(|(st, _): &&(String, String)| st == s)
                .map(|(_, l)| l.clone())
                .unwrap_or_default()
        };
        let outcome = swap_label(&get(STAGE_EVE), &get(STAGE_1), &get(STAGE_4));
        ScenarioResult {
            scenario: ScenarioKind::Swap,
            config_hash: self.hash.clone(),
            seed,
            outcome,
            stages,
            conditional,
            probability,
        }
    }
}
