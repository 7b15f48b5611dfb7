//! Command implementations behind the `tisim` binary.
//!
//! Each command is a plain function returning its output so the binary only
//! handles argument parsing, printing and exit codes.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tisim_core::qcore::{bell_state, schmidt_coefficients, BellKind, Distribution, FIDELITY_TOL};
use tisim_core::scenarios::{
    run_trials, ConfigFile, EveBasis, MeasurementOrdering, QuantumLiarExperiment, SwapExperiment, LIAR_OUTCOMES,
};
use tisim_core::stats::{chsh, compare, format_f64, tabulate, tabulate_stage, ChshConfig, ComparisonRow, RunReport};
use tisim_core::{Error, Experiment, ScenarioConfig, ScenarioKind, ScenarioResult, StateVector, SubsystemId};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_K_SIGMA: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Incomplete { deficit: f64 },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Incomplete { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Incomplete { deficit } => write!(f, "{}", Error::Incomplete { deficit: *deficit }),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Incomplete { deficit } => CliError::Incomplete { deficit },
            Error::Io(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Command-line values that override the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub eve_basis: Option<EveBasis>,
    pub ordering: Option<MeasurementOrdering>,
    pub far_left_absorber: bool,
}

/// A scenario configuration with the CHSH angles used by `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub scenario: ScenarioConfig,
    pub chsh: ChshConfig,
}

/// Picks the scenario (argument first, then the file's `scenario` key),
/// loads its section and applies command-line overrides.
pub fn resolve(scenario: Option<ScenarioKind>, config: Option<&Path>, overrides: &Overrides) -> CliResult<Setup> {
    let file = match config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let kind = scenario
        .or(file.scenario)
        .ok_or_else(|| CliError::Config("no scenario given on the command line or in the config file".into()))?;
    let mut scenario = file.scenario_config(kind);
    match &mut scenario {
        ScenarioConfig::Swap(cfg) => {
            if let Some(b) = overrides.eve_basis {
                cfg.eve_basis = b;
            }
            if let Some(o) = overrides.ordering {
                cfg.ordering = o;
            }
        }
        _ if overrides.eve_basis.is_some() || overrides.ordering.is_some() => {
            return Err(CliError::Config(
                "--eve-basis and --ordering apply to the swap scenario only".into(),
            ));
        }
        _ => {}
    }
    if overrides.far_left_absorber {
        match &mut scenario {
            ScenarioConfig::Maudlin(cfg) => cfg.far_left_absorber = true,
            _ => {
                return Err(CliError::Config(
                    "--far-left-absorber applies to the maudlin scenario only".into(),
                ))
            }
        }
    }
    Ok(Setup {
        scenario,
        chsh: file.chsh.unwrap_or_default(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub scenario: ScenarioConfig,
    pub trials: u64,
    pub seed: u64,
    pub k_sigma: f64,
    /// `Some(1)` runs sequentially; `None` uses the default thread pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub json: String,
    pub csv: String,
}

fn execute(
    experiment: &dyn Experiment,
    seed: u64,
    trials: u64,
    threads: Option<usize>,
) -> CliResult<Vec<ScenarioResult>> {
    match threads {
        Some(1) => Ok(run_trials(experiment, seed, trials, false)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(pool.install(|| run_trials(experiment, seed, trials, true)))
        }
        None => Ok(run_trials(experiment, seed, trials, true)),
    }
}

/// Runs the trials, compares against the analytic distribution and builds
/// the report. `report.pass` is the gate.
pub fn cmd_run(m: &RunManifest) -> CliResult<RunOutput> {
    if m.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    if !(m.k_sigma.is_finite() && m.k_sigma >= 0.0) {
        return Err(CliError::Config("--k-sigma must be a nonnegative number".into()));
    }
    let experiment = m.scenario.build()?;
    let results = execute(experiment.as_ref(), m.seed, m.trials, m.threads)?;
    let analytic = experiment.analytic_distribution();
    let comparison = compare(&tabulate(&results)?, &analytic, m.k_sigma)?;
    let mut report = RunReport::new(
        m.scenario.kind().as_str(),
        m.seed,
        m.trials,
        experiment.config_hash(),
        m.scenario.to_json(),
        comparison,
    );
    report.metadata.extend(experiment.metadata());
    match &m.scenario {
        ScenarioConfig::Swap(cfg) => {
            let swap = SwapExperiment::new(cfg.clone())?;
            let marginal: Distribution = swap
                .eve_branches()?
                .into_iter()
                .map(|b| (b.label, b.probability))
                .collect();
            let eve = compare(&tabulate_stage(&results, "eve")?, &marginal, m.k_sigma)?;
            report.pass &= eve.pass;
            report.extras.insert("eve_marginal".into(), json!(eve.rows));
            if cfg.ordering == MeasurementOrdering::EveFirst {
                report
                    .extras
                    .insert("conditional".into(), conditional_summary(&results, cfg.eve_basis)?);
            }
        }
        ScenarioConfig::Maudlin(_) => {
            let half = Distribution::from([("left".to_string(), 0.5), ("right".to_string(), 0.5)]);
            let direction = compare(&tabulate_stage(&results, "direction")?, &half, m.k_sigma)?;
            report.pass &= direction.pass;
            report.extras.insert("direction".into(), json!(direction.rows));
        }
        ScenarioConfig::QuantumLiar(cfg) => {
            let liar = QuantumLiarExperiment::new(cfg.clone())?;
            let d = liar.conditional("D")?;
            let (kind, fidelity) = best_bell(d, &"atom1".into(), &"atom2".into())?;
            report.extras.insert(
                "conditional_D".into(),
                json!({
                    "schmidt": schmidt_coefficients(d, &["atom1".into()])?,
                    "bell": kind.label(),
                    "fidelity": fidelity,
                }),
            );
        }
        ScenarioConfig::Renninger(_) => {}
    }
    let json = report.to_json()?;
    let csv = report.to_csv()?;
    Ok(RunOutput { report, json, csv })
}

/// Fidelity of every trial's (1, 4) state with the Bell state of its Eve
/// label, or the minor Schmidt coefficient for the product basis.
fn conditional_summary(results: &[ScenarioResult], basis: EveBasis) -> CliResult<Value> {
    let mut cache: HashMap<&str, f64> = HashMap::new();
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        let label = r.stage("eve").unwrap_or_default();
        let state = r
            .conditional
            .as_ref()
            .ok_or_else(|| CliError::Config("trial recorded no conditional state".into()))?;
        let v = match cache.get(label) {
            Some(v) => *v,
            None => {
                let v = match basis {
                    EveBasis::Bell => bell_state(label.parse()?, 1, 4)?.fidelity(state)?,
                    EveBasis::Product => schmidt_coefficients(state, &[1.into()])?[1],
                };
                cache.insert(label, v);
                v
            }
        };
        values.push(v);
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    Ok(match basis {
        EveBasis::Bell => json!({"measure": "bell_fidelity", "min": min, "mean": mean, "max": max}),
        EveBasis::Product => json!({"measure": "minor_schmidt", "min": min, "mean": mean, "max": max}),
    })
}

/// Writes the JSON report to `out` and the CSV table beside it.
pub fn write_outputs(out: &Path, output: &RunOutput) -> CliResult<(PathBuf, PathBuf)> {
    let csv_path = out.with_extension("csv");
    if csv_path == out {
        return Err(CliError::Config(
            "--out must not end in .csv; the CSV table is written beside it".into(),
        ));
    }
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::write(out, &output.json).map_err(|e| io(out, e))?;
    std::fs::write(&csv_path, &output.csv).map_err(|e| io(&csv_path, e))?;
    Ok((out.to_path_buf(), csv_path))
}

fn rows_table(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|o| o.label.len()).max().unwrap_or(5).max(5);
    let mut s = format!(
        "{:width$}  {:>8}  {:>10}  {:>10}  pass\n",
        "label", "count", "frequency", "analytic"
    );
    for o in rows {
        s += &format!(
            "{:width$}  {:>8}  {:>10.6}  {:>10.6}  {}\n",
            o.label, o.count, o.frequency, o.analytic_p, o.pass
        );
    }
    s
}

pub fn render_run(output: &RunOutput) -> String {
    let r = &output.report;
    let mut s = format!(
        "scenario: {}\nseed: {}\ntrials: {}\nconfig_hash: {}\n",
        r.scenario, r.seed, r.trials, r.config_hash
    );
    s += &rows_table(&r.outcomes);
    for (key, value) in &r.extras {
        match serde_json::from_value::<Vec<ComparisonRow>>(value.clone()) {
            Ok(rows) => s += &format!("{key}:\n{}", rows_table(&rows)),
            Err(_) => s += &format!("{key}: {value}\n"),
        }
    }
    s += &format!("gate (k = {}): {}\n", r.k_sigma, if r.pass { "pass" } else { "FAIL" });
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphOutput {
    pub dot: String,
    pub connected: bool,
}

impl GraphOutput {
    pub fn connectivity_line(&self) -> String {
        let word = if self.connected { "connected" } else { "disconnected" };
        format!("D1 and D4: {word}")
    }
}

pub fn cmd_graph(scenario: &ScenarioConfig) -> CliResult<GraphOutput> {
    let ScenarioConfig::Swap(cfg) = scenario else {
        return Err(CliError::Config(format!(
            "graphs are defined for the swap scenario only, not `{}`",
            scenario.kind()
        )));
    };
    let graph = cfg.wave_graph()?;
    Ok(GraphOutput {
        connected: graph.connected("D1", "D4")?,
        dot: graph.to_dot(),
    })
}

/// Entanglement of the state left behind by one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSummary {
    pub outcome: String,
    pub probability: f64,
    pub schmidt: Vec<f64>,
    /// Closest Bell state and its fidelity.
    pub bell: (BellKind, f64),
    pub chsh: Option<f64>,
}

impl ConditionalSummary {
    pub fn is_bell(&self) -> bool {
        self.bell.1 >= 1.0 - FIDELITY_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub distribution: Distribution,
    pub metadata: Vec<(String, f64)>,
    pub conditionals: Vec<ConditionalSummary>,
}

fn best_bell(state: &StateVector, i: &SubsystemId, j: &SubsystemId) -> CliResult<(BellKind, f64)> {
    let mut best = (BellKind::PhiPlus, f64::NEG_INFINITY);
    for kind in BellKind::ALL {
        let f = bell_state(kind, i.clone(), j.clone())?.fidelity(state)?;
        if f > best.1 {
            best = (kind, f);
        }
    }
    Ok(best)
}

/// Exact distribution plus, where a scenario leaves a two-particle state
/// behind, its Schmidt coefficients, nearest Bell state and CHSH value.
pub fn cmd_analyze(setup: &Setup) -> CliResult<Analysis> {
    let experiment = setup.scenario.build()?;
    let mut conditionals = Vec::new();
    match &setup.scenario {
        ScenarioConfig::Swap(cfg) => {
            let setting = setup.chsh.setting();
            let (one, four) = (SubsystemId::from(1), SubsystemId::from(4));
            for branch in SwapExperiment::new(cfg.clone())?.eve_branches()? {
                let Some(state) = branch.state else { continue };
                conditionals.push(ConditionalSummary {
                    schmidt: schmidt_coefficients(&state, std::slice::from_ref(&one))?,
                    bell: best_bell(&state, &one, &four)?,
                    chsh: Some(chsh(&state, &one, &four, &setting)?),
                    outcome: branch.label,
                    probability: branch.probability,
                });
            }
        }
        ScenarioConfig::QuantumLiar(cfg) => {
            let liar = QuantumLiarExperiment::new(cfg.clone())?;
            let dist = liar.analytic_distribution();
            let (a1, a2) = (SubsystemId::from("atom1"), SubsystemId::from("atom2"));
            for outcome in LIAR_OUTCOMES {
                let Ok(state) = liar.conditional(outcome) else { continue };
                conditionals.push(ConditionalSummary {
                    outcome: outcome.to_owned(),
                    probability: dist[outcome],
                    schmidt: schmidt_coefficients(state, std::slice::from_ref(&a1))?,
                    bell: best_bell(state, &a1, &a2)?,
                    chsh: None,
                });
            }
        }
        ScenarioConfig::Renninger(_) | ScenarioConfig::Maudlin(_) => {}
    }
    Ok(Analysis {
        scenario: setup.scenario.kind(),
        config_hash: experiment.config_hash().to_owned(),
        distribution: experiment.analytic_distribution(),
        metadata: experiment.metadata(),
        conditionals,
    })
}

impl Analysis {
    pub fn render(&self) -> String {
        let mut s = format!("scenario: {}\nconfig_hash: {}\n", self.scenario, self.config_hash);
        for (k, v) in &self.metadata {
            s += &format!("{k}: {}\n", format_f64(*v));
        }
        s += "analytic distribution:\n";
        let width = self.distribution.keys().map(String::len).max().unwrap_or(0);
        for (label, p) in &self.distribution {
            s += &format!("  {label:width$}  {}\n", format_f64(*p));
        }
        if !self.conditionals.is_empty() {
            s += "conditional states:\n";
            for c in &self.conditionals {
                let schmidt: Vec<String> = c.schmidt.iter().map(|x| format!("{x:.6}")).collect();
                let bell = if c.is_bell() { c.bell.0.label() } else { "none" };
                s += &format!(
                    "  {:6}  p={:.6}  schmidt=({})  bell={} (fidelity {:.6})",
                    c.outcome,
                    c.probability,
                    schmidt.join(", "),
                    bell,
                    c.bell.1
                );
                if let Some(v) = c.chsh {
                    s += &format!("  chsh={v:.6}");
                }
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tisim_core::scenarios::{MaudlinConfig, RenningerConfig, SwapConfig};

    #[test]
    fn incomplete_maps_to_exit_three() {
        let e = CliError::from(Error::Incomplete { deficit: 0.5 });
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("deficit 0.500000"));
        assert_eq!(CliError::from(Error::EmptyEnsemble).exit_code(), 2);
    }

    #[test]
    fn overrides_apply_to_their_scenario_only() {
        let o = Overrides {
            eve_basis: Some(EveBasis::Product),
            ..Default::default()
        };
        let s = resolve(Some(ScenarioKind::Swap), None, &o).unwrap();
        assert_eq!(
            s.scenario,
            ScenarioConfig::Swap(SwapConfig::new(EveBasis::Product, MeasurementOrdering::EveFirst))
        );
        assert!(resolve(Some(ScenarioKind::Renninger), None, &o).is_err());
        let far = Overrides {
            far_left_absorber: true,
            ..Default::default()
        };
        let s = resolve(Some(ScenarioKind::Maudlin), None, &far).unwrap();
        assert_eq!(
            s.scenario,
            ScenarioConfig::Maudlin(MaudlinConfig {
                far_left_absorber: true
            })
        );
        assert!(resolve(None, None, &Overrides::default()).is_err());
    }

    #[test]
    fn run_records_seed_and_gate() {
        let m = RunManifest {
            scenario: ScenarioConfig::Renninger(RenningerConfig::default()),
            trials: 1000,
            seed: 42,
            k_sigma: 5.0,
            threads: Some(1),
        };
        let out = cmd_run(&m).unwrap();
        assert!(out.report.pass);
        assert_eq!(out.report.seed, 42);
        assert!(out.json.contains("\"seed\": 42"));
        assert!(out.report.metadata.contains_key("t1"));
        assert!(cmd_run(&RunManifest { trials: 0, ..m }).is_err());
    }

    #[test]
    fn graph_needs_swap() {
        let e = cmd_graph(&ScenarioConfig::Renninger(RenningerConfig::default())).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let g = cmd_graph(&ScenarioConfig::Swap(SwapConfig::default())).unwrap();
        assert_eq!(g.connectivity_line(), "D1 and D4: connected");
    }

    #[test]
    fn analyze_swap_product() {
        let setup = Setup {
            scenario: ScenarioConfig::Swap(SwapConfig::new(EveBasis::Product, MeasurementOrdering::EveFirst)),
            chsh: ChshConfig::default(),
        };
        let a = cmd_analyze(&setup).unwrap();
        assert_eq!(a.conditionals.len(), 4);
        for c in &a.conditionals {
            assert!((c.schmidt[0] - 1.0).abs() < 1e-9 && c.schmidt[1].abs() < 1e-9);
            assert!(!c.is_bell());
            assert!(c.chsh.unwrap().abs() <= 2.0 + 1e-9);
        }
        assert!(a.render().contains("bell=none"));
    }
}
