//! Scenario definition and execution: scheduled exogenous inputs, dated
//! parameter overrides, trajectory runs, evaluation against convergence
//! targets, and side-by-side scenario comparison.

pub mod doc;

use crate::engine::{
    self, EngineError, EngineParams, IndexConfig, SimulationState, Trajectory,
};
use crate::record::FlatRecord;
use crate::series::Series;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown key {key:?} at {path}{}", suggestion.as_ref().map(|s| format!(" (did you mean {s:?}?)")).unwrap_or_default())]
    Schema { path: String, key: String, suggestion: Option<String> },
    #[error("invariant violated at {field}: {rule}")]
    Invariant { field: String, rule: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("target {target:?} year {year} is outside the trajectory range [{first}, {last}]")]
    TargetYearOutOfRange { target: String, year: f64, first: f64, last: f64 },
    #[error("metric key {key:?} is not a trajectory column")]
    MissingMetricColumn { key: String },
    #[error("metric gdpp_ppp_ratio needs an eu_gdpp_ppp reference series")]
    MissingEuReference,
    #[error("scenario {name:?} spans [{got_start}, {got_end}] but the baseline spans [{expected_start}, {expected_end}]")]
    SpanMismatch {
        name: String,
        expected_start: f64,
        expected_end: f64,
        got_start: f64,
        got_end: f64,
    },
    #[error("scenario comparison needs at least two scenarios, got {got}")]
    NotEnoughScenarios { got: usize },
    #[error("scenario {name:?} failed: {source}")]
    ScenarioFailed { name: String, source: Box<ScenarioError> },
}

/// Inclusive simulated span in calendar years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start_year: f64,
    pub end_year: f64,
}

impl Span {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !self.start_year.is_finite() || !self.end_year.is_finite() {
            return Err(ScenarioError::Invariant {
                field: "span".into(),
                rule: "years must be finite".into(),
            });
        }
        if self.end_year <= self.start_year {
            return Err(ScenarioError::Invariant {
                field: "span".into(),
                rule: format!(
                    "end_year ({}) must exceed start_year ({})",
                    self.end_year, self.start_year
                ),
            });
        }
        Ok(())
    }

    pub fn years(&self) -> f64 {
        self.end_year - self.start_year
    }
}

/// A dated, dotted-path parameter override. Once its year is reached the
/// override stays in effect until a later event on the same path replaces it.
#[derive(Debug, Clone, PartialEq)]
pub struct OverrideEvent {
    pub effective_year: f64,
    pub target: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Greater,
    GreaterEq,
    Less,
    LessEq,
}

impl Comparator {
    pub fn symbol(&self) -> &'static str {
        match self {
            Comparator::Greater => ">",
            Comparator::GreaterEq => ">=",
            Comparator::Less => "<",
            Comparator::LessEq => "<=",
        }
    }

    pub fn parse(symbol: &str) -> Option<Self> {
        match symbol {
            ">" => Some(Comparator::Greater),
            ">=" => Some(Comparator::GreaterEq),
            "<" => Some(Comparator::Less),
            "<=" => Some(Comparator::LessEq),
            _ => None,
        }
    }

    pub fn holds(&self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Greater => value > threshold,
            Comparator::GreaterEq => value >= threshold,
            Comparator::Less => value < threshold,
            Comparator::LessEq => value <= threshold,
        }
    }

    /// Signed margin: positive means the satisfying direction.
    pub fn margin(&self, value: f64, threshold: f64) -> f64 {
        match self {
            Comparator::Greater | Comparator::GreaterEq => value - threshold,
            Comparator::Less | Comparator::LessEq => threshold - value,
        }
    }
}

/// What a horizon target measures.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Simulated GDP per capita divided by the EU-average reference series.
    GdppPppRatio,
    /// Any trajectory column read directly (i_sd, i_lq, hdi, hpi, ...).
    Column(String),
}

impl Metric {
    pub fn parse(key: &str) -> Self {
        if key == "gdpp_ppp_ratio" {
            Metric::GdppPppRatio
        } else {
            Metric::Column(key.to_string())
        }
    }

    pub fn key(&self) -> &str {
        match self {
            Metric::GdppPppRatio => "gdpp_ppp_ratio",
            Metric::Column(key) => key,
        }
    }
}

/// A dated convergence goal: compare a metric against a threshold at one year.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonTarget {
    pub name: String,
    pub year: f64,
    pub metric: Metric,
    pub comparator: Comparator,
    pub threshold: f64,
}

/// Year-indexed schedules for the inputs the model does not determine.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousSchedules {
    pub government_spending: Series,
    pub exports: Series,
    pub imports: Series,
    /// EU-average GDP per capita (PPP) reference; required by ratio targets.
    pub eu_gdpp_ppp: Option<Series>,
}

/// A fully resolved simulation plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub span: Span,
    pub initial: SimulationState,
    pub engine: EngineParams,
    pub index_config: IndexConfig,
    pub exogenous: ExogenousSchedules,
    /// Sorted by effective year at load; same-year events keep document order.
    pub overrides: Vec<OverrideEvent>,
    pub horizons: Vec<HorizonTarget>,
}

/// Outcome of one horizon target against one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetOutcome {
    pub name: String,
    pub year: f64,
    pub metric: String,
    pub comparator: Comparator,
    pub threshold: f64,
    /// Metric value read at the record used for this target.
    pub value: f64,
    pub met: bool,
    pub margin: f64,
    /// Year of the record the value was read from (at or before the target).
    pub record_year: f64,
    /// `year - record_year`; non-zero when dt misaligns with the target year.
    pub gap_years: f64,
    /// First record year at which the comparison holds, if it ever does.
    pub first_crossing_year: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub entries: Vec<TargetOutcome>,
}

/// One scenario's row in a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub final_i_sd: f64,
    pub final_i_lq: f64,
    pub horizons_met: usize,
    pub horizons_total: usize,
    pub delta_final_i_sd: f64,
    pub delta_final_i_lq: f64,
    pub targets: Vec<TargetDelta>,
}

/// A target outcome plus its delta against the baseline scenario's outcome
/// for the same-named target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDelta {
    pub name: String,
    pub value: f64,
    pub met: bool,
    pub margin: f64,
    pub delta_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub baseline: String,
    pub rows: Vec<ComparisonRow>,
}

/// Every dotted path an override may target.
pub const OVERRIDE_PATHS: [&str; 18] = [
    "engine.labor_share",
    "engine.savings_rate",
    "engine.depreciation_rate",
    "engine.resource_use_per_output",
    "engine.production.tfp",
    "engine.production.labor_elasticity",
    "engine.production.capital_elasticity",
    "engine.inflow.a0",
    "engine.inflow.a1",
    "engine.inflow.a3",
    "engine.inflow.a4",
    "engine.outflow.a0",
    "engine.outflow.a1",
    "engine.outflow.a3",
    "engine.outflow.a4",
    "exogenous.government_spending",
    "exogenous.exports",
    "exogenous.imports",
];

fn apply_path(params: &mut EngineParams, path: &str, value: f64) -> Result<(), ScenarioError> {
    let slot = match path {
        "engine.labor_share" => &mut params.labor_share,
        "engine.savings_rate" => &mut params.savings_rate,
        "engine.depreciation_rate" => &mut params.depreciation_rate,
        "engine.resource_use_per_output" => &mut params.resource_use_per_output,
        "engine.production.tfp" => &mut params.production.tfp,
        "engine.production.labor_elasticity" => &mut params.production.labor_elasticity,
        "engine.production.capital_elasticity" => &mut params.production.capital_elasticity,
        "engine.inflow.a0" => &mut params.inflow.a0,
        "engine.inflow.a1" => &mut params.inflow.a1,
        "engine.inflow.a3" => &mut params.inflow.a3,
        "engine.inflow.a4" => &mut params.inflow.a4,
        "engine.outflow.a0" => &mut params.outflow.a0,
        "engine.outflow.a1" => &mut params.outflow.a1,
        "engine.outflow.a3" => &mut params.outflow.a3,
        "engine.outflow.a4" => &mut params.outflow.a4,
        "exogenous.government_spending" => &mut params.exogenous.government_spending,
        "exogenous.exports" => &mut params.exogenous.exports,
        "exogenous.imports" => &mut params.exogenous.imports,
        _ => {
            return Err(ScenarioError::Schema {
                path: "overrides".into(),
                key: path.to_string(),
                suggestion: doc::nearest_key(path, &OVERRIDE_PATHS),
            })
        }
    };
    *slot = value;
    Ok(())
}

/// Apply every override effective at `current_year`, in year order, later
/// events winning on the same path. The input parameters are untouched.
///
/// Loaded scenarios cannot error here: paths are resolved at load time.
pub fn apply_overrides(
    params: &EngineParams,
    overrides: &[OverrideEvent],
    current_year: f64,
) -> Result<EngineParams, ScenarioError> {
    let mut effective = params.clone();
    for event in overrides.iter().filter(|e| e.effective_year <= current_year) {
        apply_path(&mut effective, &event.target, event.value)?;
    }
    Ok(effective)
}

impl Scenario {
    /// The engine parameters in force at `year`: scheduled exogenous flows
    /// resolved first, then overrides layered on top.
    pub fn effective_params(&self, year: f64) -> Result<EngineParams, ScenarioError> {
        let mut params = self.engine.clone();
        let schedule = |series: &Series, name: &str| {
            series.value_at(year).ok_or_else(|| ScenarioError::Invariant {
                field: format!("exogenous.{name}"),
                rule: format!("schedule has no value at year {year}"),
            })
        };
        params.exogenous.government_spending =
            schedule(&self.exogenous.government_spending, "government_spending")?;
        params.exogenous.exports = schedule(&self.exogenous.exports, "exports")?;
        params.exogenous.imports = schedule(&self.exogenous.imports, "imports")?;
        apply_overrides(&params, &self.overrides, year)
    }

    /// Number of engine steps across the span.
    pub fn step_count(&self) -> Result<usize, ScenarioError> {
        let steps = self.span.years() / self.engine.dt;
        let rounded = steps.round();
        if (rounded * self.engine.dt - self.span.years()).abs() > 1e-9 || rounded < 1.0 {
            return Err(ScenarioError::Invariant {
                field: "span".into(),
                rule: format!(
                    "span of {} years is not a positive integer multiple of dt = {}",
                    self.span.years(),
                    self.engine.dt
                ),
            });
        }
        Ok(rounded as usize)
    }

    /// Trajectory column keys a custom metric may reference.
    pub fn metric_keys(&self) -> Vec<String> {
        let mut keys = vec![
            "population".to_string(),
            "capital".to_string(),
            "resource_stock".to_string(),
        ];
        for class in self.initial.land.classes() {
            keys.push(format!("land_{}", class.name));
        }
        keys.extend(
            engine::IndicatorSnapshot::FIELD_NAMES.iter().map(|s| s.to_string()),
        );
        keys
    }

    /// Full structural and invariant validation; anything that passes here
    /// runs without validation errors.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.span.validate()?;
        self.initial.validate()?;
        if self.initial.time != self.span.start_year {
            return Err(ScenarioError::Invariant {
                field: "initial.time".into(),
                rule: format!(
                    "initial state time {} must equal span.start_year {}",
                    self.initial.time, self.span.start_year
                ),
            });
        }
        if self.initial.land.total() <= 0.0 {
            return Err(ScenarioError::Invariant {
                field: "initial.land".into(),
                rule: "total land area must be positive".into(),
            });
        }
        self.engine.validate_against_land(&self.initial.land)?;
        self.index_config.validate()?;
        if let engine::SecuritySource::Series(series) = &self.index_config.security {
            if series.first_year() > self.span.start_year {
                return Err(ScenarioError::Invariant {
                    field: "index_config.security.series".into(),
                    rule: format!(
                        "series starts at {} but must cover the span start {}",
                        series.first_year(),
                        self.span.start_year
                    ),
                });
            }
            for &(year, value) in series.points() {
                if value < 0.0 {
                    return Err(ScenarioError::Invariant {
                        field: "index_config.security.series".into(),
                        rule: format!("value at year {year} must be non-negative, got {value}"),
                    });
                }
            }
        }
        // The initial snapshot must evaluate: this statically rejects
        // configurations that could only fail at t = 0 (all-zero component
        // indices, zero initial population, unusable goalposts).
        engine::compute_indicators(&self.initial, &self.index_config)?;
        self.step_count()?;

        for (name, series) in [
            ("government_spending", &self.exogenous.government_spending),
            ("exports", &self.exogenous.exports),
            ("imports", &self.exogenous.imports),
        ] {
            if series.first_year() > self.span.start_year {
                return Err(ScenarioError::Invariant {
                    field: format!("exogenous.{name}"),
                    rule: format!(
                        "schedule starts at {} but must cover the span start {}",
                        series.first_year(),
                        self.span.start_year
                    ),
                });
            }
            for &(year, value) in series.points() {
                if value < 0.0 {
                    return Err(ScenarioError::Invariant {
                        field: format!("exogenous.{name}"),
                        rule: format!("value at year {year} must be non-negative, got {value}"),
                    });
                }
            }
        }

        let mut sorted = true;
        for pair in self.overrides.windows(2) {
            if pair[0].effective_year > pair[1].effective_year {
                sorted = false;
            }
        }
        if !sorted {
            return Err(ScenarioError::Invariant {
                field: "overrides".into(),
                rule: "events must be sorted by effective year".into(),
            });
        }
        for event in &self.overrides {
            if !event.value.is_finite() {
                return Err(ScenarioError::Invariant {
                    field: format!("overrides.{}", event.target),
                    rule: format!("value must be finite, got {}", event.value),
                });
            }
            if !event.effective_year.is_finite() || event.effective_year < self.span.start_year {
                return Err(ScenarioError::Invariant {
                    field: format!("overrides.{}", event.target),
                    rule: format!(
                        "effective year {} precedes the span start {}",
                        event.effective_year, self.span.start_year
                    ),
                });
            }
            // path resolution check against a scratch parameter set
            apply_path(&mut self.engine.clone(), &event.target, event.value)?;
        }
        // Replay the overrides and schedules at every year where the
        // effective parameter set changes, so a value that would break an
        // engine invariant mid-run is caught now.
        let mut change_years: Vec<f64> = vec![self.span.start_year];
        change_years.extend(
            self.overrides
                .iter()
                .map(|e| e.effective_year)
                .filter(|y| *y <= self.span.end_year),
        );
        for series in [
            &self.exogenous.government_spending,
            &self.exogenous.exports,
            &self.exogenous.imports,
        ] {
            change_years.extend(
                series
                    .points()
                    .iter()
                    .map(|(y, _)| *y)
                    .filter(|y| *y >= self.span.start_year && *y <= self.span.end_year),
            );
        }
        for year in change_years {
            let params = self.effective_params(year)?;
            params.validate_against_land(&self.initial.land)?;
        }

        let metric_keys = self.metric_keys();
        let needs_eu =
            self.horizons.iter().any(|t| matches!(t.metric, Metric::GdppPppRatio));
        if needs_eu {
            let series = self
                .exogenous
                .eu_gdpp_ppp
                .as_ref()
                .ok_or(ScenarioError::MissingEuReference)?;
            if series.first_year() > self.span.start_year {
                return Err(ScenarioError::Invariant {
                    field: "exogenous.eu_gdpp_ppp".into(),
                    rule: format!(
                        "reference series starts at {} but must cover the span start {}",
                        series.first_year(),
                        self.span.start_year
                    ),
                });
            }
            for &(year, value) in series.points() {
                if value <= 0.0 {
                    return Err(ScenarioError::Invariant {
                        field: "exogenous.eu_gdpp_ppp".into(),
                        rule: format!(
                            "reference value at year {year} must be positive, got {value}"
                        ),
                    });
                }
            }
        }
        for target in &self.horizons {
            if !target.threshold.is_finite() {
                return Err(ScenarioError::Invariant {
                    field: format!("horizons.{}", target.name),
                    rule: format!("threshold must be finite, got {}", target.threshold),
                });
            }
            if target.year < self.span.start_year || target.year > self.span.end_year {
                return Err(ScenarioError::Invariant {
                    field: format!("horizons.{}", target.name),
                    rule: format!(
                        "target year {} lies outside the span [{}, {}]",
                        target.year, self.span.start_year, self.span.end_year
                    ),
                });
            }
            if let Metric::Column(key) = &target.metric {
                if !metric_keys.iter().any(|k| k == key) {
                    return Err(ScenarioError::Schema {
                        path: format!("horizons.{}.metric", target.name),
                        key: key.clone(),
                        suggestion: doc::nearest_key(
                            key,
                            &metric_keys.iter().map(String::as_str).collect::<Vec<_>>(),
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Step the scenario over its span, re-resolving effective parameters at
/// every step boundary, then evaluate its horizon targets.
pub fn run_scenario(scenario: &Scenario) -> Result<(Trajectory, ConvergenceReport), ScenarioError> {
    let attach = |source: ScenarioError| ScenarioError::ScenarioFailed {
        name: scenario.name.clone(),
        source: Box::new(source),
    };
    let steps = scenario.step_count().map_err(&attach)?;

    let mut records = Vec::with_capacity(steps + 1);
    let mut state = scenario.initial.clone();
    let indicators = engine::compute_indicators(&state, &scenario.index_config)
        .map_err(|e| attach(e.into()))?;
    records.push(engine::TrajectoryRecord { state: state.clone(), indicators });
    for index in 0..steps {
        let params = scenario.effective_params(state.time).map_err(&attach)?;
        state = engine::step(&state, &params)
            .map_err(|e| attach(EngineError::StepFailed { step: index, source: Box::new(e) }.into()))?;
        let indicators = engine::compute_indicators(&state, &scenario.index_config)
            .map_err(|e| attach(EngineError::StepFailed { step: index, source: Box::new(e) }.into()))?;
        records.push(engine::TrajectoryRecord { state: state.clone(), indicators });
    }
    let trajectory = Trajectory { records };
    let report = evaluate_horizons(
        &trajectory.flat_records(),
        &scenario.horizons,
        scenario.exogenous.eu_gdpp_ppp.as_ref(),
    )
    .map_err(&attach)?;
    Ok((trajectory, report))
}

fn metric_value(
    record: &FlatRecord,
    metric: &Metric,
    eu: Option<&Series>,
    at_year: f64,
) -> Result<Option<f64>, ScenarioError> {
    match metric {
        Metric::GdppPppRatio => {
            let gdpp = record.get("gdpp").ok_or_else(|| ScenarioError::MissingMetricColumn {
                key: "gdpp".into(),
            })?;
            let series = eu.ok_or(ScenarioError::MissingEuReference)?;
            match series.value_at(at_year) {
                Some(reference) if reference > 0.0 => Ok(Some(gdpp / reference)),
                // reference not defined (or degenerate) at this year
                _ => Ok(None),
            }
        }
        Metric::Column(key) => record
            .get(key)
            .ok_or_else(|| ScenarioError::MissingMetricColumn { key: key.clone() })
            .map(Some),
    }
}

/// Evaluate horizon targets against flat trajectory records. Each target
/// reads the nearest record at or before its year; the gap is reported when
/// the step size misaligns.
pub fn evaluate_horizons(
    records: &[FlatRecord],
    horizons: &[HorizonTarget],
    eu: Option<&Series>,
) -> Result<ConvergenceReport, ScenarioError> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(first), Some(last)) => (first.year, last.year),
        _ => (f64::NAN, f64::NAN),
    };
    let mut entries = Vec::with_capacity(horizons.len());
    for target in horizons {
        let record = records
            .iter()
            .rev()
            .find(|r| r.year <= target.year + 1e-9)
            .filter(|_| target.year <= last + 1e-9)
            .ok_or_else(|| ScenarioError::TargetYearOutOfRange {
                target: target.name.clone(),
                year: target.year,
                first,
                last,
            })?;
        let value = metric_value(record, &target.metric, eu, target.year)?.ok_or_else(|| {
            ScenarioError::Invariant {
                field: format!("horizons.{}", target.name),
                rule: format!(
                    "eu_gdpp_ppp reference has no positive value at year {}",
                    target.year
                ),
            }
        })?;
        let met = target.comparator.holds(value, target.threshold);
        let margin = target.comparator.margin(value, target.threshold);

        let mut first_crossing_year = None;
        for r in records {
            if let Some(v) = metric_value(r, &target.metric, eu, r.year)? {
                if target.comparator.holds(v, target.threshold) {
                    first_crossing_year = Some(r.year);
                    break;
                }
            }
        }

        entries.push(TargetOutcome {
            name: target.name.clone(),
            year: target.year,
            metric: target.metric.key().to_string(),
            comparator: target.comparator,
            threshold: target.threshold,
            value,
            met,
            margin,
            record_year: record.year,
            gap_years: (target.year - record.year).max(0.0),
            first_crossing_year,
        });
    }
    Ok(ConvergenceReport { entries })
}

/// Run every scenario (concurrently) and tabulate final indices, horizon
/// pass counts, and per-target deltas against the first scenario.
pub fn compare_scenarios(scenarios: &[Scenario]) -> Result<ComparisonTable, ScenarioError> {
    if scenarios.len() < 2 {
        return Err(ScenarioError::NotEnoughScenarios { got: scenarios.len() });
    }
    let baseline_span = scenarios[0].span;
    for scenario in &scenarios[1..] {
        if scenario.span != baseline_span {
            return Err(ScenarioError::SpanMismatch {
                name: scenario.name.clone(),
                expected_start: baseline_span.start_year,
                expected_end: baseline_span.end_year,
                got_start: scenario.span.start_year,
                got_end: scenario.span.end_year,
            });
        }
    }

    let results: Vec<Result<(Trajectory, ConvergenceReport), ScenarioError>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> =
                scenarios.iter().map(|s| scope.spawn(move || run_scenario(s))).collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
        });

    let mut rows = Vec::with_capacity(scenarios.len());
    let mut baseline_finals: Option<(f64, f64)> = None;
    let mut baseline_targets: Vec<(String, f64)> = Vec::new();
    for (scenario, result) in scenarios.iter().zip(results) {
        let (trajectory, report) = result?;
        let flat = trajectory.flat_records();
        let last = flat.last().expect("a run always has records");
        let final_i_sd = last.get("i_sd").unwrap_or(f64::NAN);
        let final_i_lq = last.get("i_lq").unwrap_or(f64::NAN);
        let (base_sd, base_lq) = *baseline_finals.get_or_insert((final_i_sd, final_i_lq));
        if baseline_targets.is_empty() {
            baseline_targets =
                report.entries.iter().map(|e| (e.name.clone(), e.value)).collect();
        }
        let targets = report
            .entries
            .iter()
            .map(|entry| TargetDelta {
                name: entry.name.clone(),
                value: entry.value,
                met: entry.met,
                margin: entry.margin,
                delta_value: baseline_targets
                    .iter()
                    .find(|(name, _)| name == &entry.name)
                    .map(|(_, base)| entry.value - base),
            })
            .collect();
        rows.push(ComparisonRow {
            name: scenario.name.clone(),
            final_i_sd,
            final_i_lq,
            horizons_met: report.entries.iter().filter(|e| e.met).count(),
            horizons_total: report.entries.len(),
            delta_final_i_sd: final_i_sd - base_sd,
            delta_final_i_lq: final_i_lq - base_lq,
            targets,
        });
    }
    Ok(ComparisonTable { baseline: scenarios[0].name.clone(), rows })
}

#[cfg(test)]
mod tests;
