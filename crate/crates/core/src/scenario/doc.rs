//! Scenario document loading and serialization.
//!
//! Documents are a JSON tree with nested keys. The decoder is schema-
//! directed: unknown keys are rejected with the nearest valid key suggested,
//! type mismatches and broken invariants name the offending field, and a
//! document that loads is fully validated, so running it cannot hit a
//! validation error later. Omitted sections fall back to the documented
//! defaults.

use super::{
    Comparator, ExogenousSchedules, HorizonTarget, Metric, OverrideEvent, Scenario,
    ScenarioError, Span,
};
use crate::engine::{
    EducationInput, EngineParams, ExogenousFlows, IndexConfig, IndicatorSource, LandAllocation,
    LandClass, LandTransitionMatrix, SecuritySource, SimulationState, WeightedSource,
    WellbeingMeasure,
};
use crate::kernel::{Goalposts, HpiInputs, NationalAccounts, PpflParams, ProductionParams};
use crate::series::Series;
use serde_json::{json, Map, Value};

const SOURCE_NAMES: [&str; 8] = [
    "wellbeing",
    "hdi",
    "poverty_complement",
    "gdpp_index",
    "infrastructure",
    "resource_index",
    "green_share",
    "constant",
];

/// Parse, decode, and fully validate a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scenario = decode_scenario(value)?;
    scenario.validate()?;
    Ok(scenario)
}

/// Serialize with every default resolved, so loading the output reproduces
/// the scenario structurally.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&scenario_to_json(scenario))
        .expect("scenario values are always JSON-representable");
    text.push('\n');
    text
}

/// Candidate closest to `key` by edit distance.
pub fn nearest_key(key: &str, candidates: &[&str]) -> Option<String> {
    candidates.iter().min_by_key(|c| levenshtein(key, c)).map(|s| s.to_string())
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut previous: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut current = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let substitution = previous[j] + usize::from(ca != cb);
            current.push(substitution.min(previous[j + 1] + 1).min(current[j] + 1));
        }
        previous = current;
    }
    previous[b.len()]
}

fn invariant(field: impl Into<String>, rule: impl Into<String>) -> ScenarioError {
    ScenarioError::Invariant { field: field.into(), rule: rule.into() }
}

fn kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// A JSON object being consumed key by key; leftovers are schema errors.
struct Obj {
    path: String,
    map: Map<String, Value>,
}

impl Obj {
    fn from_value(value: Value, path: &str) -> Result<Self, ScenarioError> {
        match value {
            Value::Object(map) => Ok(Self { path: path.to_string(), map }),
            other => Err(invariant(path, format!("expected an object, got {}", kind(&other)))),
        }
    }

    fn child(&self, key: &str) -> String {
        format!("{}.{}", self.path, key)
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value, ScenarioError> {
        self.take(key).ok_or_else(|| invariant(self.child(key), "required key is missing"))
    }

    fn req_f64(&mut self, key: &str) -> Result<f64, ScenarioError> {
        let path = self.child(key);
        as_f64(self.require(key)?, &path)
    }

    fn opt_f64(&mut self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        let path = self.child(key);
        self.take(key).map_or(Ok(default), |v| as_f64(v, &path))
    }

    fn req_string(&mut self, key: &str) -> Result<String, ScenarioError> {
        let path = self.child(key);
        as_string(self.require(key)?, &path)
    }

    fn opt_string(&mut self, key: &str, default: &str) -> Result<String, ScenarioError> {
        let path = self.child(key);
        self.take(key).map_or(Ok(default.to_string()), |v| as_string(v, &path))
    }

    fn opt_bool(&mut self, key: &str, default: bool) -> Result<bool, ScenarioError> {
        let path = self.child(key);
        self.take(key).map_or(Ok(default), |v| match v {
            Value::Bool(b) => Ok(b),
            other => Err(invariant(path, format!("expected a boolean, got {}", kind(&other)))),
        })
    }

    fn finish(self, allowed: &[&str]) -> Result<(), ScenarioError> {
        if let Some((key, _)) = self.map.iter().next() {
            return Err(ScenarioError::Schema {
                path: self.path,
                key: key.clone(),
                suggestion: nearest_key(key, allowed),
            });
        }
        Ok(())
    }
}

fn as_f64(value: Value, path: &str) -> Result<f64, ScenarioError> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| invariant(path, "number does not fit a 64-bit float")),
        other => Err(invariant(path, format!("expected a number, got {}", kind(&other)))),
    }
}

fn as_string(value: Value, path: &str) -> Result<String, ScenarioError> {
    match value {
        Value::String(s) => Ok(s),
        other => Err(invariant(path, format!("expected a string, got {}", kind(&other)))),
    }
}

fn as_array(value: Value, path: &str) -> Result<Vec<Value>, ScenarioError> {
    match value {
        Value::Array(items) => Ok(items),
        other => Err(invariant(path, format!("expected an array, got {}", kind(&other)))),
    }
}

fn decode_scenario(value: Value) -> Result<Scenario, ScenarioError> {
    let mut root = Obj::from_value(value, "scenario")?;
    let name = root.req_string("name")?;

    let mut span_obj = Obj::from_value(root.require("span")?, "scenario.span")?;
    let span = Span {
        start_year: span_obj.req_f64("start_year")?,
        end_year: span_obj.req_f64("end_year")?,
    };
    span_obj.finish(&["start_year", "end_year"])?;

    let (initial, resource_stock) = decode_initial(root.require("initial")?, span.start_year)?;
    let engine = match root.take("engine") {
        Some(value) => decode_engine(value, &initial.land)?,
        None => default_engine(&initial.land),
    };
    let index_config = match root.take("index_config") {
        Some(value) => decode_index_config(value, resource_stock)?,
        None => default_index_config(resource_stock)?,
    };
    let exogenous = match root.take("exogenous") {
        Some(value) => decode_exogenous(value, span.start_year)?,
        None => default_exogenous(span.start_year),
    };
    let mut overrides = match root.take("overrides") {
        Some(value) => decode_overrides(value)?,
        None => Vec::new(),
    };
    overrides.sort_by(|a, b| {
        a.effective_year.partial_cmp(&b.effective_year).unwrap_or(std::cmp::Ordering::Equal)
    });
    let horizons = match root.take("horizons") {
        Some(value) => decode_horizons(value)?,
        None => Vec::new(),
    };
    root.finish(&[
        "name",
        "span",
        "initial",
        "engine",
        "index_config",
        "exogenous",
        "overrides",
        "horizons",
    ])?;

    Ok(Scenario { name, span, initial, engine, index_config, exogenous, overrides, horizons })
}

fn decode_initial(
    value: Value,
    start_year: f64,
) -> Result<(SimulationState, f64), ScenarioError> {
    let mut obj = Obj::from_value(value, "scenario.initial")?;
    let population = obj.req_f64("population")?;
    let capital = obj.req_f64("capital")?;
    let resource_stock = obj.opt_f64("resource_stock", 0.0)?;

    let mut land_obj = Obj::from_value(obj.require("land")?, "scenario.initial.land")?;
    let types_path = land_obj.child("types");
    let types = as_array(land_obj.require("types")?, &types_path)?;
    land_obj.finish(&["types"])?;
    let mut classes = Vec::with_capacity(types.len());
    for (i, item) in types.into_iter().enumerate() {
        let path = format!("{types_path}[{i}]");
        let mut class = Obj::from_value(item, &path)?;
        classes.push(LandClass {
            name: class.req_string("name")?,
            area: class.req_f64("area")?,
            green: class.opt_bool("green", false)?,
        });
        class.finish(&["name", "area", "green"])?;
    }
    let land = LandAllocation::new(classes)?;

    let accounts = match obj.take("accounts") {
        Some(value) => {
            let mut acc = Obj::from_value(value, "scenario.initial.accounts")?;
            let accounts = NationalAccounts {
                consumption: acc.opt_f64("consumption", 0.0)?,
                investment: acc.opt_f64("investment", 0.0)?,
                government_spending: acc.opt_f64("government_spending", 0.0)?,
                exports: acc.opt_f64("exports", 0.0)?,
                imports: acc.opt_f64("imports", 0.0)?,
            };
            acc.finish(&["consumption", "investment", "government_spending", "exports", "imports"])?;
            accounts
        }
        None => NationalAccounts::zero(),
    };
    obj.finish(&["population", "capital", "resource_stock", "land", "accounts"])?;

    let state = SimulationState {
        time: start_year,
        population,
        capital,
        land,
        resource_stock,
        accounts,
    };
    Ok((state, resource_stock))
}

fn default_engine(land: &LandAllocation) -> EngineParams {
    EngineParams {
        inflow: PpflParams::zero(),
        outflow: PpflParams::zero(),
        production: ProductionParams { tfp: 1.0, labor_elasticity: 0.3, capital_elasticity: 0.3 },
        labor_share: 0.4,
        savings_rate: 0.2,
        depreciation_rate: 0.05,
        resource_use_per_output: 0.0,
        land_transitions: LandTransitionMatrix::zero(land.names()),
        production_land_types: vec!["agricultural".to_string(), "urban_industrial".to_string()],
        exogenous: ExogenousFlows::zero(),
        dt: 1.0,
    }
}

fn decode_ppfl(value: Value, path: &str) -> Result<PpflParams, ScenarioError> {
    let mut obj = Obj::from_value(value, path)?;
    let params = PpflParams {
        a0: obj.opt_f64("a0", 0.0)?,
        a1: obj.opt_f64("a1", 0.0)?,
        a3: obj.opt_f64("a3", 0.0)?,
        a4: obj.opt_f64("a4", 0.0)?,
    };
    obj.finish(&["a0", "a1", "a3", "a4"])?;
    Ok(params)
}

fn decode_engine(value: Value, land: &LandAllocation) -> Result<EngineParams, ScenarioError> {
    let defaults = default_engine(land);
    let mut obj = Obj::from_value(value, "scenario.engine")?;

    let inflow = match obj.take("inflow") {
        Some(v) => decode_ppfl(v, "scenario.engine.inflow")?,
        None => defaults.inflow,
    };
    let outflow = match obj.take("outflow") {
        Some(v) => decode_ppfl(v, "scenario.engine.outflow")?,
        None => defaults.outflow,
    };
    let production = match obj.take("production") {
        Some(v) => {
            let mut prod = Obj::from_value(v, "scenario.engine.production")?;
            let params = ProductionParams {
                tfp: prod.opt_f64("tfp", 1.0)?,
                labor_elasticity: prod.opt_f64("labor_elasticity", 0.3)?,
                capital_elasticity: prod.opt_f64("capital_elasticity", 0.3)?,
            };
            prod.finish(&["tfp", "labor_elasticity", "capital_elasticity"])?;
            params
        }
        None => defaults.production,
    };
    let labor_share = obj.opt_f64("labor_share", defaults.labor_share)?;
    let savings_rate = obj.opt_f64("savings_rate", defaults.savings_rate)?;
    let depreciation_rate = obj.opt_f64("depreciation_rate", defaults.depreciation_rate)?;
    let resource_use_per_output =
        obj.opt_f64("resource_use_per_output", defaults.resource_use_per_output)?;
    let dt = obj.opt_f64("dt", defaults.dt)?;

    let land_transitions = match obj.take("land_transitions") {
        Some(v) => {
            let path = "scenario.engine.land_transitions";
            let items = as_array(v, path)?;
            let mut transitions = Vec::with_capacity(items.len());
            for (i, item) in items.into_iter().enumerate() {
                let item_path = format!("{path}[{i}]");
                let mut t = Obj::from_value(item, &item_path)?;
                transitions.push((t.req_string("from")?, t.req_string("to")?, t.req_f64("rate")?));
                t.finish(&["from", "to", "rate"])?;
            }
            LandTransitionMatrix::from_transitions(land.names(), &transitions)?
        }
        None => defaults.land_transitions,
    };
    let production_land_types = match obj.take("production_land_types") {
        Some(v) => {
            let path = "scenario.engine.production_land_types";
            let items = as_array(v, path)?;
            let mut names = Vec::with_capacity(items.len());
            for (i, item) in items.into_iter().enumerate() {
                names.push(as_string(item, &format!("{path}[{i}]"))?);
            }
            names
        }
        None => defaults.production_land_types,
    };
    obj.finish(&[
        "inflow",
        "outflow",
        "production",
        "labor_share",
        "savings_rate",
        "depreciation_rate",
        "resource_use_per_output",
        "land_transitions",
        "production_land_types",
        "dt",
    ])?;

    Ok(EngineParams {
        inflow,
        outflow,
        production,
        labor_share,
        savings_rate,
        depreciation_rate,
        resource_use_per_output,
        land_transitions,
        production_land_types,
        exogenous: ExogenousFlows::zero(),
        dt,
    })
}

fn default_index_config(resource_stock: f64) -> Result<IndexConfig, ScenarioError> {
    let social = vec![WeightedSource { source: IndicatorSource::Wellbeing, weight: 1.0 }];
    Ok(IndexConfig {
        wellbeing: WellbeingMeasure::Hdi,
        social: social.clone(),
        economic: vec![WeightedSource { source: IndicatorSource::GdppIndex, weight: 1.0 }],
        natural: vec![WeightedSource { source: IndicatorSource::GreenShare, weight: 1.0 }],
        security: SecuritySource::Composite(
            social.into_iter().map(|ws| WeightedSource { source: ws.source, weight: 1.0 }).collect(),
        ),
        education: EducationInput::Index(0.75),
        life_expectancy_years: 70.0,
        hpi_inputs: HpiInputs { p1: 15.0, p2: 10.0, p3: 20.0, alpha: 3.0 },
        infrastructure: None,
        gdpp_goalposts: Goalposts { min: 100.0, max: 40000.0 },
        gdpp_log_scale: true,
        life_expectancy_goalposts: Goalposts { min: 25.0, max: 85.0 },
        resource_goalposts: if resource_stock > 0.0 {
            Some(Goalposts { min: 0.0, max: resource_stock })
        } else {
            None
        },
    })
}

fn decode_source(value: Value, path: &str) -> Result<WeightedSource, ScenarioError> {
    let mut obj = Obj::from_value(value, path)?;
    let source_name = obj.req_string("source")?;
    let weight = obj.opt_f64("weight", 1.0)?;
    let source = match source_name.as_str() {
        "wellbeing" => IndicatorSource::Wellbeing,
        "hdi" => IndicatorSource::Hdi,
        "poverty_complement" => IndicatorSource::PovertyComplement,
        "gdpp_index" => IndicatorSource::GdppIndex,
        "infrastructure" => IndicatorSource::Infrastructure,
        "resource_index" => IndicatorSource::ResourceIndex,
        "green_share" => IndicatorSource::GreenShare,
        "constant" => IndicatorSource::Constant(obj.req_f64("value")?),
        other => {
            return Err(ScenarioError::Schema {
                path: format!("{path}.source"),
                key: other.to_string(),
                suggestion: nearest_key(other, &SOURCE_NAMES),
            })
        }
    };
    obj.finish(&["source", "weight", "value"])?;
    Ok(WeightedSource { source, weight })
}

fn decode_source_list(value: Value, path: &str) -> Result<Vec<WeightedSource>, ScenarioError> {
    let items = as_array(value, path)?;
    let mut sources = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        sources.push(decode_source(item, &format!("{path}[{i}]"))?);
    }
    Ok(sources)
}

fn decode_goalposts(value: Value, path: &str) -> Result<(Goalposts, bool), ScenarioError> {
    let mut obj = Obj::from_value(value, path)?;
    let min = obj.req_f64("min")?;
    let max = obj.req_f64("max")?;
    let log_scale = obj.opt_bool("log_scale", false)?;
    obj.finish(&["min", "max", "log_scale"])?;
    let posts = Goalposts::new(min, max)
        .map_err(|e| invariant(path, e.to_string()))?;
    Ok((posts, log_scale))
}

fn decode_index_config(value: Value, resource_stock: f64) -> Result<IndexConfig, ScenarioError> {
    let defaults = default_index_config(resource_stock)?;
    let mut obj = Obj::from_value(value, "scenario.index_config")?;

    let wellbeing = match obj.opt_string("wellbeing", "hdi")?.as_str() {
        "hdi" => WellbeingMeasure::Hdi,
        "hpi" => WellbeingMeasure::Hpi,
        other => {
            return Err(ScenarioError::Schema {
                path: "scenario.index_config.wellbeing".into(),
                key: other.to_string(),
                suggestion: nearest_key(other, &["hdi", "hpi"]),
            })
        }
    };
    let social = match obj.take("social") {
        Some(v) => decode_source_list(v, "scenario.index_config.social")?,
        None => defaults.social,
    };
    let economic = match obj.take("economic") {
        Some(v) => decode_source_list(v, "scenario.index_config.economic")?,
        None => defaults.economic,
    };
    let natural = match obj.take("natural") {
        Some(v) => decode_source_list(v, "scenario.index_config.natural")?,
        None => defaults.natural,
    };
    let security = match obj.take("security") {
        Some(v) => {
            let path = "scenario.index_config.security";
            let mut sec = Obj::from_value(v, path)?;
            let series = sec.take("series");
            let composite = sec.take("composite");
            sec.finish(&["series", "composite"])?;
            match (series, composite) {
                (Some(points), None) => SecuritySource::Series(decode_series_points(
                    points,
                    &format!("{path}.series"),
                )?),
                (None, Some(list)) => SecuritySource::Composite(decode_source_list(
                    list,
                    &format!("{path}.composite"),
                )?),
                _ => {
                    return Err(invariant(
                        path,
                        "exactly one of \"series\" or \"composite\" is required",
                    ))
                }
            }
        }
        None => SecuritySource::Composite(
            social
                .iter()
                .map(|ws| WeightedSource { source: ws.source, weight: 1.0 })
                .collect(),
        ),
    };
    let education = match obj.take("education") {
        Some(v) => {
            let path = "scenario.index_config.education";
            let mut edu = Obj::from_value(v, path)?;
            let index = edu.take("index");
            let percent = edu.take("percent");
            edu.finish(&["index", "percent"])?;
            match (index, percent) {
                (Some(v), None) => EducationInput::Index(as_f64(v, &format!("{path}.index"))?),
                (None, Some(v)) => {
                    EducationInput::Percent(as_f64(v, &format!("{path}.percent"))?)
                }
                _ => {
                    return Err(invariant(
                        path,
                        "exactly one of \"index\" or \"percent\" is required",
                    ))
                }
            }
        }
        None => defaults.education,
    };
    let life_expectancy_years =
        obj.opt_f64("life_expectancy_years", defaults.life_expectancy_years)?;
    let hpi_inputs = match obj.take("hpi") {
        Some(v) => {
            let mut hpi = Obj::from_value(v, "scenario.index_config.hpi")?;
            let inputs = HpiInputs {
                p1: hpi.opt_f64("p1", defaults.hpi_inputs.p1)?,
                p2: hpi.opt_f64("p2", defaults.hpi_inputs.p2)?,
                p3: hpi.opt_f64("p3", defaults.hpi_inputs.p3)?,
                alpha: hpi.opt_f64("alpha", defaults.hpi_inputs.alpha)?,
            };
            hpi.finish(&["p1", "p2", "p3", "alpha"])?;
            inputs
        }
        None => defaults.hpi_inputs,
    };
    let infrastructure = match obj.take("infrastructure") {
        Some(v) => {
            let path = "scenario.index_config.infrastructure";
            let mut infra = Obj::from_value(v, path)?;
            let values_path = format!("{path}.values");
            let values = as_array(infra.require("values")?, &values_path)?
                .into_iter()
                .enumerate()
                .map(|(i, v)| as_f64(v, &format!("{values_path}[{i}]")))
                .collect::<Result<Vec<f64>, _>>()?;
            let weights = match infra.take("weights") {
                Some(w) => {
                    let weights_path = format!("{path}.weights");
                    as_array(w, &weights_path)?
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| as_f64(v, &format!("{weights_path}[{i}]")))
                        .collect::<Result<Vec<f64>, _>>()?
                }
                None => vec![1.0; values.len()],
            };
            infra.finish(&["values", "weights"])?;
            Some((values, weights))
        }
        None => None,
    };

    let mut gdpp_goalposts = defaults.gdpp_goalposts;
    let mut gdpp_log_scale = defaults.gdpp_log_scale;
    let mut life_expectancy_goalposts = defaults.life_expectancy_goalposts;
    let mut resource_goalposts = defaults.resource_goalposts;
    if let Some(v) = obj.take("goalposts") {
        let path = "scenario.index_config.goalposts";
        let mut posts = Obj::from_value(v, path)?;
        if let Some(g) = posts.take("gdpp") {
            let (parsed, log_scale) = decode_goalposts(g, &format!("{path}.gdpp"))?;
            gdpp_goalposts = parsed;
            gdpp_log_scale = log_scale;
        }
        if let Some(g) = posts.take("life_expectancy") {
            let (parsed, _) = decode_goalposts(g, &format!("{path}.life_expectancy"))?;
            life_expectancy_goalposts = parsed;
        }
        if let Some(g) = posts.take("resource") {
            let (parsed, _) = decode_goalposts(g, &format!("{path}.resource"))?;
            resource_goalposts = Some(parsed);
        }
        posts.finish(&["gdpp", "life_expectancy", "resource"])?;
    }
    obj.finish(&[
        "wellbeing",
        "social",
        "economic",
        "natural",
        "security",
        "education",
        "life_expectancy_years",
        "hpi",
        "infrastructure",
        "goalposts",
    ])?;

    Ok(IndexConfig {
        wellbeing,
        social,
        economic,
        natural,
        security,
        education,
        life_expectancy_years,
        hpi_inputs,
        infrastructure,
        gdpp_goalposts,
        gdpp_log_scale,
        life_expectancy_goalposts,
        resource_goalposts,
    })
}

fn decode_series_points(value: Value, path: &str) -> Result<Series, ScenarioError> {
    let items = as_array(value, path)?;
    let mut points = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let item_path = format!("{path}[{i}]");
        let mut point = Obj::from_value(item, &item_path)?;
        points.push((point.req_f64("year")?, point.req_f64("value")?));
        point.finish(&["year", "value"])?;
    }
    Series::new(points).map_err(|e| invariant(path, e.to_string()))
}

/// A schedule is either a plain number (constant from the span start) or an
/// array of `{year, value}` points.
fn decode_schedule(value: Value, path: &str, start_year: f64) -> Result<Series, ScenarioError> {
    match value {
        Value::Number(_) => Ok(Series::constant(start_year, as_f64(value, path)?)),
        Value::Array(_) => decode_series_points(value, path),
        other => Err(invariant(
            path,
            format!("expected a number or an array of points, got {}", kind(&other)),
        )),
    }
}

fn default_exogenous(start_year: f64) -> ExogenousSchedules {
    ExogenousSchedules {
        government_spending: Series::constant(start_year, 0.0),
        exports: Series::constant(start_year, 0.0),
        imports: Series::constant(start_year, 0.0),
        eu_gdpp_ppp: None,
    }
}

fn decode_exogenous(value: Value, start_year: f64) -> Result<ExogenousSchedules, ScenarioError> {
    let defaults = default_exogenous(start_year);
    let mut obj = Obj::from_value(value, "scenario.exogenous")?;
    let government_spending = match obj.take("government_spending") {
        Some(v) => decode_schedule(v, "scenario.exogenous.government_spending", start_year)?,
        None => defaults.government_spending,
    };
    let exports = match obj.take("exports") {
        Some(v) => decode_schedule(v, "scenario.exogenous.exports", start_year)?,
        None => defaults.exports,
    };
    let imports = match obj.take("imports") {
        Some(v) => decode_schedule(v, "scenario.exogenous.imports", start_year)?,
        None => defaults.imports,
    };
    let eu_gdpp_ppp = match obj.take("eu_gdpp_ppp") {
        Some(v) => Some(decode_schedule(v, "scenario.exogenous.eu_gdpp_ppp", start_year)?),
        None => None,
    };
    obj.finish(&["government_spending", "exports", "imports", "eu_gdpp_ppp"])?;
    Ok(ExogenousSchedules { government_spending, exports, imports, eu_gdpp_ppp })
}

fn decode_overrides(value: Value) -> Result<Vec<OverrideEvent>, ScenarioError> {
    let path = "scenario.overrides";
    let items = as_array(value, path)?;
    let mut overrides = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let item_path = format!("{path}[{i}]");
        let mut event = Obj::from_value(item, &item_path)?;
        overrides.push(OverrideEvent {
            effective_year: event.req_f64("year")?,
            target: event.req_string("target")?,
            value: event.req_f64("value")?,
        });
        event.finish(&["year", "target", "value"])?;
    }
    Ok(overrides)
}

fn decode_horizons(value: Value) -> Result<Vec<HorizonTarget>, ScenarioError> {
    let path = "scenario.horizons";
    let items = as_array(value, path)?;
    let mut horizons = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let item_path = format!("{path}[{i}]");
        let mut target = Obj::from_value(item, &item_path)?;
        let name = target.req_string("name")?;
        let year = target.req_f64("year")?;
        let metric = Metric::parse(&target.req_string("metric")?);
        let comparator_text = target.req_string("comparator")?;
        let comparator = Comparator::parse(&comparator_text).ok_or_else(|| {
            invariant(
                format!("{item_path}.comparator"),
                format!("comparator must be one of >, >=, <, <=; got {comparator_text:?}"),
            )
        })?;
        let threshold = target.req_f64("threshold")?;
        target.finish(&["name", "year", "metric", "comparator", "threshold"])?;
        horizons.push(HorizonTarget { name, year, metric, comparator, threshold });
    }
    Ok(horizons)
}

fn series_to_json(series: &Series) -> Value {
    Value::Array(
        series
            .points()
            .iter()
            .map(|&(year, value)| json!({ "year": year, "value": value }))
            .collect(),
    )
}

fn source_to_json(ws: &WeightedSource) -> Value {
    let mut map = Map::new();
    let name = match ws.source {
        IndicatorSource::Wellbeing => "wellbeing",
        IndicatorSource::Hdi => "hdi",
        IndicatorSource::PovertyComplement => "poverty_complement",
        IndicatorSource::GdppIndex => "gdpp_index",
        IndicatorSource::Infrastructure => "infrastructure",
        IndicatorSource::ResourceIndex => "resource_index",
        IndicatorSource::GreenShare => "green_share",
        IndicatorSource::Constant(v) => {
            map.insert("value".into(), json!(v));
            "constant"
        }
    };
    map.insert("source".into(), json!(name));
    map.insert("weight".into(), json!(ws.weight));
    Value::Object(map)
}

/// Scenario as a JSON tree with every default resolved explicitly.
pub fn scenario_to_json(scenario: &Scenario) -> Value {
    let land_types: Vec<Value> = scenario
        .initial
        .land
        .classes()
        .iter()
        .map(|c| json!({ "name": c.name, "area": c.area, "green": c.green }))
        .collect();
    let matrix = &scenario.engine.land_transitions;
    let mut transitions = Vec::new();
    for (i, from) in matrix.names().iter().enumerate() {
        for (j, to) in matrix.names().iter().enumerate() {
            let rate = matrix.rate(i, j);
            if i != j && rate != 0.0 {
                transitions.push(json!({ "from": from, "to": to, "rate": rate }));
            }
        }
    }
    let ppfl = |p: &PpflParams| json!({ "a0": p.a0, "a1": p.a1, "a3": p.a3, "a4": p.a4 });
    let config = &scenario.index_config;
    let security = match &config.security {
        SecuritySource::Series(series) => json!({ "series": series_to_json(series) }),
        SecuritySource::Composite(list) => {
            json!({ "composite": list.iter().map(source_to_json).collect::<Vec<_>>() })
        }
    };
    let education = match config.education {
        EducationInput::Index(v) => json!({ "index": v }),
        EducationInput::Percent(v) => json!({ "percent": v }),
    };
    let mut goalposts = Map::new();
    goalposts.insert(
        "gdpp".into(),
        json!({
            "min": config.gdpp_goalposts.min,
            "max": config.gdpp_goalposts.max,
            "log_scale": config.gdpp_log_scale,
        }),
    );
    goalposts.insert(
        "life_expectancy".into(),
        json!({
            "min": config.life_expectancy_goalposts.min,
            "max": config.life_expectancy_goalposts.max,
        }),
    );
    if let Some(posts) = &config.resource_goalposts {
        goalposts.insert("resource".into(), json!({ "min": posts.min, "max": posts.max }));
    }
    let mut index_config = json!({
        "wellbeing": match config.wellbeing {
            WellbeingMeasure::Hdi => "hdi",
            WellbeingMeasure::Hpi => "hpi",
        },
        "social": config.social.iter().map(source_to_json).collect::<Vec<_>>(),
        "economic": config.economic.iter().map(source_to_json).collect::<Vec<_>>(),
        "natural": config.natural.iter().map(source_to_json).collect::<Vec<_>>(),
        "security": security,
        "education": education,
        "life_expectancy_years": config.life_expectancy_years,
        "hpi": {
            "p1": config.hpi_inputs.p1,
            "p2": config.hpi_inputs.p2,
            "p3": config.hpi_inputs.p3,
            "alpha": config.hpi_inputs.alpha,
        },
        "goalposts": Value::Object(goalposts),
    });
    if let Some((values, weights)) = &config.infrastructure {
        index_config.as_object_mut().expect("object").insert(
            "infrastructure".into(),
            json!({ "values": values, "weights": weights }),
        );
    }
    let mut exogenous = json!({
        "government_spending": series_to_json(&scenario.exogenous.government_spending),
        "exports": series_to_json(&scenario.exogenous.exports),
        "imports": series_to_json(&scenario.exogenous.imports),
    });
    if let Some(series) = &scenario.exogenous.eu_gdpp_ppp {
        exogenous
            .as_object_mut()
            .expect("object")
            .insert("eu_gdpp_ppp".into(), series_to_json(series));
    }

    json!({
        "name": scenario.name,
        "span": { "start_year": scenario.span.start_year, "end_year": scenario.span.end_year },
        "initial": {
            "population": scenario.initial.population,
            "capital": scenario.initial.capital,
            "resource_stock": scenario.initial.resource_stock,
            "land": { "types": land_types },
            "accounts": {
                "consumption": scenario.initial.accounts.consumption,
                "investment": scenario.initial.accounts.investment,
                "government_spending": scenario.initial.accounts.government_spending,
                "exports": scenario.initial.accounts.exports,
                "imports": scenario.initial.accounts.imports,
            },
        },
        "engine": {
            "inflow": ppfl(&scenario.engine.inflow),
            "outflow": ppfl(&scenario.engine.outflow),
            "production": {
                "tfp": scenario.engine.production.tfp,
                "labor_elasticity": scenario.engine.production.labor_elasticity,
                "capital_elasticity": scenario.engine.production.capital_elasticity,
            },
            "labor_share": scenario.engine.labor_share,
            "savings_rate": scenario.engine.savings_rate,
            "depreciation_rate": scenario.engine.depreciation_rate,
            "resource_use_per_output": scenario.engine.resource_use_per_output,
            "land_transitions": transitions,
            "production_land_types": scenario.engine.production_land_types,
            "dt": scenario.engine.dt,
        },
        "index_config": index_config,
        "exogenous": exogenous,
        "overrides": scenario.overrides.iter().map(|e| json!({
            "year": e.effective_year,
            "target": e.target,
            "value": e.value,
        })).collect::<Vec<_>>(),
        "horizons": scenario.horizons.iter().map(|t| json!({
            "name": t.name,
            "year": t.year,
            "metric": t.metric.key(),
            "comparator": t.comparator.symbol(),
            "threshold": t.threshold,
        })).collect::<Vec<_>>(),
    })
}
