//! Subcommand implementations. Results go to files or stdout; everything
//! else goes to stderr.

use crate::artifacts::RunArtifacts;
use crate::error::CliError;
use crate::history::{ingest_history, HistoryTable};
use crate::trajectory_io::{self, Format};
use sdsim_core::calibration::{
    fit_population_flow, fit_production, FitReport, FlowObservation, ProductionObservation,
};
use sdsim_core::scenario::doc::load_scenario;
use sdsim_core::scenario::{
    compare_scenarios, evaluate_horizons, run_scenario, ComparisonTable, ConvergenceReport,
    Scenario, ScenarioError,
};
use serde_json::{json, Value};
use std::path::Path;

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_scenario_file(path: &Path) -> Result<(Scenario, String), CliError> {
    let text = read_input(path)?;
    let scenario = load_scenario(&text).map_err(|source| CliError::Scenario {
        path: path.display().to_string(),
        source,
    })?;
    Ok((scenario, text))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn report_to_json(scenario_name: &str, report: &ConvergenceReport) -> Value {
    json!({
        "scenario": scenario_name,
        "targets": report.entries.iter().map(|entry| json!({
            "name": entry.name,
            "year": entry.year,
            "metric": entry.metric,
            "comparator": entry.comparator.symbol(),
            "threshold": entry.threshold,
            "value": entry.value,
            "met": entry.met,
            "margin": entry.margin,
            "record_year": entry.record_year,
            "gap_years": entry.gap_years,
            "first_crossing_year": entry.first_crossing_year,
        })).collect::<Vec<_>>(),
    })
}

fn comparison_to_json(table: &ComparisonTable) -> Value {
    json!({
        "baseline": table.baseline,
        "rows": table.rows.iter().map(|row| json!({
            "scenario": row.name,
            "final_i_sd": row.final_i_sd,
            "final_i_lq": row.final_i_lq,
            "horizons_met": row.horizons_met,
            "horizons_total": row.horizons_total,
            "delta_final_i_sd": row.delta_final_i_sd,
            "delta_final_i_lq": row.delta_final_i_lq,
            "targets": row.targets.iter().map(|t| json!({
                "name": t.name,
                "value": t.value,
                "met": t.met,
                "margin": t.margin,
                "delta_value": t.delta_value,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn simulate(scenario_path: &Path, out: &Path, format: Format) -> Result<(), CliError> {
    let (scenario, text) = load_scenario_file(scenario_path)?;
    let artifacts = RunArtifacts::new(&scenario.name, &text);
    let (trajectory, report) = run_scenario(&scenario).map_err(|source| CliError::Run {
        path: scenario_path.display().to_string(),
        source,
    })?;
    trajectory_io::emit_trajectory(&trajectory, format, out)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report_to_json(&scenario.name, &report))
            .expect("report is JSON-representable")
    );
    eprintln!(
        "simulate: {} -> {} ({} records)",
        artifacts.diagnostic_line(),
        out.display(),
        trajectory.records.len()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationTarget {
    Production,
    PopulationFlow,
}

fn fit_to_json(report: &FitReport) -> Value {
    json!({
        "r_squared": report.r_squared,
        "rmse": report.rmse,
        "coefficients": report.coefficients,
        "residuals": report.residuals,
    })
}

fn production_observations(table: &HistoryTable) -> Vec<ProductionObservation> {
    let y = table.column("Y").expect("checked by ingest");
    let l = table.column("L").expect("checked by ingest");
    let k = table.column("K").expect("checked by ingest");
    let p = table.column("P").expect("checked by ingest");
    (0..table.len())
        .map(|i| ProductionObservation { output: y[i], labor: l[i], capital: k[i], land: p[i] })
        .collect()
}

fn flow_observations(table: &HistoryTable) -> Vec<FlowObservation> {
    let flow = table.column("PPFL").expect("checked by ingest");
    let pop = table.column("POP").expect("checked by ingest");
    let land = table.column("LAND").expect("checked by ingest");
    let green = table.column("GREEN_LAND").expect("checked by ingest");
    (0..table.len())
        .map(|i| FlowObservation {
            flow: flow[i],
            population: pop[i],
            land: land[i],
            green_land: green[i],
        })
        .collect()
}

pub fn calibrate(
    data: &Path,
    target: CalibrationTarget,
    unconstrained: bool,
    out: &Path,
) -> Result<(), CliError> {
    let calibration_error = |source| CliError::Calibration {
        path: data.display().to_string(),
        source,
    };
    let document = match target {
        CalibrationTarget::Production => {
            let table = ingest_history(data, &["Y", "L", "K", "P"])?;
            let observations = production_observations(&table);
            let (params, report) =
                fit_production(&observations, !unconstrained).map_err(calibration_error)?;
            json!({
                "target": "production",
                "constrained": !unconstrained,
                "observations": observations.len(),
                "params": {
                    "tfp": params.tfp,
                    "labor_elasticity": params.labor_elasticity,
                    "capital_elasticity": params.capital_elasticity,
                    "land_elasticity": params.land_elasticity(),
                },
                "fit": fit_to_json(&report),
            })
        }
        CalibrationTarget::PopulationFlow => {
            let table = ingest_history(data, &["PPFL", "POP", "LAND", "GREEN_LAND"])?;
            let observations = flow_observations(&table);
            let (params, report) =
                fit_population_flow(&observations).map_err(calibration_error)?;
            json!({
                "target": "population-flow",
                "observations": observations.len(),
                "params": {
                    "a0": params.a0,
                    "a1": params.a1,
                    "a3": params.a3,
                    "a4": params.a4,
                },
                "fit": fit_to_json(&report),
            })
        }
    };
    let mut text =
        serde_json::to_string_pretty(&document).expect("parameters are JSON-representable");
    text.push('\n');
    write_output(out, &text)?;
    eprintln!("calibrate: {} -> {}", data.display(), out.display());
    Ok(())
}

pub fn evaluate(scenario_path: &Path, trajectory_path: &Path) -> Result<(), CliError> {
    let (scenario, _) = load_scenario_file(scenario_path)?;
    let text = read_input(trajectory_path)?;
    let table = trajectory_io::parse_csv(&text, &trajectory_path.display().to_string())?;
    let report = evaluate_horizons(
        &table.records,
        &scenario.horizons,
        scenario.exogenous.eu_gdpp_ppp.as_ref(),
    )
    .map_err(|source| CliError::Evaluation {
        path: trajectory_path.display().to_string(),
        source,
    })?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report_to_json(&scenario.name, &report))
            .expect("report is JSON-representable")
    );
    Ok(())
}

pub fn compare(scenario_paths: &[std::path::PathBuf], out: &Path) -> Result<(), CliError> {
    let mut scenarios = Vec::with_capacity(scenario_paths.len());
    for path in scenario_paths {
        scenarios.push(load_scenario_file(path)?.0);
    }
    let table = compare_scenarios(&scenarios).map_err(|source| match source {
        ScenarioError::ScenarioFailed { .. } => CliError::Run {
            path: out.display().to_string(),
            source,
        },
        other => CliError::Usage(other.to_string()),
    })?;
    let mut text =
        serde_json::to_string_pretty(&comparison_to_json(&table)).expect("JSON-representable");
    text.push('\n');
    write_output(out, &text)?;
    eprintln!("compare: {} scenarios -> {}", scenarios.len(), out.display());
    Ok(())
}

pub fn validate(scenario_path: &Path) -> Result<(), CliError> {
    let (scenario, text) = load_scenario_file(scenario_path)?;
    let artifacts = RunArtifacts::new(&scenario.name, &text);
    println!(
        "ok: scenario {:?} is valid ({} overrides, {} horizon targets, sha256:{})",
        scenario.name,
        scenario.overrides.len(),
        scenario.horizons.len(),
        artifacts.scenario_sha256
    );
    Ok(())
}
