use super::doc::{load_scenario, serialize_scenario};
use super::*;
use crate::engine::ExogenousFlows;
use proptest::prelude::*;
use serde_json::{json, Value};

fn assert_rel_eq(actual: f64, expected: f64, rel: f64) {
    let scale = expected.abs().max(1e-300);
    assert!(
        (actual - expected).abs() <= rel * scale,
        "expected {expected}, got {actual} (rel tol {rel})"
    );
}

/// A small but fully populated valid document.
fn base_doc() -> Value {
    json!({
        "name": "test-baseline",
        "span": { "start_year": 2000.0, "end_year": 2040.0 },
        "initial": {
            "population": 1.0e6,
            "capital": 1.0e9,
            "resource_stock": 1.0e8,
            "land": {
                "types": [
                    { "name": "agricultural", "area": 500.0, "green": true },
                    { "name": "forest", "area": 400.0, "green": true },
                    { "name": "urban_industrial", "area": 100.0 }
                ]
            },
            "accounts": {
                "consumption": 5.0e9, "investment": 1.0e9,
                "government_spending": 5.0e8, "exports": 2.0e8, "imports": 3.0e8
            }
        },
        "engine": {
            "inflow": { "a0": 9.903487552536127, "a1": 0.0, "a3": 0.0, "a4": 0.0 },
            "outflow": { "a0": 9.615805480084347, "a1": 0.0, "a3": 0.0, "a4": 0.0 },
            "production": { "tfp": 3000.0, "labor_elasticity": 0.55, "capital_elasticity": 0.3 },
            "labor_share": 0.4,
            "savings_rate": 0.2,
            "depreciation_rate": 0.05,
            "resource_use_per_output": 0.0,
            "land_transitions": [
                { "from": "agricultural", "to": "urban_industrial", "rate": 0.001 }
            ],
            "production_land_types": ["agricultural", "urban_industrial"],
            "dt": 1.0
        },
        "exogenous": {
            "government_spending": 5.0e8,
            "exports": 2.0e8,
            "imports": 3.0e8,
            "eu_gdpp_ppp": [ { "year": 2000.0, "value": 10000.0 } ]
        },
        "overrides": [],
        "horizons": [
            { "name": "h2013", "year": 2013.0, "metric": "gdpp_ppp_ratio", "comparator": ">", "threshold": 0.5 },
            { "name": "h2020", "year": 2020.0, "metric": "gdpp_ppp_ratio", "comparator": ">=", "threshold": 0.8 },
            { "name": "h2030", "year": 2030.0, "metric": "gdpp_ppp_ratio", "comparator": ">", "threshold": 1.0 }
        ]
    })
}

fn load_doc(doc: &Value) -> Result<Scenario, ScenarioError> {
    load_scenario(&serde_json::to_string_pretty(doc).unwrap())
}

#[test]
fn minimal_document_loads_with_documented_defaults() {
    let doc = json!({
        "name": "minimal",
        "span": { "start_year": 2000.0, "end_year": 2010.0 },
        "initial": {
            "population": 1.0e6,
            "capital": 1.0e9,
            "land": { "types": [
                { "name": "agricultural", "area": 500.0, "green": true },
                { "name": "urban_industrial", "area": 100.0 }
            ] }
        }
    });
    let scenario = load_doc(&doc).unwrap();
    assert_eq!(scenario.engine.dt, 1.0);
    assert_eq!(scenario.engine.savings_rate, 0.2);
    assert_eq!(scenario.engine.depreciation_rate, 0.05);
    assert_eq!(scenario.engine.labor_share, 0.4);
    assert_eq!(scenario.initial.time, 2000.0);
    assert_eq!(scenario.initial.resource_stock, 0.0);
    assert_eq!(scenario.initial.accounts, crate::kernel::NationalAccounts::zero());
    assert!(scenario.overrides.is_empty());
    assert!(scenario.horizons.is_empty());
    assert!(matches!(scenario.index_config.education, crate::engine::EducationInput::Index(v) if v == 0.75));
    assert_eq!(scenario.index_config.hpi_inputs.alpha, 3.0);
    // and it runs
    run_scenario(&scenario).unwrap();
}

#[test]
fn unknown_key_is_a_schema_error_with_suggestion() {
    let mut doc = base_doc();
    doc["engine"]["savings_rte"] = json!(0.3);
    match load_doc(&doc) {
        Err(ScenarioError::Schema { path, key, suggestion }) => {
            assert_eq!(path, "scenario.engine");
            assert_eq!(key, "savings_rte");
            assert_eq!(suggestion.as_deref(), Some("savings_rate"));
        }
        other => panic!("expected Schema error, got {other:?}"),
    }
}

#[test]
fn unknown_override_path_is_a_schema_error_naming_the_path() {
    let mut doc = base_doc();
    doc["overrides"] = json!([ { "year": 2005.0, "target": "engine.saving_rate", "value": 0.3 } ]);
    match load_doc(&doc) {
        Err(ScenarioError::Schema { key, suggestion, .. }) => {
            assert_eq!(key, "engine.saving_rate");
            assert_eq!(suggestion.as_deref(), Some("engine.savings_rate"));
        }
        other => panic!("expected Schema error, got {other:?}"),
    }
}

#[test]
fn syntax_error_reports_position() {
    match load_scenario("{ \"name\": ") {
        Err(ScenarioError::Parse { line, column, .. }) => {
            assert_eq!(line, 1);
            assert!(column > 0);
        }
        other => panic!("expected Parse error, got {other:?}"),
    }
}

#[test]
fn invariant_violations_name_field_and_rule() {
    let mut doc = base_doc();
    doc["engine"]["savings_rate"] = json!(1.5);
    match load_doc(&doc) {
        Err(ScenarioError::Engine(e)) => {
            assert!(e.to_string().contains("savings_rate"), "{e}");
        }
        other => panic!("expected engine invariant error, got {other:?}"),
    }

    let mut doc = base_doc();
    doc["horizons"][0]["year"] = json!(1980.0);
    match load_doc(&doc) {
        Err(ScenarioError::Invariant { field, rule }) => {
            assert!(field.contains("h2013"), "{field}");
            assert!(rule.contains("outside the span"), "{rule}");
        }
        other => panic!("expected Invariant, got {other:?}"),
    }

    // schedule starting after the span start leaves a gap
    let mut doc = base_doc();
    doc["exogenous"]["exports"] = json!([ { "year": 2005.0, "value": 1.0e8 } ]);
    match load_doc(&doc) {
        Err(ScenarioError::Invariant { field, rule }) => {
            assert_eq!(field, "exogenous.exports");
            assert!(rule.contains("cover the span start"), "{rule}");
        }
        other => panic!("expected Invariant, got {other:?}"),
    }

    // ratio target without an EU reference series
    let mut doc = base_doc();
    doc["exogenous"].as_object_mut().unwrap().remove("eu_gdpp_ppp");
    assert!(matches!(load_doc(&doc), Err(ScenarioError::MissingEuReference)));

    // override before the span start
    let mut doc = base_doc();
    doc["overrides"] = json!([ { "year": 1999.0, "target": "engine.savings_rate", "value": 0.3 } ]);
    assert!(matches!(load_doc(&doc), Err(ScenarioError::Invariant { .. })));

    // override value that breaks an engine invariant mid-run
    let mut doc = base_doc();
    doc["overrides"] = json!([ { "year": 2010.0, "target": "engine.savings_rate", "value": 1.5 } ]);
    assert!(load_doc(&doc).is_err());
}

#[test]
fn security_series_must_cover_the_span_start() {
    let mut doc = base_doc();
    doc["index_config"] = json!({
        "security": { "series": [ { "year": 2010.0, "value": 0.7 } ] }
    });
    match load_doc(&doc) {
        Err(ScenarioError::Invariant { field, rule }) => {
            assert_eq!(field, "index_config.security.series");
            assert!(rule.contains("cover the span start"), "{rule}");
        }
        other => panic!("expected Invariant, got {other:?}"),
    }
    // a covering series loads and runs
    let mut doc = base_doc();
    doc["index_config"] = json!({
        "security": { "series": [ { "year": 2000.0, "value": 0.7 }, { "year": 2020.0, "value": 0.8 } ] }
    });
    let scenario = load_doc(&doc).unwrap();
    let (trajectory, _) = run_scenario(&scenario).unwrap();
    assert_eq!(trajectory.records[0].indicators.i_sec, 0.7);
    assert_eq!(trajectory.records.last().unwrap().indicators.i_sec, 0.8);
}

#[test]
fn statically_degenerate_indicator_configs_fail_at_load() {
    // all-zero component indices would make harmonization undefined at t = 0
    let mut doc = base_doc();
    let zero = json!([ { "source": "constant", "value": 0.0, "weight": 1.0 } ]);
    doc["index_config"] =
        json!({ "social": zero, "economic": zero, "natural": zero });
    assert!(matches!(load_doc(&doc), Err(ScenarioError::Engine(_))));

    // zero initial population cannot produce a GDP-per-capita snapshot
    let mut doc = base_doc();
    doc["initial"]["population"] = json!(0.0);
    assert!(load_doc(&doc).is_err());
}

#[test]
fn education_percent_is_goalposted_over_0_to_100() {
    let mut doc = base_doc();
    doc["index_config"] = json!({ "education": { "percent": 92.0 } });
    let scenario = load_doc(&doc).unwrap();
    let snap =
        crate::engine::compute_indicators(&scenario.initial, &scenario.index_config).unwrap();
    // gdpi for gdpp 6400 under log goalposts 100..40000, le (70-25)/60
    let gdpi = (6400.0f64 / 100.0).ln() / (40000.0f64 / 100.0).ln();
    let expected_hdi = (gdpi + 0.92 + 0.75) / 3.0;
    assert_rel_eq(snap.hdi, expected_hdi, 1e-12);

    let mut doc = base_doc();
    doc["index_config"] = json!({ "education": { "percent": 130.0 } });
    assert!(load_doc(&doc).is_err(), "percent above 100 must be rejected");
}

#[test]
fn hpi_wellbeing_feeds_the_poverty_complement_into_the_social_index() {
    let mut doc = base_doc();
    doc["index_config"] = json!({
        "wellbeing": "hpi",
        "hpi": { "p1": 30.0, "p2": 20.0, "p3": 10.0, "alpha": 1.0 }
    });
    let scenario = load_doc(&doc).unwrap();
    let snap =
        crate::engine::compute_indicators(&scenario.initial, &scenario.index_config).unwrap();
    assert_rel_eq(snap.hpi, 20.0, 1e-12);
    assert_rel_eq(snap.i_s, 1.0 - 20.0 / 100.0, 1e-12);
    assert_rel_eq(snap.i_sec, snap.i_s, 1e-12);
}

#[test]
fn linear_gdpp_goalposts_skip_the_log_transform() {
    let mut doc = base_doc();
    doc["index_config"] = json!({
        "economic": [ { "source": "gdpp_index", "weight": 1.0 } ],
        "goalposts": { "gdpp": { "min": 0.0, "max": 10000.0, "log_scale": false } }
    });
    let scenario = load_doc(&doc).unwrap();
    let snap =
        crate::engine::compute_indicators(&scenario.initial, &scenario.index_config).unwrap();
    // initial gdpp = (5e9 + 1e9 + 5e8 + 2e8 - 3e8) / 1e6 = 6400
    assert_rel_eq(snap.i_ec, 0.64, 1e-12);
}

#[test]
fn resource_index_defaults_its_goalposts_to_the_initial_stock() {
    let mut doc = base_doc();
    doc["index_config"] = json!({
        "natural": [ { "source": "resource_index", "weight": 1.0 } ],
        "infrastructure": { "values": [0.3, 0.7] }
    });
    let scenario = load_doc(&doc).unwrap();
    assert_eq!(
        scenario.index_config.resource_goalposts,
        Some(crate::kernel::Goalposts { min: 0.0, max: 1.0e8 })
    );
    // omitted weights default to 1.0 each
    assert_eq!(
        scenario.index_config.infrastructure,
        Some((vec![0.3, 0.7], vec![1.0, 1.0]))
    );
    let snap =
        crate::engine::compute_indicators(&scenario.initial, &scenario.index_config).unwrap();
    assert_rel_eq(snap.i_n, 1.0, 1e-12);
}

#[test]
fn unknown_metric_key_suggests_a_column() {
    let mut doc = base_doc();
    doc["horizons"][0]["metric"] = json!("i_sdd");
    match load_doc(&doc) {
        Err(ScenarioError::Schema { key, suggestion, .. }) => {
            assert_eq!(key, "i_sdd");
            assert_eq!(suggestion.as_deref(), Some("i_sd"));
        }
        other => panic!("expected Schema error, got {other:?}"),
    }
}

#[test]
fn serialize_then_load_is_structurally_identical() {
    let scenario = load_doc(&base_doc()).unwrap();
    let text = serialize_scenario(&scenario);
    let reloaded = load_scenario(&text).unwrap();
    assert_eq!(scenario, reloaded);
    // and a second pass is byte-stable
    assert_eq!(text, serialize_scenario(&reloaded));
}

#[test]
fn apply_overrides_identity_and_last_writer_wins() {
    let scenario = load_doc(&base_doc()).unwrap();
    let params = &scenario.engine;

    let unchanged = apply_overrides(params, &[], 2030.0).unwrap();
    assert_eq!(&unchanged, params);

    let events = vec![
        OverrideEvent { effective_year: 2015.0, target: "engine.savings_rate".into(), value: 0.25 },
        OverrideEvent { effective_year: 2020.0, target: "engine.savings_rate".into(), value: 0.35 },
    ];
    assert_eq!(apply_overrides(params, &events, 2022.0).unwrap().savings_rate, 0.35);
    assert_eq!(apply_overrides(params, &events, 2017.0).unwrap().savings_rate, 0.25);
    // a future override is not applied
    assert_eq!(apply_overrides(params, &events, 2010.0).unwrap().savings_rate, 0.2);
}

#[test]
fn scenario_without_overrides_equals_direct_engine_run() {
    let scenario = load_doc(&base_doc()).unwrap();
    let (trajectory, _) = run_scenario(&scenario).unwrap();

    let mut params = scenario.engine.clone();
    params.exogenous = ExogenousFlows {
        government_spending: 5.0e8,
        exports: 2.0e8,
        imports: 3.0e8,
    };
    let direct = crate::engine::run(
        &scenario.initial,
        &params,
        &scenario.index_config,
        scenario.span.years(),
    )
    .unwrap();
    assert_eq!(trajectory, direct);
}

#[test]
fn override_changes_nothing_before_its_effective_year() {
    let baseline = load_doc(&base_doc()).unwrap();
    let mut doc = base_doc();
    doc["overrides"] =
        json!([ { "year": 2010.0, "target": "engine.savings_rate", "value": 0.35 } ]);
    let variant = load_doc(&doc).unwrap();

    let (base_run, _) = run_scenario(&baseline).unwrap();
    let (variant_run, _) = run_scenario(&variant).unwrap();

    for (b, v) in base_run.records.iter().zip(&variant_run.records) {
        if b.state.time <= 2010.0 {
            assert_eq!(b, v, "records must match through the effective year");
        }
    }
    let after: Vec<_> =
        variant_run.records.iter().filter(|r| r.state.time > 2010.0).collect();
    let base_after: Vec<_> =
        base_run.records.iter().filter(|r| r.state.time > 2010.0).collect();
    assert!(after[0].state.capital > base_after[0].state.capital);
}

#[test]
fn post_span_end_override_is_inert() {
    let baseline = load_doc(&base_doc()).unwrap();
    let mut doc = base_doc();
    doc["overrides"] =
        json!([ { "year": 2050.0, "target": "engine.savings_rate", "value": 0.35 } ]);
    let variant = load_doc(&doc).unwrap();
    let (base_run, base_report) = run_scenario(&baseline).unwrap();
    let (variant_run, variant_report) = run_scenario(&variant).unwrap();
    assert_eq!(base_run, variant_run);
    assert_eq!(base_report, variant_report);
}

fn ratio_records(points: &[(f64, f64)]) -> Vec<crate::record::FlatRecord> {
    points
        .iter()
        .map(|&(year, gdpp)| crate::record::FlatRecord {
            year,
            fields: vec![("gdpp".to_string(), gdpp)],
        })
        .collect()
}

fn section_five_targets() -> Vec<HorizonTarget> {
    vec![
        HorizonTarget {
            name: "h2013".into(),
            year: 2013.0,
            metric: Metric::GdppPppRatio,
            comparator: Comparator::Greater,
            threshold: 0.5,
        },
        HorizonTarget {
            name: "h2020".into(),
            year: 2020.0,
            metric: Metric::GdppPppRatio,
            comparator: Comparator::GreaterEq,
            threshold: 0.8,
        },
        HorizonTarget {
            name: "h2030".into(),
            year: 2030.0,
            metric: Metric::GdppPppRatio,
            comparator: Comparator::Greater,
            threshold: 1.0,
        },
    ]
}

#[test]
fn horizon_evaluation_margins_are_signed_per_comparator() {
    let eu = Series::constant(2000.0, 1000.0);
    let records =
        ratio_records(&[(2013.0, 550.0), (2020.0, 800.0), (2030.0, 990.0)]);
    let report = evaluate_horizons(&records, &section_five_targets(), Some(&eu)).unwrap();

    assert_eq!(report.entries.len(), 3);
    let h2013 = &report.entries[0];
    assert!(h2013.met);
    assert_rel_eq(h2013.value, 0.55, 1e-12);
    assert_rel_eq(h2013.margin, 0.05, 1e-9);

    let h2020 = &report.entries[1];
    assert!(h2020.met, "ratio exactly at a >= threshold is met");
    assert_eq!(h2020.value, 0.8);
    assert_eq!(h2020.margin, 0.0);

    let h2030 = &report.entries[2];
    assert!(!h2030.met);
    assert_rel_eq(h2030.margin, -0.01, 1e-9);
}

#[test]
fn horizon_evaluation_uses_nearest_record_and_reports_gap() {
    let eu = Series::constant(2000.0, 1000.0);
    let records = ratio_records(&[(2012.0, 520.0), (2014.0, 560.0), (2030.0, 990.0)]);
    let report = evaluate_horizons(&records, &section_five_targets(), Some(&eu)).unwrap();
    let h2013 = &report.entries[0];
    assert_eq!(h2013.record_year, 2012.0);
    assert_eq!(h2013.gap_years, 1.0);
    assert_rel_eq(h2013.value, 0.52, 1e-12);
}

#[test]
fn horizon_evaluation_tracks_first_crossing() {
    let eu = Series::constant(2000.0, 1000.0);
    let records = ratio_records(&[
        (2010.0, 400.0),
        (2011.0, 510.0),
        (2013.0, 650.0),
        (2020.0, 700.0),
        (2030.0, 790.0),
    ]);
    let report = evaluate_horizons(&records, &section_five_targets(), Some(&eu)).unwrap();
    assert_eq!(report.entries[0].first_crossing_year, Some(2011.0));
    assert_eq!(report.entries[1].first_crossing_year, None);
}

#[test]
fn horizon_evaluation_rejects_uncovered_target_years() {
    let eu = Series::constant(2000.0, 1000.0);
    let records = ratio_records(&[(2013.0, 550.0), (2020.0, 800.0)]);
    match evaluate_horizons(&records, &section_five_targets(), Some(&eu)) {
        Err(ScenarioError::TargetYearOutOfRange { target, year, .. }) => {
            assert_eq!(target, "h2030");
            assert_eq!(year, 2030.0);
        }
        other => panic!("expected TargetYearOutOfRange, got {other:?}"),
    }
}

#[test]
fn evaluation_is_pure() {
    let eu = Series::constant(2000.0, 1000.0);
    let records =
        ratio_records(&[(2013.0, 550.0), (2020.0, 807.0), (2030.0, 1110.0)]);
    let a = evaluate_horizons(&records, &section_five_targets(), Some(&eu)).unwrap();
    let b = evaluate_horizons(&records, &section_five_targets(), Some(&eu)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_has_one_entry_per_declared_target() {
    let scenario = load_doc(&base_doc()).unwrap();
    let (_, report) = run_scenario(&scenario).unwrap();
    assert_eq!(report.entries.len(), scenario.horizons.len());
}

fn three_step_doc(name: &str, savings: f64) -> Value {
    let mut doc = base_doc();
    doc["name"] = json!(name);
    doc["span"] = json!({ "start_year": 2000.0, "end_year": 2003.0 });
    doc["engine"]["savings_rate"] = json!(savings);
    doc["engine"]["land_transitions"] = json!([]);
    doc["horizons"] = json!([
        { "name": "cap-2003", "year": 2003.0, "metric": "capital", "comparator": ">", "threshold": 0.0 }
    ]);
    doc
}

#[test]
fn compare_scenario_with_itself_has_zero_deltas() {
    let a = load_doc(&three_step_doc("same-a", 0.2)).unwrap();
    let b = load_doc(&three_step_doc("same-b", 0.2)).unwrap();
    let table = compare_scenarios(&[a, b]).unwrap();
    assert_eq!(table.baseline, "same-a");
    assert_eq!(table.rows.len(), 2);
    for row in &table.rows {
        assert_eq!(row.delta_final_i_sd, 0.0);
        assert_eq!(row.delta_final_i_lq, 0.0);
        assert_eq!(row.targets[0].delta_value, Some(0.0));
    }
}

#[test]
fn compare_higher_savings_matches_hand_stepped_miniature() {
    let baseline = load_doc(&three_step_doc("base", 0.2)).unwrap();
    let variant = load_doc(&three_step_doc("saver", 0.3)).unwrap();
    let table = compare_scenarios(&[baseline, variant]).unwrap();

    // hand-rolled three-step capital oracle for both savings rates
    let oracle = |savings: f64| -> f64 {
        let (a, ls, delta) = (3000.0, 0.4, 0.05);
        let (alpha, beta) = (0.55, 0.3);
        let land: f64 = 600.0; // agricultural + urban_industrial
        let inflow = 9.903487552536127f64.exp();
        let outflow = 9.615805480084347f64.exp();
        let mut pop: f64 = 1.0e6;
        let mut capital: f64 = 1.0e9;
        for _ in 0..3 {
            let output = a
                * (ls * pop).powf(alpha)
                * capital.powf(beta)
                * land.powf(1.0 - alpha - beta);
            capital = (capital + (savings * output - delta * capital)).max(0.0);
            pop = (pop + (inflow - outflow)).max(0.0);
        }
        capital
    };
    let expected_delta = oracle(0.3) - oracle(0.2);
    assert!(expected_delta > 0.0);
    let row = &table.rows[1];
    let got_delta = row.targets[0].delta_value.unwrap();
    assert!(got_delta > 0.0, "higher savings must raise final capital");
    assert_rel_eq(got_delta, expected_delta, 1e-9);
}

#[test]
fn compare_rejects_mismatched_spans_and_singletons() {
    let a = load_doc(&three_step_doc("a", 0.2)).unwrap();
    let mut doc = base_doc();
    doc["name"] = json!("b");
    let b = load_doc(&doc).unwrap();
    assert!(matches!(
        compare_scenarios(&[a.clone(), b]),
        Err(ScenarioError::SpanMismatch { .. })
    ));
    assert!(matches!(
        compare_scenarios(&[a]),
        Err(ScenarioError::NotEnoughScenarios { got: 1 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Any document that loads runs without validation errors.
    #[test]
    fn loaded_scenarios_run_cleanly(
        population in 1.0e4..1.0e7f64,
        capital in 1.0e6..1.0e12f64,
        savings in 0.0..0.8f64,
        depreciation in 0.0..0.8f64,
        tfp in 1.0..5000.0f64,
        ag in 10.0..1.0e4f64,
        urban in 10.0..1.0e4f64,
        rate in 0.0..0.2f64,
        a0_in in 0.0..8.0f64,
        a0_out in 0.0..8.0f64,
    ) {
        let doc = json!({
            "name": "fuzz",
            "span": { "start_year": 2000.0, "end_year": 2005.0 },
            "initial": {
                "population": population,
                "capital": capital,
                "resource_stock": 1.0e6,
                "land": { "types": [
                    { "name": "agricultural", "area": ag, "green": true },
                    { "name": "urban_industrial", "area": urban }
                ] }
            },
            "engine": {
                "inflow": { "a0": a0_in },
                "outflow": { "a0": a0_out },
                "production": { "tfp": tfp, "labor_elasticity": 0.4, "capital_elasticity": 0.3 },
                "savings_rate": savings,
                "depreciation_rate": depreciation,
                "land_transitions": [
                    { "from": "agricultural", "to": "urban_industrial", "rate": rate }
                ]
            }
        });
        let scenario = load_doc(&doc).unwrap();
        let result = run_scenario(&scenario);
        prop_assert!(result.is_ok(), "loaded scenario failed to run: {:?}", result.err());
    }
}
