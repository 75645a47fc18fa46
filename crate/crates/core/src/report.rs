//! JSON reports. Everything except `elapsed` is a function of the scenario, so
//! reruns produce byte-identical output once timing is stripped.

use serde_json::{json, Map, Value};

use crate::cohomology::{Cochain, H1Classification};
use crate::scenario::ActionScenario;
use crate::schreier::SchreierData;
use crate::verify::{CheckOutcome, LiftComparison, TheoremReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

pub fn check_json(c: &CheckOutcome) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(c.name));
    m.insert("verdict".into(), json!(c.verdict));
    if let Some(w) = &c.witness {
        m.insert("witness".into(), w.clone());
    }
    m.insert("evaluated".into(), json!(c.evaluated));
    m.insert("skipped".into(), json!(c.skipped));
    Value::Object(m)
}

/// Rows of a crossed homomorphism table, indexed by quotient element.
pub fn table_json(k: &Cochain) -> Value {
    json!(k.rows())
}

pub fn h1_json(h1: &H1Classification) -> Value {
    let coordinates = h1.classes.first().map(|c| c.coordinates.clone()).unwrap_or_default();
    json!({ "coordinates": coordinates, "invariantFactors": h1.invariant_factors })
}

/// Names of the Schreier generators and coset representatives as words in `G`.
pub fn schreier_json(s: &SchreierData, names: &[String]) -> Value {
    let words = |ws: &[crate::words::Word]| ws.iter().map(|w| w.display(names).to_string()).collect::<Vec<_>>();
    json!({ "kGenerators": words(s.k_generators()), "transversal": words(s.transversals()) })
}

fn verdict_of(passed: bool) -> Verdict {
    if passed {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

pub fn theorem_json(
    scenario: &ActionScenario,
    schreier: &SchreierData,
    r: &TheoremReport,
    strict: bool,
    elapsed: f64,
) -> Value {
    let mut checks: Vec<Value> = r.checks.iter().map(check_json).collect();
    if strict {
        for (c, v) in r.checks.iter().zip(checks.iter_mut()) {
            if c.skipped > 0 || c.verdict == Verdict::Skip {
                v["verdict"] = json!(Verdict::Fail);
            }
        }
    }
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "scenarioHash": scenario.hash(),
        "verdict": verdict_of(r.passed(strict)),
        "checks": checks,
        "schreier": schreier_json(schreier, &scenario.generators),
        "crossedHom": r.crossed_hom.as_ref().map(table_json),
        "h1Class": r.h1.as_ref().map(h1_json),
        "skipped": r.skipped(),
        "elapsed": elapsed,
    })
}

pub fn lift_comparison_json(
    scenario: &ActionScenario,
    offsets: [&[i64]; 2],
    c: &LiftComparison,
    elapsed: f64,
) -> Value {
    let witness = match &c.coboundary {
        crate::cohomology::CoboundaryTest::Yes(w) => json!(w),
        crate::cohomology::CoboundaryTest::No => Value::Null,
    };
    let predicted: Vec<i64> = c.mu.iter().map(|v| -v).collect();
    let checks = vec![
        json!({ "name": "difference_is_coboundary", "verdict": verdict_of(c.coboundary.is_yes()) }),
        json!({ "name": "difference_equals_delta_of_minus_mu", "verdict": verdict_of(c.predicted_matches) }),
        json!({ "name": "witness_matches_minus_mu", "verdict": verdict_of(c.witness_matches) }),
    ];
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "scenarioHash": scenario.hash(),
        "verdict": verdict_of(c.passed()),
        "offsets": [offsets[0], offsets[1]],
        "checks": checks,
        "crossedHom": [table_json(&c.k1), table_json(&c.k2)],
        "mu": c.mu,
        "predictedWitness": predicted,
        "witness": witness,
        "elapsed": elapsed,
    })
}

/// The report with timing removed, for determinism comparisons.
pub fn without_timing(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.remove("elapsed");
    }
    v
}
