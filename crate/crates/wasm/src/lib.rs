//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a JSON string. The logic lives in plain functions so it
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fqsolve_core::analysis::{entropy_h, zeta, zeta_curve, ExtBinomTable};
use fqsolve_core::oracle::{brute_z, count_common_roots};
use fqsolve_core::{full_sum, parse_pes, solve_pes, RngStream, SolverParams};

#[derive(Serialize)]
struct CurvePoint {
    kappa: f64,
    zeta: f64,
}

#[derive(Serialize)]
struct Curve {
    q: u32,
    d: u32,
    points: Vec<CurvePoint>,
    kappa_star: f64,
    zeta: f64,
    guaranteed_bound: f64,
}

/// `κ ↦ ζ_{q,d}(κ)` sampled on `(0, 1/(2d-1))`, plus the optimum.
pub fn exponent_curve(q: u32, d: u32, samples: usize) -> Result<String, String> {
    let report = zeta(q, d).map_err(|e| e.to_string())?;
    let top = 1.0 / (2.0 * d as f64 - 1.0);
    let samples = samples.clamp(2, 400);
    let kappas: Vec<f64> = (1..samples).map(|i| top * i as f64 / samples as f64).collect();
    let points = kappas
        .iter()
        .zip(zeta_curve(q, d, &kappas))
        .map(|(&kappa, zeta)| CurvePoint { kappa, zeta })
        .collect();
    let curve = Curve {
        q,
        d,
        points,
        kappa_star: *report.kappa_star.numer() as f64 / *report.kappa_star.denom() as f64,
        zeta: report.zeta,
        guaranteed_bound: report.guaranteed_bound,
    };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BinomRow {
    n: usize,
    q: u32,
    /// Exact counts as decimal strings (they overflow JS numbers quickly).
    row: Vec<String>,
    /// `log_q` of the cumulative counts.
    log_cumulative: Vec<f64>,
    /// `H(q, Δ/((q-1)n))` for `Δ < (q-1)n/2`, the bound on the same scale.
    entropy_bound: Vec<Option<f64>>,
}

fn log_q(x: &num_bigint::BigUint, q: u32) -> f64 {
    // Shift to keep the mantissa in f64 range.
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_string().parse::<f64>().unwrap_or(0.0);
    (top.ln() + shift as f64 * std::f64::consts::LN_2) / (q as f64).ln()
}

/// Extended binomial row for `n` variables over `F_q` with the entropy bound.
pub fn ext_binom_row(n: usize, q: u32) -> Result<String, String> {
    if n > 200 || q > 64 {
        return Err("demo limits: n <= 200, q <= 64".into());
    }
    let table = ExtBinomTable::new(n, q).map_err(|e| e.to_string())?;
    let max = table.max_degree();
    let log_cumulative = (0..=max).map(|k| log_q(&table.cumulative(k as i64), q)).collect();
    let entropy_bound = (0..=max)
        .map(|k| {
            let alpha = k as f64 / max as f64;
            entropy_h(q, alpha).ok().map(|h| h * n as f64)
        })
        .collect();
    let out = BinomRow {
        n,
        q,
        row: table.row.iter().map(|v| v.to_string()).collect(),
        log_cumulative,
        entropy_bound,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SolveReport {
    q: u32,
    n: usize,
    m: usize,
    degree: u32,
    verdict: String,
    full_sum: u32,
    brute_roots: String,
    brute_sum: u32,
    agree: bool,
}

/// Runs the randomized solver on a PES text and compares with exhaustive search.
pub fn solve_text(text: &str, seed: u64, t: usize) -> Result<String, String> {
    let system = parse_pes(text).map_err(|e| e.to_string())?;
    let q = system.field().order();
    if (q as f64).powi(system.nvars() as i32) > 1e6 {
        return Err("demo limit: at most 10^6 points".into());
    }
    let mut params = SolverParams::for_degree(system.degree()).with_seed(seed);
    params.t_override = Some(t.max(1));
    let verdict = solve_pes(&system, &params).map_err(|e| e.to_string())?;
    let sum = full_sum(&system, &params, &RngStream::new(seed)).map_err(|e| e.to_string())?;
    let roots = count_common_roots(&system).map_err(|e| e.to_string())?.count;
    let exact = brute_z(&system).map_err(|e| e.to_string())?;
    let zero = num_bigint::BigUint::from(0u32);
    let report = SolveReport {
        q,
        n: system.nvars(),
        m: system.len(),
        degree: system.degree(),
        verdict: verdict.to_string(),
        full_sum: sum.index(),
        brute_roots: roots.to_string(),
        brute_sum: exact.index(),
        agree: sum == exact && (verdict.to_string() == "SAT") == (roots != zero),
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = exponentCurve)]
pub fn exponent_curve_js(q: u32, d: u32, samples: usize) -> Result<String, JsValue> {
    exponent_curve(q, d, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = extBinomRow)]
pub fn ext_binom_row_js(n: usize, q: u32) -> Result<String, JsValue> {
    ext_binom_row(n, q).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = solveText)]
pub fn solve_text_js(text: &str, seed: u64, t: usize) -> Result<String, JsValue> {
    solve_text(text, seed, t).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const DEMO_SAMPLE: &str = "# X1*X2 + 1 = 0 and X1 + X2 + X3 = 0 over F_3\npes 3 3 2\npoly 2\n1 1 1 0\n1 0 0 0\npoly 3\n1 1 0 0\n1 0 1 0\n1 0 0 1\n";

    #[test]
    fn curve_has_optimum_below_bound() {
        let v: Value = serde_json::from_str(&exponent_curve(2, 2, 50).unwrap()).unwrap();
        let z = v["zeta"].as_f64().unwrap();
        assert!(z < 0.6955 && z <= v["guaranteed_bound"].as_f64().unwrap());
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 49);
        assert!(pts.iter().all(|p| p["zeta"].as_f64().unwrap() >= z - 1e-6));
        assert!(exponent_curve(6, 2, 10).is_err());
    }

    #[test]
    fn binomial_row() {
        let v: Value = serde_json::from_str(&ext_binom_row(2, 3).unwrap()).unwrap();
        assert_eq!(v["row"], serde_json::json!(["1", "2", "3", "2", "1"]));
        let logs = v["log_cumulative"].as_array().unwrap();
        assert!((logs[4].as_f64().unwrap() - 2.0).abs() < 1e-9);
        let v: Value = serde_json::from_str(&ext_binom_row(40, 2).unwrap()).unwrap();
        for k in 1..20 {
            let bound = v["entropy_bound"][k].as_f64().unwrap();
            assert!(v["log_cumulative"][k].as_f64().unwrap() <= bound + 1e-9);
        }
    }

    #[test]
    fn solving_matches_brute_force() {
        let v: Value = serde_json::from_str(&solve_text("pes 3 2 1\npoly 2\n1 1 1\n1 0 0\n", 1, 10).unwrap()).unwrap();
        assert_eq!(v["verdict"], "SAT");
        assert_eq!(v["brute_roots"], "2");
        assert_eq!(v["agree"], true);
        assert!(solve_text("pes 6 1 0", 0, 1).is_err());
        // The sample shipped in the demo page.
        let v: Value = serde_json::from_str(&solve_text(DEMO_SAMPLE, 0, 24).unwrap()).unwrap();
        assert_eq!(v["agree"], true);
    }
}
