use mksys_web::{compose, example_model, parse_matrix, uniformize_row, unroll};
use serde_json::Value;

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn unrolls_the_bundled_model() {
    let v = json(&unroll(&example_model(), 2).unwrap());
    let phi2 = v["tables"].as_array().unwrap().iter().find(|t| t["table"] == "phi" && t["n"] == 2).unwrap();
    let row = phi2["rows"].as_array().unwrap().iter().find(|r| r["path"] == serde_json::json!(["0", "1", "1"])).unwrap();
    assert_eq!(row["value"], "1/2");
}

#[test]
fn unroll_reports_invalid_models() {
    let bad = example_model().replace("\"1/2\",\n            \"1/2\"", "\"1/2\",\n            \"2/5\"");
    let err = unroll(&bad, 1).unwrap_err();
    assert!(err.contains("9/10"), "{err}");
}

#[test]
fn uniformizes_with_running_sums() {
    let v = json(&uniformize_row("1/3 0 2/3").unwrap());
    assert_eq!(v["breakpoints"], serde_json::json!(["0/1", "1/3", "1/3", "1/1"]));
    assert_eq!(v["intervals"][2]["from"], "1/3");
}

#[test]
fn uniformize_rejects_a_row_that_is_not_a_distribution() {
    assert!(uniformize_row("1/2 1/3").unwrap_err().contains("5/6"));
}

#[test]
fn composes_by_matrix_product() {
    // Independent oracle: the sum over the middle index, computed by hand.
    // [1/2 1/2; 0 1] [1/3 2/3; 1 0] = [2/3 1/3; 1 0]
    let v = json(&compose("1/2 1/2; 0 1", "1/3 2/3; 1 0").unwrap());
    assert_eq!(v["rows"], serde_json::json!([["2/3", "1/3"], ["1/1", "0/1"]]));
}

#[test]
fn compose_rejects_mismatched_shapes() {
    assert!(compose("1", "1/2 1/2; 1/2 1/2").unwrap_err().contains("columns"));
}

#[test]
fn matrices_accept_newlines_and_commas() {
    assert_eq!(parse_matrix("1/2, 1/2\n1 0").unwrap().len(), 2);
    assert!(parse_matrix("1/0").is_err());
}
