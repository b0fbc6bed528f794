use opcheck_web::{compare_object_json, envelope_json, evaluate_json, mul_table_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn mul_table_rows() {
    let t = parse(mul_table_json(2, "strengthened").unwrap());
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1 + 2 + 4);
    let am = rows.iter().find(|r| r["inputs"] == "a,m").unwrap();
    assert_eq!(am["m"]["count"], 1);
    assert_eq!(am["a"]["count"], 0);
    let lit = parse(mul_table_json(1, "literal").unwrap());
    let m = lit["rows"].as_array().unwrap().iter().find(|r| r["inputs"] == "m").unwrap().clone();
    assert_eq!(m["a"]["count"], 1);
    assert!(mul_table_json(9, "strengthened").is_err());
    assert!(mul_table_json(1, "loose").is_err());
}

#[test]
fn envelope_toggle() {
    let s = parse(envelope_json(2, 2, "strengthened").unwrap());
    assert_eq!(s["report"]["verdict"], "pass");
    assert_eq!(s["objects"].as_array().unwrap().len(), 25);
    let l = parse(envelope_json(1, 1, "literal").unwrap());
    assert_eq!(l["report"]["witness"]["source"], "(1|1)@1:1");
    assert!(envelope_json(3, 3, "strengthened").is_err());
    let o = parse(compare_object_json("(2|1)@1:1,1").unwrap());
    assert_eq!(o["image"], "({1,2|1})");
}

#[test]
fn evaluator() {
    let r = parse(evaluate_json("z2_additive", "2->1:1,0", "1,1,0").unwrap());
    assert_eq!(r["output"], serde_json::json!(["1", "1"]));
    assert_eq!(r["functoriality"]["status"], "pass");
    let r = parse(evaluate_json("max_monoid", "2->1:1,1", "0,1,0").unwrap());
    assert_eq!(r["output"], serde_json::json!(["1", "0"]));
    assert!(evaluate_json("z2_additive", "2->1:1,0", "1,1").is_err());
    assert!(evaluate_json("z2_additive", "2->1:1,0", "1,7,0").is_err());
}
