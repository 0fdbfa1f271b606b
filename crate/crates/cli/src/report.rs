use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub payload: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, payload: Value) -> Self {
        Check { name: name.into(), status: Status::from_bool(ok), payload }
    }

    pub fn info(name: impl Into<String>, payload: Value) -> Self {
        Check { name: name.into(), status: Status::Pass, payload }
    }

    pub fn skip(name: impl Into<String>, why: &str) -> Self {
        Check { name: name.into(), status: Status::Skip, payload: Value::String(why.into()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub timestamp: String,
    pub results: Vec<Check>,
}

impl ReportDocument {
    pub fn new(command: &str, parameters: Map<String, Value>, results: Vec<Check>) -> Self {
        let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        ReportDocument { command: command.into(), parameters, timestamp, results }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|c| c.status != Status::Fail)
    }

    /// One line per check: `name  status  payload`; array payloads of objects become
    /// one line per row with the object's fields in key order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("check\tstatus\tpayload\n");
        for c in &self.results {
            match &c.payload {
                Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => {
                    for row in rows {
                        let cells: Vec<String> = row.as_object().unwrap().iter().map(|(k, v)| format!("{k}={}", flat(v))).collect();
                        out.push_str(&format!("{}\t{}\t{}\n", c.name, c.status.as_str(), cells.join(";")));
                    }
                }
                v => out.push_str(&format!("{}\t{}\t{}\n", c.name, c.status.as_str(), flat(v))),
            }
        }
        out
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fail_decides_the_outcome() {
        let r = ReportDocument::new("x", Map::new(), vec![Check::new("a", true, json!(1)), Check::skip("b", "n/a")]);
        assert!(r.passed());
        let r = ReportDocument::new("x", Map::new(), vec![Check::new("a", false, json!(1))]);
        assert!(!r.passed());
    }

    #[test]
    fn tsv_rows() {
        let r = ReportDocument::new("x", Map::new(), vec![Check::info("orbits", json!([{"size": 6}, {"size": 9}]))]);
        assert_eq!(r.to_tsv(), "check\tstatus\tpayload\norbits\tpass\tsize=6\norbits\tpass\tsize=9\n");
    }
}
