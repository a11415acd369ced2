//! Result reporting: human-readable key/value lines or one json object per
//! run with the core fields {mode, estimate, s, seed, wall_ms, edges}
//! always present, plus mode-specific extras.

use serde_json::{Map, Value};

#[derive(Debug, Clone)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new(mode: &str) -> Report {
        let mut report = Report {
            entries: Vec::new(),
        };
        report.set("mode", mode);
        report
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render_human(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{}: {}", k, s),
                other => format!("{}: {}", k, other),
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn render_json(&self) -> String {
        let map: Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Value::Object(map).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut r = Report::new("estimate");
        r.set("estimate", 4.25).set("s", 100).set("note", "text");
        let human = r.render_human();
        assert!(human.contains("mode: estimate"));
        assert!(human.contains("estimate: 4.25"));
        assert!(human.contains("note: text"));

        let json: serde_json::Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(json["mode"], "estimate");
        assert_eq!(json["estimate"], 4.25);
        assert_eq!(json["s"], 100);
    }
}
