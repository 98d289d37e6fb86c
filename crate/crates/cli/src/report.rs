use serde_json::{Map, Value};

/// A verb's result: a status word, ordered fields, and whether the outcome
/// counts as success (exit 0) or a negative verdict (exit 1).
pub struct Report {
    verb: &'static str,
    status: String,
    ok: bool,
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new(verb: &'static str, status: impl Into<String>, ok: bool) -> Self {
        Report {
            verb,
            status: status.into(),
            ok,
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn into_fields(self) -> Vec<(String, Value)> {
        self.fields
    }

    pub fn ok(&self) -> bool {
        self.ok
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut m = Map::new();
            m.insert("verb".into(), self.verb.into());
            m.insert("status".into(), self.status.clone().into());
            for (k, v) in &self.fields {
                m.insert(k.clone(), v.clone());
            }
            let mut s = serde_json::to_string(&Value::Object(m)).expect("serializable");
            s.push('\n');
            return s;
        }
        let mut out = format!("{}: {}\n", self.verb, self.status);
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}: {}\n", text(v)));
        }
        out
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "-".to_string(),
        Value::Array(items) => items.iter().map(text).collect::<Vec<_>>().join(", "),
        Value::Object(_) => serde_json::to_string(v).expect("serializable"),
        other => other.to_string(),
    }
}
