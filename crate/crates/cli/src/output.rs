use serde_json::{Map, Value};

use crate::args::Format;

/// Machine records share the transcript line format: one JSON object per
/// line with `schema` and `type` keys.
pub const SCHEMA: u32 = 1;

pub struct Output {
    pub format: Format,
}

impl Output {
    pub fn new(format: Format) -> Self {
        Output { format }
    }

    pub fn machine(&self) -> bool {
        self.format == Format::Machine
    }

    /// Prints `human` or a `kind` record built from the fields of `fields`.
    pub fn emit(&self, kind: &str, fields: Value, human: impl FnOnce() -> String) {
        if self.machine() {
            println!("{}", record(kind, fields));
        } else {
            println!("{}", human());
        }
    }

    pub fn human(&self, text: impl FnOnce() -> String) {
        if !self.machine() {
            println!("{}", text());
        }
    }
}

pub fn record(kind: &str, fields: Value) -> String {
    let mut map = Map::new();
    map.insert("schema".into(), SCHEMA.into());
    map.insert("type".into(), kind.into());
    if let Value::Object(extra) = fields {
        map.extend(extra);
    }
    Value::Object(map).to_string()
}
