use std::io::{self, Write};

use serde_json::{json, Map, Value};

/// Version of the JSON layout.
pub const FORMAT: u64 = 1;

/// A ranked result list, optionally labelled (one per index set, clause
/// slot, and so on).
#[derive(Debug, Default)]
pub struct Section {
    pub label: Option<String>,
    pub meta: Map<String, Value>,
    pub results: Vec<(u64, String)>,
}

impl Section {
    pub fn new(results: Vec<(u64, String)>) -> Self {
        Section {
            results,
            ..Default::default()
        }
    }

    pub fn labelled(label: String, results: Vec<(u64, String)>) -> Self {
        Section {
            label: Some(label),
            results,
            ..Default::default()
        }
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_owned(), value);
        self
    }

    fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .enumerate()
            .map(|(i, (w, t))| json!({"weight": w, "term": t, "rank": i + 1}))
            .collect();
        let mut obj = self.meta.clone();
        if let Some(label) = &self.label {
            obj.insert("label".into(), json!(label));
        }
        obj.insert("results".into(), Value::Array(results));
        Value::Object(obj)
    }
}

/// Everything one invocation prints.
#[derive(Debug)]
pub enum Report {
    Ranked {
        command: &'static str,
        sections: Vec<Section>,
    },
    Grammar {
        command: &'static str,
        text: String,
        roots: Vec<String>,
    },
    Verdict {
        command: &'static str,
        holds: bool,
    },
}

impl Report {
    pub fn ranked(command: &'static str, results: Vec<(u64, String)>) -> Self {
        Report::Ranked {
            command,
            sections: vec![Section::new(results)],
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Report::Ranked { sections, .. } => sections.iter().all(|s| s.results.is_empty()),
            Report::Grammar { .. } | Report::Verdict { .. } => false,
        }
    }

    pub fn write(&self, out: &mut impl Write, as_json: bool) -> io::Result<()> {
        if as_json {
            let value = match self {
                Report::Ranked { command, sections } => {
                    if let [only] = sections.as_slice() {
                        if only.label.is_none() && only.meta.is_empty() {
                            let mut v = only.to_json();
                            v["format"] = json!(FORMAT);
                            v["command"] = json!(command);
                            return writeln!(out, "{}", serde_json::to_string_pretty(&v)?);
                        }
                    }
                    json!({
                        "format": FORMAT,
                        "command": command,
                        "sections": sections.iter().map(Section::to_json).collect::<Vec<_>>(),
                    })
                }
                Report::Grammar {
                    command,
                    text,
                    roots,
                } => {
                    json!({"format": FORMAT, "command": command, "grammar": text, "roots": roots})
                }
                Report::Verdict { command, holds } => {
                    json!({"format": FORMAT, "command": command, "holds": holds})
                }
            };
            return writeln!(out, "{}", serde_json::to_string_pretty(&value)?);
        }
        match self {
            Report::Ranked { sections, .. } => {
                for s in sections {
                    if let Some(label) = &s.label {
                        writeln!(out, "# {label}")?;
                    }
                    for (w, t) in &s.results {
                        writeln!(out, "{w}\t{t}")?;
                    }
                }
            }
            Report::Grammar { text, roots, .. } => {
                if !roots.is_empty() {
                    writeln!(out, "# roots {}", roots.join(","))?;
                }
                write!(out, "{text}")?;
            }
            Report::Verdict { holds, .. } => writeln!(out, "{holds}")?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_section_json_is_flat() {
        let r = Report::ranked("antiunify", vec![(3, "v*v".into())]);
        let mut buf = Vec::new();
        r.write(&mut buf, true).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["format"], 1);
        assert_eq!(v["results"][0]["rank"], 1);
        assert_eq!(v["results"][0]["term"], "v*v");
    }

    #[test]
    fn text_lines_are_tab_separated() {
        let r = Report::Ranked {
            command: "lgg",
            sections: vec![Section::labelled("slot 1".into(), vec![(2, "p(v)".into())])],
        };
        let mut buf = Vec::new();
        r.write(&mut buf, false).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# slot 1\n2\tp(v)\n");
    }
}
