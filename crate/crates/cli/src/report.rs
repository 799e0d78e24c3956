use std::fmt::Display;

/// Ordered key/value report, rendered either aligned for reading or as
/// `key=value` lines with `--machine`.
pub struct Report {
    machine: bool,
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(machine: bool) -> Self {
        Report { machine, entries: Vec::new() }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.machine {
            for (k, v) in &self.entries {
                out.push_str(&format!("{k}={v}\n"));
            }
        } else {
            let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.entries {
                out.push_str(&format!("{k:<width$}  {v}\n"));
            }
        }
        out
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn pass_fail(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}
