//! Reports: an ordered list of records rendered either for people or as
//! tab-separated `key<TAB>value` lines.

use std::fmt::Write as _;

/// One result line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, String)>,
    pub text: String,
}

impl Record {
    pub fn new(kind: &'static str, text: impl Into<String>) -> Self {
        Record { kind, fields: Vec::new(), text: text.into() }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub records: Vec<Record>,
    /// Whether some mathematical check failed.
    pub failed: bool,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn heading(&mut self, title: &str) {
        self.records.push(Record::new("section", format!("== {title} ==")).field("title", title));
    }

    pub fn extend(&mut self, other: Report) {
        self.failed |= other.failed;
        self.records.extend(other.records);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for r in &self.records {
            match format {
                Format::Text => {
                    let _ = writeln!(out, "{}", r.text);
                }
                Format::Machine => {
                    out.push_str("record\t");
                    out.push_str(r.kind);
                    for (k, v) in &r.fields {
                        let _ = write!(out, "\t{k}\t{}", v.replace(['\t', '\n'], " "));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn find<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.kind == kind)
    }
}
