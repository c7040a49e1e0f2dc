//! Reports and their two renderings.
//!
//! Machine lines are `<INVARIANT>\t<degree>\t<value>[\t<trusted>]` and
//! `VERDICT\t<name>\t<value>`; later columns may be added but existing ones
//! never move. The text rendering uses the same words separated by spaces,
//! with notes and the trusted-degree bound spelled out.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Line {
    Value { invariant: String, degree: i64, value: usize, trusted: Option<usize> },
    Verdict { name: String, value: String },
    Note(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
    failed: bool,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.lines.push(Line::Note(text.into()));
    }

    pub fn value(&mut self, invariant: &str, degree: i64, value: usize, trusted: Option<usize>) {
        self.lines.push(Line::Value { invariant: invariant.to_string(), degree, value, trusted });
    }

    pub fn values(&mut self, invariant: &str, values: &[usize], trusted: Option<usize>) {
        for (i, v) in values.iter().enumerate() {
            self.value(invariant, i as i64, *v, trusted);
        }
    }

    /// Records a verdict; `ok = false` makes the run exit with status 1.
    pub fn verdict(&mut self, name: &str, value: impl ToString, ok: bool) {
        self.lines.push(Line::Verdict { name: name.to_string(), value: value.to_string() });
        self.failed |= !ok;
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match (line, format) {
                (Line::Value { invariant, degree, value, trusted }, Format::Tsv) => {
                    let _ = write!(out, "{invariant}\t{degree}\t{value}");
                    if let Some(t) = trusted {
                        let _ = write!(out, "\t{t}");
                    }
                    out.push('\n');
                }
                (Line::Value { invariant, degree, value, trusted }, Format::Text) => {
                    let _ = write!(out, "{invariant} {degree} {value}");
                    if let Some(t) = trusted {
                        let _ = write!(out, "   (trusted through degree {t})");
                    }
                    out.push('\n');
                }
                (Line::Verdict { name, value }, Format::Tsv) => {
                    let _ = writeln!(out, "VERDICT\t{name}\t{value}");
                }
                (Line::Verdict { name, value }, Format::Text) => {
                    let _ = writeln!(out, "VERDICT {name} {value}");
                }
                (Line::Note(text), Format::Text) => {
                    let _ = writeln!(out, "# {text}");
                }
                (Line::Note(_), Format::Tsv) => {}
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut r = Report::new();
        r.note("ground field");
        r.value("HC", 0, 1, Some(8));
        r.verdict("degenerate", 8, true);
        assert_eq!(r.render(Format::Tsv), "HC\t0\t1\t8\nVERDICT\tdegenerate\t8\n");
        assert_eq!(
            r.render(Format::Text),
            "# ground field\nHC 0 1   (trusted through degree 8)\nVERDICT degenerate 8\n"
        );
        assert!(!r.failed());
    }
}
