//! Line-oriented reports.
//!
//! The machine form is a versioned header, a `kind` line, then one
//! `key value` line per entry and a closing `end`. Keys may repeat and are
//! kept in order. Values are escaped so that every report round-trips:
//!
//! ```text
//! fmtk-report 1
//! kind verify
//! n 1
//! first_failure a=14 e=4
//! end
//! ```

use std::fmt::{self, Display};

use thiserror::Error;

pub const HEADER: &str = "fmtk-report";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unsupported report version {0}")]
    Version(String),
    #[error("missing entry `{0}`")]
    Missing(String),
    #[error("entry `{key}` has malformed value `{value}`")]
    Malformed { key: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub kind: String,
    pub entries: Vec<(String, String)>,
}

fn valid_key(key: &str) -> bool {
    key != "end" && !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
}

fn escape(v: &str) -> String {
    let mut out = String::with_capacity(v.len());
    for c in v.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(v: &str) -> Option<String> {
    let mut out = String::with_capacity(v.len());
    let mut it = v.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next()? {
            '\\' => out.push('\\'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

impl Report {
    pub fn new(kind: impl Into<String>) -> Report {
        let kind = kind.into();
        assert!(valid_key(&kind), "invalid report kind {kind:?}");
        Report {
            kind,
            entries: Vec::new(),
        }
    }

    /// Appends an entry. Keys are restricted to `[A-Za-z0-9_.-]`, and `end` is reserved.
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        let key = key.into();
        assert!(valid_key(&key), "invalid report key {key:?}");
        self.entries.push((key, value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ReportError> {
        self.get(key).ok_or_else(|| ReportError::Missing(key.to_string()))
    }

    /// Parses the value of `key` with `FromStr`.
    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<T, ReportError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| ReportError::Malformed {
            key: key.to_string(),
            value: v.to_string(),
        })
    }

    /// Appends every entry of `other`, prefixing its keys with `prefix.`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: &Report) {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}.{k}"), v.clone()));
        }
    }

    pub fn to_machine(&self) -> String {
        let mut out = format!("{HEADER} {VERSION}\nkind {}\n", self.kind);
        for (k, v) in &self.entries {
            out.push_str(k);
            if !v.is_empty() {
                out.push(' ');
                out.push_str(&escape(v));
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    /// Human-oriented rendering: aligned `key: value` lines under a title.
    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = format!("[{}]\n", self.kind);
        for (k, v) in &self.entries {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, ReportError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let syntax = |line, message: &str| ReportError::Syntax {
            line,
            message: message.to_string(),
        };
        let (ln, head) = lines.next().ok_or_else(|| syntax(1, "empty report"))?;
        let version = head
            .strip_prefix(HEADER)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| syntax(ln, "missing header"))?;
        if version != VERSION.to_string() {
            return Err(ReportError::Version(version.to_string()));
        }
        let (ln, kind_line) = lines.next().ok_or_else(|| syntax(ln + 1, "missing kind"))?;
        let kind = kind_line
            .strip_prefix("kind ")
            .filter(|k| valid_key(k))
            .ok_or_else(|| syntax(ln, "malformed kind line"))?;
        let mut report = Report::new(kind);
        for (ln, line) in lines {
            if line == "end" {
                return Ok(report);
            }
            let (key, value) = line.split_once(' ').unwrap_or((line, ""));
            if !valid_key(key) {
                return Err(syntax(ln, "malformed key"));
            }
            let value = unescape(value).ok_or_else(|| syntax(ln, "bad escape"))?;
            report.entries.push((key.to_string(), value));
        }
        Err(ReportError::Syntax {
            line: text.lines().count(),
            message: "missing end".into(),
        })
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_machine())
    }
}

/// Comma-separated list, `-` for the empty list.
pub fn join_elements<T: Display>(xs: &[T]) -> String {
    if xs.is_empty() {
        return "-".into();
    }
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Inverse of [`join_elements`].
pub fn split_elements<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    if s == "-" {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_round_trip() {
        let mut r = Report::new("verify");
        r.push("n", 1).push("k", 2).push("note", "multi\nline \\ text").push("flag", "");
        r.push("n", 3);
        let text = r.to_machine();
        assert!(text.starts_with("fmtk-report 1\nkind verify\n"));
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get_all("n").collect::<Vec<_>>(), vec!["1", "3"]);
        assert_eq!(back.parse_value::<u32>("k").unwrap(), 2);
        assert!(matches!(back.parse_value::<u32>("note"), Err(ReportError::Malformed { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Report::parse(""), Err(ReportError::Syntax { .. })));
        assert!(matches!(
            Report::parse("fmtk-report 2\nkind x\nend\n"),
            Err(ReportError::Version(_))
        ));
        assert!(matches!(
            Report::parse("fmtk-report 1\nkind x\nk v\n"),
            Err(ReportError::Syntax { .. })
        ));
    }

    #[test]
    fn element_lists() {
        assert_eq!(join_elements::<u32>(&[]), "-");
        assert_eq!(join_elements(&[1, 2, 3]), "1,2,3");
        assert_eq!(split_elements::<u32>("1,2,3"), Some(vec![1, 2, 3]));
        assert_eq!(split_elements::<u32>("-"), Some(vec![]));
        assert_eq!(split_elements::<u32>("1,x"), None);
    }

    proptest! {
        #[test]
        fn round_trips(entries in proptest::collection::vec(("[a-z_.]{1,8}", "\\PC{0,20}|[\\\\\n ]{0,4}"), 0..10)) {
            let mut r = Report::new("prop");
            for (k, v) in entries.iter().filter(|(k, _)| k != "end") {
                r.push(k.clone(), v);
            }
            prop_assert_eq!(Report::parse(&r.to_machine()).unwrap(), r);
        }
    }
}
