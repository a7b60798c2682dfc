//! Deterministic CSV emission: comma-separated, '.' decimal, 17 significant
//! digits (round-trip safe for f64), a header row, and '#'-prefixed comment
//! lines for metadata. Rerunning an unchanged config reproduces every
//! non-comment byte.

use std::io::Write;
use std::path::Path;

pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.16e}")
}

pub struct CsvDoc {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footers: Vec<String>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        CsvDoc {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            footers: Vec::new(),
        }
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row arity mismatch");
        self.rows.push(cells);
    }

    /// A '#'-prefixed footer line (fit results and similar summaries).
    pub fn footer(&mut self, text: impl Into<String>) {
        self.footers.push(text.into());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for cm in &self.comments {
            out.push_str("# ");
            out.push_str(cm);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for f in &self.footers {
            out.push_str("# ");
            out.push_str(f);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_precision() {
        let v = 0.1 + 0.2;
        let s = format_float(v);
        let back: f64 = s.parse().unwrap();
        assert_eq!(v.to_bits(), back.to_bits());
    }

    #[test]
    fn deterministic_render() {
        let mut doc = CsvDoc::new(&["a", "b"]);
        doc.comment("timestamp: ignored in comparisons");
        doc.row(vec![format_float(1.5), format_float(-2.25)]);
        doc.footer("fit: p = 1");
        let r1 = doc.render();
        let r2 = doc.render();
        assert_eq!(r1, r2);
        let data_lines: Vec<&str> = r1.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 2);
    }
}
