//! CSV results with a `#` provenance header.

use crate::VERSION;

/// Reals in results files: fixed 12 decimals, so identical runs produce
/// identical bytes.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.12}");
    // Avoid "-0.000000000000" for tiny negatives.
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Header lines written before the column names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
    pub shots: Option<i64>,
    pub units: Option<&'static str>,
}

impl Provenance {
    fn render(&self) -> String {
        let mut out = format!("# qcx {VERSION}\n");
        if let Some(h) = &self.config_sha256 {
            out += &format!("# config-sha256: {h}\n");
        }
        if let Some(s) = self.seed {
            out += &format!("# seed: {s}\n");
        }
        if let Some(s) = self.shots {
            out += &format!("# shots: {s}\n");
        }
        if let Some(u) = self.units {
            out += &format!("# units: {u}\n");
        }
        out
    }
}

/// Rows of already formatted cells. Short rows are padded with empty cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Table { columns, rows }
    }

    pub fn render(&self, provenance: &Provenance) -> String {
        let mut out = provenance.render();
        out += &self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells = row.clone();
            cells.resize(self.columns.len().max(row.len()), String::new());
            out += &cells.join(",");
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_are_fixed_width() {
        assert_eq!(format_real(-1.1261), "-1.126100000000");
        assert_eq!(format_real(-1e-15), "0.000000000000");
    }

    #[test]
    fn renders_header_and_pads() {
        let p = Provenance {
            seed: Some(3),
            units: Some("hartree"),
            ..Default::default()
        };
        let t = Table::new(vec!["a".into(), "b".into()], vec![vec!["1".into()]]);
        let s = t.render(&p);
        assert!(s.starts_with("# qcx "));
        assert!(s.ends_with("# seed: 3\n# units: hartree\na,b\n1,\n"), "{s}");
    }
}
