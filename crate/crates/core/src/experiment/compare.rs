//! Row-by-row comparison of two result files.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompareError {
    #[error("{which}: missing header line")]
    NoHeader { which: &'static str },
    #[error("{which}: no column `{column}`")]
    NoColumn { which: &'static str, column: String },
    #[error("{which}: line {line}: bad number `{value}`")]
    BadNumber { which: &'static str, line: usize, value: String },
    #[error("swept grids differ ({a} rows vs {b} rows, first mismatch at row {row})")]
    GridMismatch { a: usize, b: usize, row: usize },
}

/// Parsed data section of a result file: header and rows of raw cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    /// Skips `#` comment lines; the first remaining line is the header.
    pub fn parse(text: &str, which: &'static str) -> Result<Self, CompareError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
        let (_, head) = lines.next().ok_or(CompareError::NoHeader { which })?;
        let header = head.split(',').map(|s| s.trim().to_string()).collect();
        let rows = lines.map(|(i, l)| (i + 1, l.split(',').map(|s| s.trim().to_string()).collect())).collect();
        Ok(Self { header, rows })
    }

    fn index(&self, column: &str, which: &'static str) -> Result<usize, CompareError> {
        self.header
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| CompareError::NoColumn { which, column: column.to_string() })
    }

    /// Column values; empty cells become `None`.
    pub fn column(&self, column: &str, which: &'static str) -> Result<Vec<Option<f64>>, CompareError> {
        let i = self.index(column, which)?;
        self.rows
            .iter()
            .map(|(line, cells)| {
                let v = cells.get(i).map(String::as_str).unwrap_or("");
                if v.is_empty() {
                    Ok(None)
                } else {
                    v.parse().map(Some).map_err(|_| CompareError::BadNumber { which, line: *line, value: v.to_string() })
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub swept_value: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// `|a − b| / |b|`, or `None` if either side is missing.
    pub rel_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub max_gap: f64,
    pub compared: usize,
    pub skipped: usize,
    pub tolerance: f64,
}

impl CompareReport {
    pub fn within_tolerance(&self) -> bool {
        self.max_gap <= self.tolerance
    }

    pub fn render(&self) -> String {
        let mut s = String::from("swept_value,a,b,rel_gap\n");
        let f = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", f(r.swept_value), f(r.a), f(r.b), f(r.rel_gap)));
        }
        s.push_str(&format!(
            "# max_gap = {} over {} rows ({} skipped), tolerance {}: {}\n",
            self.max_gap,
            self.compared,
            self.skipped,
            self.tolerance,
            if self.within_tolerance() { "ok" } else { "exceeded" }
        ));
        s
    }
}

/// Compares `column_a` of `a` against `column_b` of `b`, row by row. The
/// `swept_value` columns must match exactly.
pub fn compare(
    a: &str,
    b: &str,
    column_a: &str,
    column_b: &str,
    tolerance: f64,
) -> Result<CompareReport, CompareError> {
    let (ta, tb) = (Table::parse(a, "a")?, Table::parse(b, "b")?);
    let (ga, gb) = (ta.column("swept_value", "a")?, tb.column("swept_value", "b")?);
    if ga.len() != gb.len() || ga != gb {
        let row = ga.iter().zip(&gb).position(|(x, y)| x != y).unwrap_or(ga.len().min(gb.len()));
        return Err(CompareError::GridMismatch { a: ga.len(), b: gb.len(), row });
    }
    let (va, vb) = (ta.column(column_a, "a")?, tb.column(column_b, "b")?);
    let mut rows = Vec::new();
    let (mut max_gap, mut compared, mut skipped) = (0.0f64, 0, 0);
    for i in 0..ga.len() {
        let rel_gap = match (va[i], vb[i]) {
            (Some(x), Some(y)) if x == y => Some(0.0),
            (Some(x), Some(y)) => Some((x - y).abs() / y.abs()),
            _ => None,
        };
        match rel_gap {
            Some(g) => {
                max_gap = max_gap.max(g);
                compared += 1;
            }
            None => skipped += 1,
        }
        rows.push(CompareRow { swept_value: ga[i], a: va[i], b: vb[i], rel_gap });
    }
    Ok(CompareReport { rows, max_gap, compared, skipped, tolerance })
}
