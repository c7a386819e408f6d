use std::fmt::Write;

use serde::Serialize;

/// Rectangular numeric table; `None` cells are written blank.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// UTF-8 CSV with one header row and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    write!(out, "{v:.11e}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["time_s", "p1", "p1_free"]);
        t.push(vec![Some(0.0), Some(1.0 / 3.0), None]);
        assert_eq!(t.to_csv(), "time_s,p1,p1_free\n0.00000000000e0,3.33333333333e-1,\n");
        assert_eq!(t.column("p1").unwrap(), vec![Some(1.0 / 3.0)]);
    }
}
