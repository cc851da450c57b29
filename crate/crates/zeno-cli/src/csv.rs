//! CSV tables: UTF-8, comma separated, one header row, numbers in
//! scientific notation with 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{ensure, Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Written as 0 or 1.
    Flag(bool),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Flag(v)
    }
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        ensure!(
            row.len() == self.header.len(),
            "row has {} cells for {} columns",
            row.len(),
            self.header.len()
        );
        self.rows.push(row);
        Ok(())
    }

    /// Builds a table from equally long columns.
    pub fn from_columns(columns: Vec<(String, Vec<Cell>)>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.1.len());
        ensure!(columns.iter().all(|c| c.1.len() == n), "columns differ in length");
        let mut table = Self::new(columns.iter().map(|c| c.0.clone()));
        let mut iters: Vec<_> = columns.into_iter().map(|c| c.1.into_iter()).collect();
        for _ in 0..n {
            table.rows.push(iters.iter_mut().map(|it| it.next().expect("length checked")).collect());
        }
        Ok(table)
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => write!(out, "{v:.16e}").expect("writing to a String"),
                    Cell::Flag(b) => out.push(if *b { '1' } else { '0' }),
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => std::io::stdout().lock().write_all(text.as_bytes()).context("writing to stdout"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-0.25), "-2.5000000000000000e-1");
        let back: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn renders_header_and_rows() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1.0.into(), true.into(), Cell::Text("comb")]).unwrap();
        assert_eq!(t.render(), "a,b,c\n1.0000000000000000e0,1,comb\n");
        assert!(t.push(vec![1.0.into()]).is_err());
    }
}
