//! Loading and saving return series as CSV, and adapting a loaded series
//! as a deterministic market player.
//!
//! Format: UTF-8, comma separated, first row is a header, optional leading
//! date/label column, remaining columns are numeric simple returns with the
//! index in the first return column. Scientific notation is accepted.
//! Missing or out-of-domain values are errors, never imputed: the game has
//! no notion of a skipped round.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::protocol::{GameConfig, ReturnVector};
use crate::strategies::MarketModel;

/// A rectangular table of simple returns: one row per round, one column per
/// security, index first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub labels: Vec<String>,
    pub rows: Vec<ReturnVector>,
    pub dt: f64,
    pub source: String,
}

impl ReturnSeries {
    pub fn new(labels: Vec<String>, rows: Vec<ReturnVector>, dt: f64, source: String) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidConfig("series needs at least one column".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "round duration must be a positive real, got {dt}"
            )));
        }
        for row in &rows {
            if row.len() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    got: row.len(),
                });
            }
        }
        Ok(Self {
            labels,
            rows,
            dt,
            source,
        })
    }

    /// Non-index securities in the series. May be zero for an index-only
    /// file, which supports `s = m` analysis but not a full game.
    pub fn num_securities(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn num_rounds(&self) -> usize {
        self.rows.len()
    }

    /// Game parameters implied by the table; requires at least one
    /// non-index column.
    pub fn game_config(&self) -> Result<GameConfig> {
        GameConfig::new(self.num_securities(), self.num_rounds(), self.dt)
    }

    /// Deterministic market replaying the rows in order.
    pub fn as_market(&self) -> MarketModel {
        MarketModel::Deterministic {
            path: self.rows.clone(),
        }
    }

    /// Read a series from a CSV file. `dt` must be supplied by the caller
    /// (e.g. 1/252 for daily data in year units); per-unit-time statistics
    /// are meaningless without it.
    pub fn load_csv(path: &Path, dt: f64) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_csv(&path.display().to_string(), &content, dt)
    }

    /// Parse CSV text. `source` names the origin in error messages.
    pub fn parse_csv(source: &str, content: &str, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "round duration must be a positive real, got {dt}"
            )));
        }
        let csv_err = |line: usize, message: String| Error::Csv {
            path: source.to_string(),
            line,
            message,
        };

        let mut lines = content
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| csv_err(1, "empty file".into()))?;
        let header_cells: Vec<&str> = header.split(',').map(str::trim).collect();

        let data: Vec<(usize, &str)> = lines.collect();
        if data.is_empty() {
            return Err(csv_err(header_line, "empty series (no data rows)".into()));
        }

        // A leading date/label column is detected from the first data row:
        // if its first cell is not numeric, the first column is a label.
        let first_cells: Vec<&str> = data[0].1.split(',').map(str::trim).collect();
        let has_label_column = first_cells
            .first()
            .map_or(false, |cell| cell.parse::<f64>().is_err());
        let skip = usize::from(has_label_column);
        if header_cells.len() <= skip {
            return Err(csv_err(header_line, "no return columns".into()));
        }
        let labels: Vec<String> = header_cells[skip..].iter().map(|s| s.to_string()).collect();

        let mut rows = Vec::with_capacity(data.len());
        for (line, raw) in data {
            let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
            if cells.len() != labels.len() + skip {
                return Err(csv_err(
                    line,
                    format!(
                        "expected {} columns, found {}",
                        labels.len() + skip,
                        cells.len()
                    ),
                ));
            }
            let mut returns = Vec::with_capacity(labels.len());
            for (column, cell) in cells[skip..].iter().enumerate() {
                let value: f64 = cell.parse().map_err(|_| {
                    csv_err(
                        line,
                        format!("column {}: cannot parse {cell:?} as a number", column + skip + 1),
                    )
                })?;
                if !value.is_finite() || value <= -1.0 {
                    return Err(csv_err(
                        line,
                        format!(
                            "column {}: return {value} outside the domain (-1, inf)",
                            column + skip + 1
                        ),
                    ));
                }
                returns.push(value);
            }
            rows.push(ReturnVector::new(returns).expect("validated above"));
        }

        Self::new(labels, rows, dt, source.to_string())
    }

    /// Render back to CSV. Values use the shortest representation that
    /// parses back to the identical `f64`, so a write/read cycle is exact.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for value in row.as_slice() {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{value}");
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
