//! Merging suite reports into flat CSV tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::verify::{Bound, SuiteReport, Table};

pub const CHECK_COLUMNS: [&str; 7] = ["suite", "name", "measured", "tolerance", "bound", "target", "pass"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Merged {
    pub checks: Table,
    /// Named tables, each prefixed with a `suite` column.
    pub tables: BTreeMap<String, Table>,
}

/// Reads suite reports; anything that is not a report is a config error.
pub fn load_reports(paths: &[PathBuf]) -> Result<Vec<SuiteReport>> {
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        })
        .collect()
}

pub fn merge(reports: &[SuiteReport]) -> Result<Merged> {
    let mut out = Merged {
        checks: Table {
            columns: CHECK_COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        },
        tables: BTreeMap::new(),
    };
    for r in reports {
        for c in &r.checks {
            let (bound, target) = match c.bound {
                Bound::AtMost => ("at_most", String::new()),
                Bound::AtLeast => ("at_least", String::new()),
                Bound::Near { target } => ("near", format!("{target:e}")),
                Bound::Report => ("report", String::new()),
            };
            out.checks.rows.push(vec![
                r.suite.clone(),
                c.name.clone(),
                format!("{:e}", c.measured),
                format!("{:e}", c.tolerance),
                bound.into(),
                target,
                c.pass.to_string(),
            ]);
        }
        for (name, t) in &r.tables {
            let merged = out.tables.entry(name.clone()).or_insert_with(|| Table {
                columns: std::iter::once("suite".to_string()).chain(t.columns.iter().cloned()).collect(),
                rows: Vec::new(),
            });
            if merged.columns[1..] != t.columns[..] {
                return Err(Error::Config(format!("table '{name}' has inconsistent columns across reports")));
            }
            merged
                .rows
                .extend(t.rows.iter().map(|row| std::iter::once(r.suite.clone()).chain(row.iter().cloned()).collect()));
        }
    }
    Ok(out)
}

fn write_table(path: &Path, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `checks.csv` and one `<table>.csv` per named table; returns the paths.
pub fn write_merged(dir: &Path, m: &Merged) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![dir.join("checks.csv")];
    write_table(&written[0], &m.checks)?;
    for (name, t) in &m.tables {
        let path = dir.join(format!("{name}.csv"));
        write_table(&path, t)?;
        written.push(path);
    }
    Ok(written)
}
