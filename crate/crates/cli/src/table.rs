//! The min / average / max table over the full space and the special subspaces.

use serde::Serialize;

use sicframe::averages::{exact_avg_fh, mc_avg, mc_avg_f, moment_avg_f, AverageResult};
use sicframe::framepot::f_general;
use sicframe::numcore::CVector;
use sicframe::record::{fmt17, J17};
use sicframe::sicsearch::{search, Mode, SearchConfig};
use sicframe::subspace::{Space, SubspaceLabel};

use crate::CliError;

pub const COLUMNS: [&str; 6] = ["f", "f_H", "f_H(H+)", "f_H(H-)", "f_H(H1)", "f_H(Halpha)"];

/// Published N = 7 entries, row by row; "?" marks an entry left uncomputed.
const PUBLISHED_7: [[&str; 6]; 3] = [
    ["0", "0", "12.2 (?)", "4.764 (?)", "0", "?"],
    ["18.375", "14.29", "25.72", "25.72", "15.98", "11.75"],
    ["900.4", "128.6 (?)", "128.6 (?)", "42.88 (?)", "?", "?"],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Exact,
    Search,
    Identity,
    Unavailable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub value: Option<J17>,
    pub exact: Option<String>,
    pub source: Source,
    /// Found numerically, not proven.
    pub soft: bool,
    pub converged: Option<bool>,
    pub mc_mean: Option<J17>,
    pub mc_std_error: Option<J17>,
    pub published: Option<&'static str>,
}

impl Cell {
    fn unavailable() -> Self {
        Self {
            value: None,
            exact: None,
            source: Source::Unavailable,
            soft: false,
            converged: None,
            mc_mean: None,
            mc_std_error: None,
            published: None,
        }
    }

    fn exact(r: &AverageResult) -> Self {
        Self {
            value: Some(J17(r.value)),
            exact: r.exact.as_ref().map(ToString::to_string),
            source: Source::Exact,
            ..Self::unavailable()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: &'static str,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub dim: usize,
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("row,{}\n", COLUMNS.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .cells
                .iter()
                .map(|c| c.value.map_or_else(|| "?".to_string(), |v| fmt17(v.0)))
                .collect();
            out.push_str(&format!("{},{}\n", row.name, cells.join(",")));
        }
        out.pop();
        out
    }
}

fn column_spaces() -> [Space; 6] {
    [
        Space::Full,
        Space::Full,
        Space::Sub(SubspaceLabel::HPlus),
        Space::Sub(SubspaceLabel::HMinus),
        Space::Sub(SubspaceLabel::Zauner1),
        Space::Sub(SubspaceLabel::ZaunerAlpha),
    ]
}

fn average_cell(
    col: usize,
    space: Space,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Cell, CliError> {
    if col == 0 {
        let mut cell = Cell::exact(&moment_avg_f(n)?);
        if samples > 0 {
            let est = mc_avg_f(n, samples, seed)?;
            cell.mc_mean = Some(J17(est.mean));
            cell.mc_std_error = Some(J17(est.std_error));
        }
        return Ok(cell);
    }
    let embedding = match space.build(n) {
        Ok(e) => e,
        Err(_) => return Ok(Cell::unavailable()),
    };
    let mut cell = Cell::exact(&exact_avg_fh(n, embedding.as_ref())?);
    if samples > 0 {
        let est = mc_avg(n, embedding.as_ref(), samples, seed)?;
        cell.mc_mean = Some(J17(est.mean));
        cell.mc_std_error = Some(J17(est.std_error));
    }
    Ok(cell)
}

fn search_cell(
    space: Space,
    n: usize,
    mode: Mode,
    restarts: usize,
    seed: u64,
) -> Result<Cell, CliError> {
    let config = SearchConfig::new(n, space, mode)
        .with_restarts(restarts)
        .with_seed(seed);
    let r = search(&config)?;
    Ok(Cell {
        value: Some(J17(r.best_value)),
        source: Source::Search,
        soft: true,
        converged: Some(r.converged),
        ..Cell::unavailable()
    })
}

/// `f` over N^2 copies of one vector, its largest possible value.
fn coincident_max(n: usize) -> Result<Cell, CliError> {
    let copies = vec![CVector::basis(n, 0); n * n];
    Ok(Cell {
        value: Some(J17(f_general(&copies)?)),
        source: Source::Identity,
        ..Cell::unavailable()
    })
}

pub fn build(n: usize, samples: usize, restarts: usize, seed: u64) -> Result<Table, CliError> {
    if n < 2 {
        return Err(CliError::input("dimension must be at least 2"));
    }
    let spaces = column_spaces();
    let average = spaces
        .iter()
        .enumerate()
        .map(|(col, &space)| average_cell(col, space, n, samples, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    if n == 7 {
        let extremum_row = |name, mode| -> Result<Row, CliError> {
            let mut cells = Vec::with_capacity(6);
            for (col, &space) in spaces.iter().enumerate() {
                cells.push(match (col, mode) {
                    (0, Mode::Maximize) => coincident_max(n)?,
                    // the smallest f over arbitrary sets is reached by a group orbit when a SIC exists
                    (0, Mode::Minimize) => search_cell(Space::Full, n, mode, restarts, seed)?,
                    _ => search_cell(space, n, mode, restarts, seed)?,
                });
            }
            Ok(Row { name, cells })
        };
        let min = extremum_row("min", Mode::Minimize)?;
        let max = extremum_row("max", Mode::Maximize)?;
        rows.push(min);
        rows.push(Row {
            name: "average",
            cells: average,
        });
        rows.push(max);
        for (row, published) in rows.iter_mut().zip(PUBLISHED_7) {
            for (cell, p) in row.cells.iter_mut().zip(published) {
                cell.published = Some(p);
            }
        }
    } else {
        rows.push(Row {
            name: "average",
            cells: average,
        });
    }

    Ok(Table {
        dim: n,
        seed,
        samples,
        restarts,
        columns: COLUMNS.to_vec(),
        rows,
    })
}
