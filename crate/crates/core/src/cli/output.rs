//! Result rows in CSV or JSON-lines form.

use std::io::{self, Write};

use crate::experiments::AlgorithmRun;

pub const COLUMNS: [&str; 9] = [
    "scenario_id",
    "algorithm",
    "slot",
    "P",
    "R",
    "Q_next",
    "active_cap",
    "objective",
    "note",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Num(f64),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => fixed(*v),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Empty => "null".into(),
            Cell::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
            Cell::Num(v) if v.is_finite() => fixed(*v),
            Cell::Num(v) => serde_json::to_string(&fixed(*v)).expect("strings always serialize"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Six-decimal rendering; negative zero prints as zero.
pub fn fixed(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: [Cell; 9],
}

impl Row {
    pub fn slot(scenario: &str, algorithm: &str, slot: usize, p: f64, r: Cell, q_next: Cell, cap: Cell) -> Self {
        Self {
            cells: [
                scenario.into(),
                algorithm.into(),
                Cell::Text((slot + 1).to_string()),
                p.into(),
                r,
                q_next,
                cap,
                Cell::Empty,
                Cell::Empty,
            ],
        }
    }

    pub fn summary(scenario: &str, algorithm: &str, objective: f64) -> Self {
        Self {
            cells: [
                scenario.into(),
                algorithm.into(),
                "*".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                objective.into(),
                Cell::Empty,
            ],
        }
    }

    pub fn note(scenario: &str, algorithm: &str, value: Cell, note: String) -> Self {
        Self {
            cells: [
                scenario.into(),
                algorithm.into(),
                "*".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                value,
                note.into(),
            ],
        }
    }
}

/// Per-slot rows followed by the summary row(s) of one run.
pub fn run_rows(scenario: &str, run: &AlgorithmRun) -> Vec<Row> {
    let name = run.algorithm.name();
    let s = &run.schedule;
    let mut rows: Vec<Row> = (0..s.power.len())
        .map(|n| {
            let cap = run.profile.slots[n].active_for(run.mode);
            Row::slot(
                scenario,
                name,
                n,
                s.power[n],
                s.rate[n].into(),
                s.queue[n + 1].into(),
                cap.to_string().into(),
            )
        })
        .collect();
    rows.push(Row::summary(scenario, name, s.objective));
    if let Some(clamped) = run.clamped_objective {
        rows.push(Row::note(
            scenario,
            "pa-clamped",
            clamped.into(),
            "diagnostic: rates clipped to queue".into(),
        ));
    }
    rows
}

/// Serializes rows; the CSV header is always written, even with no rows.
pub struct RowWriter<'a> {
    format: Format,
    csv: Option<csv::Writer<&'a mut dyn Write>>,
    raw: Option<&'a mut dyn Write>,
}

impl<'a> RowWriter<'a> {
    pub fn new(format: Format, out: &'a mut dyn Write) -> io::Result<Self> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(COLUMNS)?;
                Ok(Self {
                    format,
                    csv: Some(w),
                    raw: None,
                })
            }
            Format::Jsonl => Ok(Self {
                format,
                csv: None,
                raw: Some(out),
            }),
        }
    }

    pub fn write(&mut self, row: &Row) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                let record: Vec<String> = row.cells.iter().map(Cell::text).collect();
                self.csv.as_mut().expect("csv writer").write_record(&record)?;
            }
            Format::Jsonl => {
                let fields: Vec<String> = COLUMNS
                    .iter()
                    .zip(&row.cells)
                    .map(|(k, c)| format!("\"{k}\":{}", c.json()))
                    .collect();
                writeln!(self.raw.as_mut().expect("jsonl writer"), "{{{}}}", fields.join(","))?;
            }
        }
        Ok(())
    }

    pub fn write_all(&mut self, rows: &[Row]) -> io::Result<()> {
        rows.iter().try_for_each(|r| self.write(r))
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        if let Some(w) = self.raw.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}
