//! Command execution and the CSV / JSON record formats.
//!
//! Every command produces a [`Table`]. CSV prints floats with 9 significant
//! digits; JSON carries the same rounded values, so both emissions of one
//! run agree digit for digit.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::dynamics::{
    death_point, negativity_curve, regime_boundaries, scan, sweep_surface, Outcome, StageSchedule,
};
use crate::error::{Error, Result};
use crate::luo::LocalUnitary;
use crate::qla::ComplexMatrix;
use crate::states::{Family, StateFamily};
use crate::DecayModel;

pub const SCHEMA_VERSION: u32 = 1;

/// `v` with 9 significant digits, in the style of C's `%.9g`.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `v` rounded to what [`fmt_sig`] prints.
pub fn round_sig(v: f64) -> f64 {
    fmt_sig(v).parse().unwrap_or(v)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(round_sig(*v)),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing key/value pairs: one extra CSV line, a `"summary"` object in JSON.
    pub footer: Vec<(&'static str, Cell)>,
    /// JSON-only extras.
    pub extra: Vec<(&'static str, Value)>,
}

impl Table {
    fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
            footer: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        if !self.footer.is_empty() {
            let flat = self
                .footer
                .iter()
                .flat_map(|(k, v)| [k.to_string(), v.csv()]);
            w.write_record(flat).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 output")
    }

    pub fn to_json(&self, command: Command, config: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("schema_version".into(), json!(SCHEMA_VERSION));
        top.insert("command".into(), json!(command.name()));
        // Worker count does not affect results; leaving it out keeps output byte-identical across pools.
        let mut echoed = serde_json::to_value(config).expect("config serializes");
        echoed
            .as_object_mut()
            .expect("config is an object")
            .remove("workers");
        top.insert("config".into(), echoed);
        top.insert("rows".into(), Value::Array(rows));
        if !self.footer.is_empty() {
            let summary: Map<String, Value> = self
                .footer
                .iter()
                .map(|(k, v)| (k.to_string(), v.json()))
                .collect();
            top.insert("summary".into(), Value::Object(summary));
        }
        for (k, v) in &self.extra {
            top.insert(k.to_string(), v.clone());
        }
        let mut out = serde_json::to_string_pretty(&Value::Object(top)).expect("json serializes");
        out.push('\n');
        out
    }

    pub fn render(&self, command: Command, config: &RunConfig) -> String {
        match config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(command, config),
        }
    }
}

/// Row-major `[re, im]` pairs in the lexicographic product basis.
pub fn matrix_json(m: &ComplexMatrix) -> Value {
    json!(m.to_pairs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Boundary,
    Scan,
    Table1,
    Surface,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Boundary => "boundary",
            Command::Scan => "scan",
            Command::Table1 => "table1",
            Command::Surface => "surface",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evolve" => Ok(Command::Evolve),
            "boundary" => Ok(Command::Boundary),
            "scan" => Ok(Command::Scan),
            "table1" => Ok(Command::Table1),
            "surface" => Ok(Command::Surface),
            other => Err(Error::domain(format!("unknown command `{other}`"))),
        }
    }
}

pub fn execute(command: Command, config: &RunConfig) -> Result<Table> {
    config.validate()?;
    match command {
        Command::Evolve => evolve_table(config),
        Command::Boundary => boundary_table(config),
        Command::Scan => scan_table(config),
        Command::Table1 => table1(config),
        Command::Surface => surface_table(config),
    }
}

fn evolve_table(config: &RunConfig) -> Result<Table> {
    let s = config.schedule()?;
    let steps = (1.0 / config.pprime_step).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| (k as f64 * config.pprime_step).min(1.0))
        .collect();
    let points = negativity_curve(&s, &grid)?;
    let with_realignment = points.iter().any(|p| p.realigned_negativity.is_some());
    let mut headers = vec!["p_prime", "negativity"];
    if with_realignment {
        headers.push("realigned_negativity");
    }
    let mut t = Table::new(headers);
    for p in points {
        let mut row = vec![Cell::Num(p.p_prime), Cell::Num(p.negativity)];
        if with_realignment {
            row.push(Cell::opt(p.realigned_negativity));
        }
        t.rows.push(row);
    }
    Ok(t)
}

fn boundary_table(config: &RunConfig) -> Result<Table> {
    let s = config.schedule()?;
    let d = death_point(&s, &config.tolerances())?;
    let mut t = Table::new(vec![
        "p_n",
        "death",
        "iterations",
        "bracket_lo",
        "bracket_hi",
    ]);
    t.rows.push(vec![
        Cell::Num(s.p_n),
        Cell::opt(d.p_prime),
        Cell::Num(d.iterations as f64),
        Cell::opt(d.bracket.map(|b| b.0)),
        Cell::opt(d.bracket.map(|b| b.1)),
    ]);
    Ok(t)
}

fn scan_table(config: &RunConfig) -> Result<Table> {
    let template = config.schedule()?;
    let tol = config.tolerances();
    let verdicts = scan(&template, config.pn_step, &tol)?;
    let mut t = Table::new(vec![
        "p_n",
        "verdict",
        "baseline_death",
        "manipulated_death",
    ]);
    for v in &verdicts {
        t.rows.push(vec![
            Cell::Num(v.p_n),
            Cell::Text(v.outcome.letter().to_string()),
            Cell::opt(v.baseline_death),
            Cell::opt(v.manipulated_death),
        ]);
    }
    if !verdicts.is_empty() {
        let b = regime_boundaries(&template, config.pn_step, &tol)?;
        t.footer = vec![
            ("avoid_end", Cell::opt(b.avoid_end)),
            ("delay_end", Cell::opt(b.delay_end)),
        ];
    }
    Ok(t)
}

/// Summary-table wording for the set of outcomes seen along a scan.
/// `Unchanged` samples (a flip that leaves the state invariant) do not count.
pub fn pattern_label(outcomes: &[Outcome]) -> &'static str {
    let has = |o: Outcome| outcomes.contains(&o);
    match (
        has(Outcome::Avoid),
        has(Outcome::Delay),
        has(Outcome::Hasten),
    ) {
        (true, true, true) => "A, D, and H",
        (false, false, true) => "only H",
        (true, true, false) => "only A and D",
        (true, false, false) => "only A",
        (false, true, false) => "only D",
        (true, false, true) => "A and H",
        (false, true, true) => "D and H",
        (false, false, false) => "none",
    }
}

/// The nine qubit-qutrit flips against the two qubit-qutrit families at
/// their reference `x`, each cell derived from a `p_n` scan.
fn table1(config: &RunConfig) -> Result<Table> {
    let tol = config.tolerances();
    let families = [Family::StateI, Family::StateII];
    let mut t = Table::new(vec!["operation", "state_i", "state_ii"]);
    for op in LocalUnitary::qubit_qutrit_catalog() {
        let mut row = vec![Cell::Text(op.to_string())];
        for family in families {
            let s = StageSchedule::new(
                StateFamily::new(family, family.reference_x())?,
                DecayModel::default_for(family.dims()),
                op,
                0.0,
            )?;
            let outcomes: Vec<Outcome> = scan(&s, config.pn_step, &tol)?
                .iter()
                .map(|v| v.outcome)
                .collect();
            row.push(Cell::Text(pattern_label(&outcomes).to_string()));
        }
        t.rows.push(row);
    }
    Ok(t)
}

fn surface_table(config: &RunConfig) -> Result<Table> {
    let s = config.schedule()?;
    let surf = sweep_surface(&s, config.grid, &config.tolerances())?;
    let mut t = Table::new(vec!["p", "p_prime", "negativity"]);
    for r in &surf.rows {
        t.rows.push(vec![
            Cell::Num(r.p),
            Cell::Num(r.p_prime),
            Cell::Num(r.negativity),
        ]);
    }
    let locus: Vec<Value> = surf
        .locus
        .iter()
        .map(|&(p, d)| json!({"p": round_sig(p), "death": d.map(round_sig)}))
        .collect();
    t.extra.push(("locus", Value::Array(locus)));
    Ok(t)
}
