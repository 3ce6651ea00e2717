//! Benchmark grid over instances, failure budgets and protection budgets,
//! reported as CSV and as an aligned table with one `t (s) | gap` pair per
//! formulation.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::time::Duration;

use rayon::prelude::*;

use crate::engine::{solve, EngineOptions, Formulation};
use crate::graph::{augment, Instance};

/// Column order of the report.
pub const COLUMNS: [Formulation; 3] = [Formulation::Bilevel, Formulation::Cutset, Formulation::Flow];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub formulation: Formulation,
    /// Solver status name, or `error` when the cell could not run.
    pub status: String,
    pub cost: Option<u64>,
    pub seconds: Option<f64>,
    pub gap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// `|V|-|T|-|A|`.
    pub instance: String,
    pub name: String,
    pub k: usize,
    pub k_protect: usize,
    pub cells: Vec<BenchCell>,
}

impl BenchRow {
    /// Costs of the cells that reached optimality agree.
    pub fn consistent(&self) -> bool {
        let mut costs = self.cells.iter().filter(|c| c.status == "optimal").map(|c| c.cost);
        match costs.next() {
            Some(first) => costs.all(|c| c == first),
            None => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub time_limit: Duration,
    pub strengthen: bool,
    /// Report wall-clock times; off gives byte-identical reports.
    pub times: bool,
    pub formulations: Vec<Formulation>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { time_limit: Duration::from_secs(2000), strengthen: true, times: true, formulations: COLUMNS.to_vec() }
    }
}

/// Runs every `(instance, k, k')` cell for every formulation. Cells run in
/// parallel; rows come back in input order, `k` then `k'` ascending.
pub fn bench(
    instances: &[(String, Instance)],
    ks: RangeInclusive<usize>,
    kps: RangeInclusive<usize>,
    opts: &BenchOptions,
) -> Vec<BenchRow> {
    let mut jobs = Vec::new();
    for (i, _) in instances.iter().enumerate() {
        for k in ks.clone() {
            for kp in kps.clone() {
                for &f in &COLUMNS {
                    jobs.push((i, k, kp, f));
                }
            }
        }
    }
    let cells: Vec<BenchCell> = jobs
        .par_iter()
        .map(|&(i, k, kp, f)| run_cell(&instances[i].1, k, kp, f, opts))
        .collect();
    let mut rows = Vec::new();
    for (chunk, job) in cells.chunks(COLUMNS.len()).zip(jobs.chunks(COLUMNS.len())) {
        let (i, k, kp, _) = job[0];
        rows.push(BenchRow {
            instance: instances[i].1.size_label(),
            name: instances[i].0.clone(),
            k,
            k_protect: kp,
            cells: chunk.to_vec(),
        });
    }
    rows
}

fn run_cell(inst: &Instance, k: usize, kp: usize, f: Formulation, opts: &BenchOptions) -> BenchCell {
    let skipped = |status: &str, error: Option<String>| BenchCell {
        formulation: f,
        status: status.into(),
        cost: None,
        seconds: None,
        gap: None,
        error,
    };
    if !opts.formulations.contains(&f) {
        return skipped("skipped", None);
    }
    let aug = match inst.with_budgets(k, kp).map(|i| augment(&i)) {
        Ok(Ok(aug)) => aug,
        Ok(Err(e)) | Err(e) => return skipped("error", Some(e.to_string())),
    };
    let engine = EngineOptions {
        time_limit: Some(opts.time_limit),
        strengthen: opts.strengthen,
        record_times: opts.times,
        ..Default::default()
    };
    let s = solve(&aug, f, &engine);
    BenchCell {
        formulation: f,
        status: s.status.name().into(),
        cost: s.cost,
        seconds: opts.times.then_some(s.seconds),
        gap: s.gap,
        error: None,
    }
}

fn time_text(c: &BenchCell) -> String {
    c.seconds.map_or("-".into(), |s| format!("{s:.2}"))
}

fn gap_text(c: &BenchCell) -> String {
    match c.status.as_str() {
        "optimal" => "0".into(),
        "feasible" => c.gap.map_or("-".into(), |g| format!("{g:.2}")),
        _ => "-".into(),
    }
}

/// CSV: the table's columns, then status and cost per formulation.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("instance,k,kp");
    for f in COLUMNS {
        write!(out, ",{f}_t,{f}_gap").unwrap();
    }
    for f in COLUMNS {
        write!(out, ",{f}_status,{f}_cost").unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{},{},{}", r.instance, r.k, r.k_protect).unwrap();
        for c in &r.cells {
            write!(out, ",{},{}", time_text(c), gap_text(c)).unwrap();
        }
        for c in &r.cells {
            write!(out, ",{},{}", c.status, c.cost.map_or("-".into(), |x| x.to_string())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Aligned text table; the instance label is printed once per instance and
/// `-` below it.
pub fn to_table(rows: &[BenchRow]) -> String {
    let mut lines: Vec<Vec<String>> = vec![
        ["Instance", "", ""].iter().map(|s| s.to_string()).chain(COLUMNS.iter().flat_map(|f| [title(*f).into(), String::new()])).collect(),
        ["|V|-|T|-|A|", "k", "k'"].iter().map(|s| s.to_string()).chain(COLUMNS.iter().flat_map(|_| ["t (s)".into(), "gap".into()])).collect(),
    ];
    let mut previous: Option<&str> = None;
    for r in rows {
        let label = if previous == Some(r.name.as_str()) { "-".to_string() } else { r.instance.clone() };
        previous = Some(&r.name);
        let mut line = vec![label, r.k.to_string(), r.k_protect.to_string()];
        for c in &r.cells {
            line.push(time_text(c));
            line.push(gap_text(c));
        }
        lines.push(line);
    }
    let widths: Vec<usize> = (0..lines[0].len()).map(|i| lines.iter().map(|l| l[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (n, l) in lines.iter().enumerate() {
        let cells: Vec<String> = l.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out += cells.join(" | ").trim_end_matches([' ', '|']);
        out.push('\n');
        if n == 1 {
            out += &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
            out.push('\n');
        }
    }
    out
}

fn title(f: Formulation) -> &'static str {
    match f {
        Formulation::Bilevel => "Bilevel",
        Formulation::Cutset => "Cut-set",
        Formulation::Flow => "Flow",
    }
}
