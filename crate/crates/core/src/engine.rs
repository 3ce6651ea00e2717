//! Constraint-and-column generation driver shared by the three formulations.
//!
//! Each iteration solves the master MILP from scratch, hands its design to
//! the formulation's oracle and adds whatever the oracle returns. The loop
//! stops when the oracle certifies the master's design, which is then optimal
//! because the master is a relaxation.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{debug, info};
use milp::{solve_mip, SolverOptions, Status};

use crate::formulations::{
    binomial, build_bilevel_master, build_cutset_master, build_flow_master, eval_ms, max_loss_subset, CutRows,
    CutSet, CutsetOptions, Design, ExtremePoint, FailureScenario, SubsetRows,
};
use crate::graph::{flow_value, max_flow, ArcMask, AugmentedInstance};
use crate::separation::{
    separate_bilevel, separate_cutset, separate_scenario, strengthen, ScenarioEngine, SeparationError,
    SeparationOptions, Strengthening,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    Cutset,
    Flow,
    Bilevel,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Cutset, Formulation::Flow, Formulation::Bilevel];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cutset => "cutset",
            Self::Flow => "flow",
            Self::Bilevel => "bilevel",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown formulation `{s}` (expected cutset, flow or bilevel)"))
    }
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub time_limit: Option<Duration>,
    /// Strengthen bilevel points before adding them.
    pub strengthen: bool,
    /// Recorded in the log; every step of the solver is deterministic.
    pub seed: u64,
    pub scenario_engine: ScenarioEngine,
    /// Cuts needing more deletion rows than this get them lazily.
    pub subset_row_cap: u64,
    pub weighted_protection: bool,
    /// Write wall-clock seconds into the log; off gives byte-stable logs.
    pub record_times: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            strengthen: true,
            seed: 0,
            scenario_engine: ScenarioEngine::Auto,
            subset_row_cap: 1000,
            weighted_protection: true,
            record_times: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Time limit reached with a survivable design in hand.
    Feasible,
    /// Time limit reached before any survivable design was known.
    TimeLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Feasible => "feasible",
            Self::TimeLimit => "timelimit",
            Self::Infeasible => "infeasible",
        }
    }
}

/// One line of the audit trail.
#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    pub iteration: usize,
    pub master_objective: f64,
    /// Oracle value at the master's design; `None` when the round only added
    /// lazy deletion rows.
    pub separation: Option<u64>,
    pub added: usize,
    /// Rows, scenarios or points in the master after this round.
    pub generated: usize,
    /// Branch-and-bound nodes of the master solve.
    pub nodes: u64,
    pub seconds: Option<f64>,
}

impl fmt::Display for Iteration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iter={} master={}", self.iteration, fmt_num(self.master_objective))?;
        match self.separation {
            Some(v) => write!(f, " separation={v}")?,
            None => write!(f, " separation=-")?,
        }
        write!(f, " added={} generated={} nodes={} seconds=", self.added, self.generated, self.nodes)?;
        match self.seconds {
            Some(s) => write!(f, "{s:.3}"),
            None => write!(f, "-"),
        }
    }
}

fn fmt_num(x: f64) -> String {
    if (x - x.round()).abs() < 1e-6 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.6}")
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub formulation: Formulation,
    pub status: SolveStatus,
    /// Best survivable design found (optimal when `status` is optimal).
    pub design: Option<Design>,
    pub cost: Option<u64>,
    pub lower_bound: f64,
    pub gap: Option<f64>,
    pub iterations: usize,
    /// Header line, one line per iteration and a closing summary.
    pub log: Vec<String>,
    pub seconds: f64,
}

impl Solution {
    pub fn log_text(&self) -> String {
        self.log.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Generated objects a formulation starts from.
#[derive(Debug, Clone, PartialEq)]
pub enum StartRows {
    Cuts(Vec<CutSet>),
    Scenarios(Vec<FailureScenario>),
    Points(Vec<ExtremePoint>),
}

impl StartRows {
    pub fn len(&self) -> usize {
        match self {
            Self::Cuts(v) => v.len(),
            Self::Scenarios(v) => v.len(),
            Self::Points(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rule(&self) -> &'static str {
        match self {
            Self::Cuts(_) => "cut-all-but-root",
            Self::Scenarios(_) => "lowest-index-scenario",
            Self::Points(_) => "empty",
        }
    }
}

/// Cut-set: the cut with every vertex but the root on the sink side.
/// Flow: the lowest-indexed `k` initial arcs. Bilevel: nothing.
pub fn initial_rows(aug: &AugmentedInstance, formulation: Formulation) -> StartRows {
    match formulation {
        Formulation::Cutset => StartRows::Cuts(CutSet::all_but_root(aug).into_iter().collect()),
        Formulation::Flow => StartRows::Scenarios(
            FailureScenario::new(aug, aug.initial_arcs().take(aug.k()).collect()).into_iter().collect(),
        ),
        Formulation::Bilevel => StartRows::Points(Vec::new()),
    }
}

/// Every arc selected and the `k'` most capacitated ones protected.
pub fn fallback_design(aug: &AugmentedInstance) -> Design {
    let mut arcs: Vec<_> = aug.initial_arcs().collect();
    arcs.sort_by_key(|&a| (std::cmp::Reverse(aug.arc(a).capacity), a));
    arcs.truncate(aug.k_protect());
    Design::from_arcs(aug, aug.initial_arcs(), arcs).expect("k' arcs protected")
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
    record: bool,
}

impl Clock {
    fn remaining(&self) -> Option<Duration> {
        self.limit.map(|l| l.saturating_sub(self.start.elapsed()))
    }

    fn expired(&self) -> bool {
        self.remaining().is_some_and(|r| r.is_zero())
    }

    fn stamp(&self) -> Option<f64> {
        self.record.then(|| self.start.elapsed().as_secs_f64())
    }
}

enum Generated {
    Cuts(Vec<CutRows>),
    Scenarios(Vec<FailureScenario>),
    Points(Vec<ExtremePoint>),
}

impl Generated {
    fn len(&self) -> usize {
        match self {
            Self::Cuts(v) => v.len(),
            Self::Scenarios(v) => v.len(),
            Self::Points(v) => v.len(),
        }
    }
}

struct Master {
    model: milp::Model,
    vars: crate::formulations::DesignVars,
    /// Incumbent for the model built from a survivable design.
    incumbent: Option<Vec<f64>>,
    max_loss: Vec<milp::VarId>,
}

fn build_master(aug: &AugmentedInstance, gen: &Generated, known: Option<&Design>) -> Master {
    match gen {
        Generated::Cuts(cuts) => {
            let opts = CutsetOptions { row_cap: u64::MAX };
            let m = build_cutset_master(aug, cuts, &opts).expect("row cap checked by the engine");
            let incumbent = known.map(|d| {
                let mut x = vec![0.0; m.model.num_vars()];
                m.vars.write(d, &mut x);
                for (c, &ms) in cuts.iter().zip(&m.max_loss) {
                    x[ms.0] = eval_ms(aug, &c.cut, d) as f64;
                }
                x
            });
            Master { model: m.model, vars: m.vars, incumbent, max_loss: m.max_loss }
        }
        Generated::Scenarios(scenarios) => {
            let m = build_flow_master(aug, scenarios).expect("scenarios deduplicated by the engine");
            let incumbent = known.map(|d| {
                let mut x = vec![0.0; m.model.num_vars()];
                m.vars.write(d, &mut x);
                for (s, vars) in scenarios.iter().zip(&m.flow) {
                    let f = max_flow(aug, &d.mask(aug, s.arcs()), aug.root(), aug.sink());
                    for (v, &amount) in vars.iter().zip(&f.arc_flow) {
                        x[v.0] = amount as f64;
                    }
                }
                x
            });
            Master { model: m.model, vars: m.vars, incumbent, max_loss: Vec::new() }
        }
        Generated::Points(points) => {
            let m = build_bilevel_master(aug, points).expect("points come from the attacker model");
            let incumbent = known.map(|d| {
                let mut x = vec![0.0; m.model.num_vars()];
                m.vars.write(d, &mut x);
                x
            });
            Master { model: m.model, vars: m.vars, incumbent, max_loss: Vec::new() }
        }
    }
}

/// Solves the instance with the chosen formulation.
pub fn solve(aug: &AugmentedInstance, formulation: Formulation, opts: &EngineOptions) -> Solution {
    let clock = Clock { start: Instant::now(), limit: opts.time_limit, record: opts.record_times };
    let run = Run { aug, formulation, opts, clock, log: Vec::new(), iterations: 0 };
    run.go()
}

struct Run<'a> {
    aug: &'a AugmentedInstance,
    formulation: Formulation,
    opts: &'a EngineOptions,
    clock: Clock,
    log: Vec<String>,
    iterations: usize,
}

impl Run<'_> {
    fn separation_options(&self) -> SeparationOptions {
        SeparationOptions {
            engine: self.opts.scenario_engine,
            time_limit: self.clock.remaining(),
            weighted_protection: self.opts.weighted_protection,
        }
    }

    fn finish(mut self, status: SolveStatus, design: Option<Design>, lower_bound: f64) -> Solution {
        let cost = design.as_ref().map(|d| d.cost(self.aug));
        let gap = match (status, cost) {
            (SolveStatus::Optimal, _) => Some(0.0),
            (_, Some(c)) => Some(milp::relative_gap(c as f64, lower_bound)),
            _ => None,
        };
        let mut line = format!(
            "done status={} cost={} bound={} gap={} iterations={}",
            status.name(),
            cost.map_or("-".into(), |c| c.to_string()),
            fmt_num(lower_bound),
            gap.map_or("-".into(), |g| format!("{g:.6}")),
            self.iterations
        );
        if let Some(d) = &design {
            let p = d.protected_arcs();
            line += &format!(" selected={} protected={}", d.selected_initial(self.aug).len(), p.len());
        }
        info!("{} {line}", self.formulation);
        self.log.push(line);
        Solution {
            formulation: self.formulation,
            status,
            design,
            cost,
            lower_bound,
            gap,
            iterations: self.iterations,
            log: self.log,
            seconds: self.clock.start.elapsed().as_secs_f64(),
        }
    }

    fn go(mut self) -> Solution {
        let aug = self.aug;
        let start = initial_rows(aug, self.formulation);
        self.log.push(format!(
            "start formulation={} instance={} k={} kp={} seed={} initial={} rows={}",
            self.formulation,
            aug.instance().size_label(),
            aug.k(),
            aug.k_protect(),
            self.opts.seed,
            start.rule(),
            start.len()
        ));
        if aug.demand() == 0 {
            let empty = Design::from_arcs(aug, [], []).expect("empty design");
            return self.finish(SolveStatus::Optimal, Some(empty), 0.0);
        }
        if flow_value(aug, &ArcMask::full(aug)) < aug.demand() {
            return self.finish(SolveStatus::Infeasible, None, f64::INFINITY);
        }

        // upper bound to fall back on at a timeout
        let fallback = fallback_design(aug);
        let known = match separate_scenario(aug, &fallback, &self.separation_options()) {
            Ok(s) if s.violated.is_none() => Some(fallback),
            _ => None,
        };

        let mut gen = match start {
            StartRows::Cuts(cuts) => Generated::Cuts(cuts.into_iter().map(|c| self.cut_rows(c)).collect()),
            StartRows::Scenarios(s) => Generated::Scenarios(s),
            StartRows::Points(p) => Generated::Points(p),
        };
        let mut lower_bound = 0.0f64;
        loop {
            if self.clock.expired() {
                return self.timeout(known, lower_bound);
            }
            let master = build_master(aug, &gen, known.as_ref());
            let mut solver = SolverOptions::default();
            solver.time_limit = self.clock.remaining();
            solver.initial = master.incumbent.clone();
            let r = solve_mip(&master.model, &solver);
            debug!("{} master: {:?} obj={:?} nodes={}", self.formulation, r.status, r.objective, r.nodes);
            match r.status {
                Status::Optimal => {}
                Status::Infeasible => return self.finish(SolveStatus::Infeasible, None, f64::INFINITY),
                Status::Feasible | Status::TimeLimit => {
                    if let Some(b) = r.bound {
                        lower_bound = lower_bound.max(b);
                    }
                    return self.timeout(known, lower_bound);
                }
                Status::Unbounded => unreachable!("master objectives are bounded below by zero"),
            }
            let objective = r.objective.expect("optimal");
            lower_bound = lower_bound.max(objective);
            let design = master.vars.design(aug, &r.values).expect("master respects the protection budget");
            self.iterations += 1;

            // lazily added deletion rows come before the oracle
            if let Generated::Cuts(cuts) = &mut gen {
                let added = add_missing_subsets(aug, cuts, &master.max_loss, &r.values, &design);
                if added > 0 {
                    self.record(objective, r.nodes, None, added, gen.len());
                    continue;
                }
            }

            let sep = self.separation_options();
            let outcome = match &mut gen {
                Generated::Cuts(cuts) => separate_cutset(aug, &design, &sep).map(|s| {
                    let added = s.violated.map(|c| {
                        assert!(cuts.iter().all(|r| r.cut != c), "oracle returned a cut already in the master");
                        let rows = self.cut_rows(c);
                        cuts.push(rows);
                    });
                    (s.value, added.is_some())
                }),
                Generated::Scenarios(scenarios) => separate_scenario(aug, &design, &sep).map(|s| {
                    let added = s.violated.map(|f| {
                        assert!(!scenarios.contains(&f), "oracle returned a scenario already in the master");
                        scenarios.push(f);
                    });
                    (s.value, added.is_some())
                }),
                Generated::Points(points) => match separate_bilevel(aug, &design, &sep) {
                    Ok(s) => {
                        let value = s.value;
                        match s.violated {
                            None => Ok((value, false)),
                            Some(point) => {
                                let point = if self.opts.strengthen {
                                    match strengthen(aug, &design, point, &sep) {
                                        Ok((p, how)) => {
                                            debug!("strengthening: {how:?}");
                                            if how == Strengthening::TimedOut {
                                                points.push(p);
                                                return self.timeout(known, lower_bound);
                                            }
                                            p
                                        }
                                        Err(e) => panic!("strengthening failed: {e}"),
                                    }
                                } else {
                                    point
                                };
                                assert!(!points.contains(&point), "oracle returned a point already in the master");
                                points.push(point);
                                Ok((value, true))
                            }
                        }
                    }
                    Err(e) => Err(e),
                },
            };
            match outcome {
                Ok((value, added)) => {
                    self.record(objective, r.nodes, Some(value), added as usize, gen.len());
                    if !added {
                        return self.finish(SolveStatus::Optimal, Some(design), lower_bound);
                    }
                }
                Err(SeparationError::Timeout) => return self.timeout(known, lower_bound),
                Err(e) => panic!("{} separation failed: {e}", self.formulation),
            }
        }
    }

    fn record(&mut self, master: f64, nodes: u64, separation: Option<u64>, added: usize, generated: usize) {
        let it = Iteration {
            iteration: self.iterations,
            master_objective: master,
            separation,
            added,
            generated,
            nodes,
            seconds: self.clock.stamp(),
        };
        info!("{} {it}", self.formulation);
        self.log.push(it.to_string());
    }

    fn timeout(self, known: Option<Design>, lower_bound: f64) -> Solution {
        let status = if known.is_some() { SolveStatus::Feasible } else { SolveStatus::TimeLimit };
        self.finish(status, known, lower_bound)
    }

    fn cut_rows(&self, cut: CutSet) -> CutRows {
        let n = cut.initial_arcs(self.aug).len();
        if binomial(n, self.aug.k().min(n)) <= self.opts.subset_row_cap as u128 {
            CutRows::all(cut)
        } else {
            CutRows { cut, subsets: SubsetRows::Listed(Vec::new()) }
        }
    }
}

/// For cuts whose deletion rows are generated lazily, adds the worst
/// deletion subset wherever `M_S` underestimates the true loss.
fn add_missing_subsets(
    aug: &AugmentedInstance,
    cuts: &mut [CutRows],
    max_loss: &[milp::VarId],
    values: &[f64],
    design: &Design,
) -> usize {
    let mut added = 0;
    for (rows, &ms) in cuts.iter_mut().zip(max_loss) {
        let SubsetRows::Listed(list) = &mut rows.subsets else { continue };
        if values[ms.0] + 0.5 < eval_ms(aug, &rows.cut, design) as f64 {
            let subset = max_loss_subset(aug, &rows.cut, design);
            debug_assert!(!list.contains(&subset));
            list.push(subset);
            added += 1;
        }
    }
    added
}
