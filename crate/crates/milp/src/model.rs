use std::fmt::{self, Write as _};

use thiserror::Error;

/// Index of a variable inside a [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Index of a constraint inside a [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violates this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.cmp {
            Cmp::Le => (lhs - self.rhs).max(0.0),
            Cmp::Ge => (self.rhs - lhs).max(0.0),
            Cmp::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("variable `{name}` has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("`{row}` references undeclared variable #{var}")]
    UnknownVariable { row: String, var: usize },
}

/// A mixed-integer linear program.
#[derive(Debug, Clone)]
pub struct Model {
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    sense: Sense,
}

impl Default for Model {
    fn default() -> Self {
        Self::new(Sense::Minimize)
    }
}

impl Model {
    pub fn new(sense: Sense) -> Self {
        Self { vars: Vec::new(), rows: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, integer: bool) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper, integer });
        VarId(self.vars.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_var(name, lower, upper, false)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, 0.0, 1.0, true)
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        cmp: Cmp,
        rhs: f64,
    ) -> RowId {
        let coeffs = merge_terms(coeffs);
        self.rows.push(Constraint { name: name.into(), coeffs, cmp, rhs });
        RowId(self.rows.len() - 1)
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: impl IntoIterator<Item = (VarId, f64)>) {
        self.sense = sense;
        self.objective = merge_terms(coeffs);
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        let v = &mut self.vars[var.0];
        v.lower = lower;
        v.upper = upper;
    }

    /// Forces a variable to a single value.
    pub fn fix(&mut self, var: VarId, value: f64) {
        self.set_bounds(var, value, value);
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integer(&self) -> usize {
        self.vars.iter().filter(|v| v.integer).count()
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for v in &self.vars {
            if v.lower.is_nan() || v.upper.is_nan() {
                return Err(ModelError::NonFinite(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(ModelError::InvertedBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let n = self.vars.len();
        let check = |label: &str, terms: &[(VarId, f64)]| -> Result<(), ModelError> {
            for &(v, a) in terms {
                if v.0 >= n {
                    return Err(ModelError::UnknownVariable { row: label.to_string(), var: v.0 });
                }
                if !a.is_finite() {
                    return Err(ModelError::NonFinite(label.to_string()));
                }
            }
            Ok(())
        };
        check("objective", &self.objective)?;
        for r in &self.rows {
            check(&r.name, &r.coeffs)?;
            if !r.rhs.is_finite() {
                return Err(ModelError::NonFinite(r.name.clone()));
            }
        }
        Ok(())
    }

    /// Largest bound, row or integrality violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
            if v.integer {
                worst = worst.max((x - x.round()).abs());
            }
        }
        for r in &self.rows {
            worst = worst.max(r.violation(values));
        }
        worst
    }

    /// Plain-text dump in an LP-file-like layout. Meant for debugging only.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        let name = |v: VarId| self.vars[v.0].name.as_str();
        let terms = |coeffs: &[(VarId, f64)]| {
            let mut s = String::new();
            for (i, &(v, a)) in coeffs.iter().enumerate() {
                let sign = if a < 0.0 { "-" } else if i > 0 { "+" } else { "" };
                let _ = write!(s, "{}{} {} ", sign, fmt_num(a.abs()), name(v));
            }
            if s.is_empty() {
                s.push_str("0 ");
            }
            s
        };
        let _ = writeln!(
            out,
            "{}",
            match self.sense {
                Sense::Minimize => "Minimize",
                Sense::Maximize => "Maximize",
            }
        );
        let _ = writeln!(out, " obj: {}", terms(&self.objective).trim_end());
        let _ = writeln!(out, "Subject To");
        for r in &self.rows {
            let op = match r.cmp {
                Cmp::Le => "<=",
                Cmp::Eq => "=",
                Cmp::Ge => ">=",
            };
            let _ = writeln!(out, " {}: {}{} {}", r.name, terms(&r.coeffs), op, fmt_num(r.rhs));
        }
        let _ = writeln!(out, "Bounds");
        for v in &self.vars {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
        }
        let ints: Vec<&str> = self.vars.iter().filter(|v| v.integer).map(|v| v.name.as_str()).collect();
        if !ints.is_empty() {
            let _ = writeln!(out, "General\n {}", ints.join(" "));
        }
        let _ = writeln!(out, "End");
        out
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lp_string())
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Sums duplicate variable entries and drops zeros, keeping first-seen order.
fn merge_terms(coeffs: impl IntoIterator<Item = (VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut out: Vec<(VarId, f64)> = Vec::new();
    for (v, a) in coeffs {
        match out.iter_mut().find(|(w, _)| *w == v) {
            Some(t) => t.1 += a,
            None => out.push((v, a)),
        }
    }
    out.retain(|&(_, a)| a != 0.0);
    out
}
