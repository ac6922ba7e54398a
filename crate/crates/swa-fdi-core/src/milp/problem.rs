//! MILP problem container: bounded variables, sparse linear rows, binary
//! markers, SOS-1 groups, and an optional linear objective.

/// Row relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

/// Problem sense. Most detection problems are pure feasibility checks; the
/// distinguishability program minimizes the noise-discrepancy variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Feasibility,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub binary: bool,
}

#[derive(Debug, Clone)]
pub struct RowDef {
    /// Sparse coefficients as (variable index, value), one entry per variable.
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

/// A mixed-integer linear program with SOS-1 groups ("at most one member of
/// the group may be nonzero").
#[derive(Debug, Clone, Default)]
pub struct MilpProblem {
    pub vars: Vec<VarDef>,
    pub rows: Vec<RowDef>,
    pub sos1_groups: Vec<Vec<usize>>,
    /// Sparse minimization objective; `None` together with
    /// `Sense::Feasibility` means any feasible point is acceptable.
    pub objective: Option<Vec<(usize, f64)>>,
    pub sense: Sense,
}

impl Default for Sense {
    fn default() -> Self {
        Sense::Feasibility
    }
}

/// Violation found by the independent witness checker.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessViolation {
    Bound { var: usize, value: f64 },
    Row { row: usize, residual: f64 },
    Binary { var: usize, value: f64 },
    Sos1 { group: usize, nonzero: usize },
}

impl std::fmt::Display for WitnessViolation {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessViolation::Bound { var, value } => {
                write!(fmt, "variable {var} out of bounds at {value}")
            }
            WitnessViolation::Row { row, residual } => {
                write!(fmt, "row {row} violated by {residual}")
            }
            WitnessViolation::Binary { var, value } => {
                write!(fmt, "binary variable {var} is fractional at {value}")
            }
            WitnessViolation::Sos1 { group, nonzero } => {
                write!(fmt, "SOS-1 group {group} has {nonzero} nonzero members")
            }
        }
    }
}

pub const WITNESS_TOL: f64 = 1e-6;

impl MilpProblem {
    pub fn new(sense: Sense) -> Self {
        MilpProblem {
            vars: Vec::new(),
            rows: Vec::new(),
            sos1_groups: Vec::new(),
            objective: None,
            sense,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> usize {
        self.vars.push(VarDef {
            name: name.into(),
            lb,
            ub,
            binary: false,
        });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(VarDef {
            name: name.into(),
            lb: 0.0,
            ub: 1.0,
            binary: true,
        });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rel: Relation, rhs: f64) -> usize {
        self.rows.push(RowDef { coeffs, rel, rhs });
        self.rows.len() - 1
    }

    pub fn add_sos1(&mut self, members: Vec<usize>) {
        self.sos1_groups.push(members);
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, f64)>) {
        self.objective = Some(coeffs);
        self.sense = Sense::Minimize;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.binary).count()
    }

    /// Structural invariants required before solving: binaries have [0,1]
    /// bounds, SOS-1 members have finite bounds, indices are in range.
    pub fn validate(&self) -> Result<(), String> {
        for (j, v) in self.vars.iter().enumerate() {
            if v.lb > v.ub {
                return Err(format!("variable {j} ({}) has empty bounds", v.name));
            }
            if v.binary && (v.lb != 0.0 && v.lb != 1.0 || v.ub != 0.0 && v.ub != 1.0) {
                return Err(format!("binary variable {j} ({}) has bounds outside [0,1]", v.name));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in &row.coeffs {
                if j >= self.vars.len() {
                    return Err(format!("row {i} references unknown variable {j}"));
                }
                if !c.is_finite() || !row.rhs.is_finite() {
                    return Err(format!("row {i} has non-finite data"));
                }
            }
        }
        for (k, group) in self.sos1_groups.iter().enumerate() {
            for &j in group {
                if j >= self.vars.len() {
                    return Err(format!("SOS-1 group {k} references unknown variable {j}"));
                }
                let v = &self.vars[j];
                if !v.lb.is_finite() || !v.ub.is_finite() {
                    return Err(format!(
                        "SOS-1 group {k} member {} has infinite bounds",
                        v.name
                    ));
                }
            }
        }
        if let Some(obj) = &self.objective {
            for &(j, _) in obj {
                if j >= self.vars.len() {
                    return Err(format!("objective references unknown variable {j}"));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective
            .as_ref()
            .map(|obj| obj.iter().map(|&(j, c)| c * x[j]).sum())
            .unwrap_or(0.0)
    }

    /// Independent feasibility check of a full assignment. This is the
    /// soundness oracle for solver witnesses: plain re-evaluation of every
    /// bound, row, integrality marker and SOS-1 group.
    pub fn check_witness(&self, x: &[f64]) -> Result<(), WitnessViolation> {
        assert_eq!(x.len(), self.vars.len(), "witness length mismatch");
        for (j, v) in self.vars.iter().enumerate() {
            if x[j] < v.lb - WITNESS_TOL || x[j] > v.ub + WITNESS_TOL {
                return Err(WitnessViolation::Bound { var: j, value: x[j] });
            }
            if v.binary && x[j].min((x[j] - 1.0).abs()).abs() > WITNESS_TOL {
                return Err(WitnessViolation::Binary { var: j, value: x[j] });
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let act: f64 = row.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            let bad = match row.rel {
                Relation::Le => act - row.rhs,
                Relation::Eq => (act - row.rhs).abs(),
            };
            // scale tolerance mildly with row magnitude so that rows mixing
            // large coefficients do not trip on representation error
            let scale = 1.0 + row.coeffs.iter().map(|&(j, c)| (c * x[j]).abs()).sum::<f64>();
            if bad > WITNESS_TOL * scale {
                return Err(WitnessViolation::Row { row: i, residual: bad });
            }
        }
        for (k, group) in self.sos1_groups.iter().enumerate() {
            let nonzero = group.iter().filter(|&&j| x[j].abs() > WITNESS_TOL).count();
            if nonzero > 1 {
                return Err(WitnessViolation::Sos1 { group: k, nonzero });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_checker_flags_each_violation_kind() {
        let mut p = MilpProblem::new(Sense::Feasibility);
        let a = p.add_binary("a");
        let s = p.add_var("s", -5.0, 5.0);
        p.add_row(vec![(a, 1.0), (s, 1.0)], Relation::Le, 4.0);
        p.add_sos1(vec![a, s]);

        assert_eq!(p.check_witness(&[0.0, 2.0]), Ok(()));
        assert!(matches!(
            p.check_witness(&[0.0, 9.0]),
            Err(WitnessViolation::Bound { var: 1, .. })
        ));
        assert!(matches!(
            p.check_witness(&[0.5, 0.0]),
            Err(WitnessViolation::Binary { var: 0, .. })
        ));
        assert!(matches!(
            p.check_witness(&[1.0, 4.0]),
            Err(WitnessViolation::Row { row: 0, .. })
        ));
        assert!(matches!(
            p.check_witness(&[1.0, 2.0]),
            Err(WitnessViolation::Sos1 { group: 0, .. })
        ));
    }

    #[test]
    fn validate_rejects_unbounded_sos_member() {
        let mut p = MilpProblem::new(Sense::Feasibility);
        let a = p.add_binary("a");
        let s = p.add_var("s", f64::NEG_INFINITY, 5.0);
        p.add_sos1(vec![a, s]);
        assert!(p.validate().is_err());
    }
}
