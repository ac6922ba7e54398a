//! Switched affine models, fault models, and admissible sets.
//!
//! A model is a set of affine modes `(A, B, C, D, f, g)` together with a
//! polytopic state set, box noise sets, and a box input set. Fault models are
//! just other models with the same interface dimensions. The JSON wire format
//! is documented on [`SwaModel`].

use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};

/// One affine mode of a switched model. `B`, `D`, `f` and `g` may be omitted
/// in model files and default to zeros of the right shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    #[serde(rename = "A")]
    pub a: Matrix,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Matrix>,
    #[serde(rename = "C")]
    pub c: Matrix,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
}

impl Mode {
    pub fn b_mat(&self, n: usize, n_u: usize) -> Matrix {
        self.b.clone().unwrap_or_else(|| Matrix::zeros(n, n_u))
    }

    pub fn d_mat(&self, n_y: usize, n_u: usize) -> Matrix {
        self.d.clone().unwrap_or_else(|| Matrix::zeros(n_y, n_u))
    }

    pub fn f_vec(&self, n: usize) -> Vec<f64> {
        self.f.clone().unwrap_or_else(|| vec![0.0; n])
    }

    pub fn g_vec(&self, n_y: usize) -> Vec<f64> {
        self.g.clone().unwrap_or_else(|| vec![0.0; n_y])
    }
}

/// Noise bound: a scalar infinity-norm radius or a per-dimension vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseBound {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl NoiseBound {
    pub fn as_vec(&self, dim: usize) -> Vec<f64> {
        match self {
            NoiseBound::Scalar(v) => vec![*v; dim],
            NoiseBound::Vector(v) => v.clone(),
        }
    }

    pub fn max_entry(&self) -> f64 {
        match self {
            NoiseBound::Scalar(v) => *v,
            NoiseBound::Vector(v) => v.iter().fold(0.0, |a: f64, x| a.max(*x)),
        }
    }

    fn check(&self, dim: usize, what: &str, issues: &mut Vec<ModelIssue>) {
        match self {
            NoiseBound::Scalar(v) => {
                if !v.is_finite() || *v < 0.0 {
                    issues.push(ModelIssue::NegativeBound(what.into()));
                }
            }
            NoiseBound::Vector(v) => {
                if v.len() != dim {
                    issues.push(ModelIssue::DimMismatch(format!(
                        "{what} has length {} but expected {dim}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    issues.push(ModelIssue::NegativeBound(what.into()));
                }
            }
        }
    }
}

/// Admissible sets: polytopic states `{x | P x <= p}`, box noise sets, and a
/// box input set. `u_bound: None` means the model has no inputs at all,
/// which is different from inputs pinned at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSets {
    #[serde(rename = "P")]
    pub p_mat: Matrix,
    #[serde(rename = "p")]
    pub p_vec: Vec<f64>,
    pub eps_eta: NoiseBound,
    pub eps_nu: NoiseBound,
    #[serde(rename = "U")]
    pub u_bound: Option<f64>,
}

/// A switched affine model.
///
/// JSON format:
/// ```json
/// {"n": 3, "n_u": 1, "n_y": 1,
///  "modes": [{"A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]], "f": [..], "g": [..]}],
///  "sets": {"P": [[..]], "p": [..], "eps_eta": 0.1, "eps_nu": [..], "U": 1000.0}}
/// ```
/// `B`, `D`, `f`, `g` are optional (zero default); `eps_*` accept a scalar or
/// a vector; `U: null` marks a model without inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaModel {
    pub n: usize,
    pub n_u: usize,
    pub n_y: usize,
    pub modes: Vec<Mode>,
    pub sets: AdmissibleSets,
}

/// A structural problem found by [`SwaModel::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum ModelIssue {
    NoModes,
    DimMismatch(String),
    NonFinite(String),
    UnboundedPolytope { state: usize },
    EmptyPolytope,
    NegativeBound(String),
}

impl std::fmt::Display for ModelIssue {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelIssue::NoModes => write!(fmt, "model has no modes"),
            ModelIssue::DimMismatch(s) => write!(fmt, "dimension mismatch: {s}"),
            ModelIssue::NonFinite(s) => write!(fmt, "non-finite entries in {s}"),
            ModelIssue::UnboundedPolytope { state } => {
                write!(fmt, "state polytope is unbounded in coordinate {state}")
            }
            ModelIssue::EmptyPolytope => write!(fmt, "state polytope is empty"),
            ModelIssue::NegativeBound(s) => write!(fmt, "negative or non-finite bound: {s}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("failed to parse model: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Invalid(String),
}

impl SwaModel {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.n_u, self.n_y)
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn has_inputs(&self) -> bool {
        self.sets.u_bound.is_some()
    }

    pub fn eps_eta(&self) -> Vec<f64> {
        self.sets.eps_eta.as_vec(self.n_y)
    }

    pub fn eps_nu(&self) -> Vec<f64> {
        self.sets.eps_nu.as_vec(self.n)
    }

    pub fn from_json(text: &str) -> Result<SwaModel, ModelError> {
        let model: SwaModel = serde_json::from_str(text)?;
        let issues = model.validate();
        if issues.is_empty() {
            Ok(model)
        } else {
            let msgs: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
            Err(ModelError::Invalid(msgs.join("; ")))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    /// Returns every structural problem found; an empty list means the model
    /// is usable by all downstream modules.
    pub fn validate(&self) -> Vec<ModelIssue> {
        let mut issues = Vec::new();
        let (n, n_u, n_y) = self.dims();
        if self.modes.is_empty() {
            issues.push(ModelIssue::NoModes);
        }
        for (k, mode) in self.modes.iter().enumerate() {
            let mut dim = |name: &str, rows: usize, cols: usize, want_r: usize, want_c: usize| {
                if rows != want_r || cols != want_c {
                    issues.push(ModelIssue::DimMismatch(format!(
                        "mode {k}: {name} is {rows}x{cols}, expected {want_r}x{want_c}"
                    )));
                }
            };
            dim("A", mode.a.rows(), mode.a.cols(), n, n);
            if let Some(b) = &mode.b {
                dim("B", b.rows(), b.cols(), n, n_u);
            }
            dim("C", mode.c.rows(), mode.c.cols(), n_y, n);
            if let Some(d) = &mode.d {
                dim("D", d.rows(), d.cols(), n_y, n_u);
            }
            if let Some(f) = &mode.f {
                if f.len() != n {
                    issues.push(ModelIssue::DimMismatch(format!(
                        "mode {k}: f has length {}, expected {n}",
                        f.len()
                    )));
                }
            }
            if let Some(g) = &mode.g {
                if g.len() != n_y {
                    issues.push(ModelIssue::DimMismatch(format!(
                        "mode {k}: g has length {}, expected {n_y}",
                        g.len()
                    )));
                }
            }
            let finite = mode.a.is_finite()
                && mode.b.as_ref().map_or(true, Matrix::is_finite)
                && mode.c.is_finite()
                && mode.d.as_ref().map_or(true, Matrix::is_finite)
                && mode.f.as_ref().map_or(true, |v| v.iter().all(|x| x.is_finite()))
                && mode.g.as_ref().map_or(true, |v| v.iter().all(|x| x.is_finite()));
            if !finite {
                issues.push(ModelIssue::NonFinite(format!("mode {k}")));
            }
        }
        if self.sets.p_mat.cols() != n || self.sets.p_mat.rows() != self.p_vec_len() {
            issues.push(ModelIssue::DimMismatch(format!(
                "state polytope: P is {}x{}, p has length {}, expected {} columns",
                self.sets.p_mat.rows(),
                self.sets.p_mat.cols(),
                self.p_vec_len(),
                n
            )));
        } else if !self.sets.p_mat.is_finite()
            || self.sets.p_vec.iter().any(|v| !v.is_finite())
        {
            issues.push(ModelIssue::NonFinite("state polytope".into()));
        } else {
            match crate::milp::polytope_box(&self.sets.p_mat, &self.sets.p_vec) {
                Ok(_) => {}
                Err(crate::milp::PolytopeBoxError::Unbounded { coord }) => {
                    issues.push(ModelIssue::UnboundedPolytope { state: coord });
                }
                Err(crate::milp::PolytopeBoxError::Empty) => {
                    issues.push(ModelIssue::EmptyPolytope);
                }
                Err(crate::milp::PolytopeBoxError::Numerical) => {
                    issues.push(ModelIssue::NonFinite("state polytope bounding".into()));
                }
            }
        }
        self.sets.eps_eta.check(n_y, "eps_eta", &mut issues);
        self.sets.eps_nu.check(n, "eps_nu", &mut issues);
        if let Some(u) = self.sets.u_bound {
            if !u.is_finite() || u < 0.0 {
                issues.push(ModelIssue::NegativeBound("U".into()));
            }
        }
        issues
    }

    fn p_vec_len(&self) -> usize {
        self.sets.p_vec.len()
    }

    /// Per-coordinate interval hull of the state polytope, computed by LP.
    /// Only valid for models whose `validate` is clean.
    pub fn state_box(&self) -> (Vec<f64>, Vec<f64>) {
        crate::milp::polytope_box(&self.sets.p_mat, &self.sets.p_vec)
            .expect("state_box requires a validated model")
    }
}

/// True iff the two models have the same numbers of states, inputs and
/// outputs, which is what makes one a candidate fault model for the other.
pub fn same_interface(a: &SwaModel, b: &SwaModel) -> bool {
    a.dims() == b.dims()
}

/// Convenience constructor for box state sets `lb <= x <= ub`, emitting the
/// `{x | Px <= p}` form with one row per face.
pub fn box_polytope(lb: &[f64], ub: &[f64]) -> (Matrix, Vec<f64>) {
    let n = lb.len();
    assert_eq!(n, ub.len());
    let mut p_mat = Matrix::zeros(2 * n, n);
    let mut p_vec = vec![0.0; 2 * n];
    for i in 0..n {
        p_mat[(2 * i, i)] = 1.0;
        p_vec[2 * i] = ub[i];
        p_mat[(2 * i + 1, i)] = -1.0;
        p_vec[2 * i + 1] = -lb[i];
    }
    (p_mat, p_vec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model() -> SwaModel {
        let (p_mat, p_vec) = box_polytope(&[-1.0, -1.0], &[1.0, 1.0]);
        SwaModel {
            n: 2,
            n_u: 0,
            n_y: 1,
            modes: vec![Mode {
                a: Matrix::identity(2),
                b: None,
                c: Matrix::from_rows(vec![vec![1.0, 0.0]]).unwrap(),
                d: None,
                f: None,
                g: None,
            }],
            sets: AdmissibleSets {
                p_mat,
                p_vec,
                eps_eta: NoiseBound::Scalar(0.1),
                eps_nu: NoiseBound::Scalar(0.0),
                u_bound: None,
            },
        }
    }

    #[test]
    fn valid_toy_model() {
        assert!(toy_model().validate().is_empty());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let mut m = toy_model();
        m.modes[0].c = Matrix::from_rows(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let issues = m.validate();
        assert_eq!(issues.len(), 1);
        assert!(matches!(issues[0], ModelIssue::DimMismatch(_)));
    }

    #[test]
    fn unbounded_polytope_reported() {
        let mut m = toy_model();
        // constrains x1 only; x2 is free in both directions
        m.sets.p_mat = Matrix::from_rows(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        m.sets.p_vec = vec![1.0, 1.0];
        let issues = m.validate();
        assert!(issues
            .iter()
            .any(|i| matches!(i, ModelIssue::UnboundedPolytope { state: 1 })));
    }

    #[test]
    fn same_interface_reflexive_and_dims() {
        let m = toy_model();
        assert!(same_interface(&m, &m));
        let mut other = toy_model();
        other.n = 3;
        assert!(!same_interface(&m, &other));
    }

    #[test]
    fn json_roundtrip_preserves_shape_and_bits() {
        let m = toy_model();
        let text = m.to_json();
        assert!(!text.contains("\"B\""), "omitted B must stay omitted");
        let back: SwaModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn scalar_noise_bound_expands() {
        let m = toy_model();
        assert_eq!(m.eps_eta(), vec![0.1]);
        assert_eq!(m.eps_nu(), vec![0.0, 0.0]);
    }
}
