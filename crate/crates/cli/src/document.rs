//! On-disk formats: state files in, reports out.

use std::path::Path;

use num_complex::Complex;
use qsep_core::states::{pure_to_density, validate_density};
use qsep_core::{
    chsh_max, concurrence, hefei_margins, CMat64, CriterionReport64, DensityMatrix64,
    HefeiMargins64, LocalFrame64, PureState64, SearchConfig,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A state file. Complex numbers are `[re, im]` pairs.
///
/// ```json
/// {"kind": "pure", "data": [[0,0], [0.7071067811865476,0], [-0.7071067811865476,0], [0,0]]}
/// {"kind": "density", "data": [[[0.25,0],[0,0],[0,0],[0,0]], ...]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "data",
    rename_all = "lowercase",
    deny_unknown_fields
)]
pub enum StateDocument {
    Pure([[f64; 2]; 4]),
    Density([[[f64; 2]; 4]; 4]),
}

fn cplx(p: [f64; 2]) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

impl StateDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_density(rho: &DensityMatrix64) -> Self {
        let m = rho.matrix();
        StateDocument::Density([0, 1, 2, 3].map(|i| [0, 1, 2, 3].map(|j| pair(m[(i, j)]))))
    }

    pub fn from_pure(p: &PureState64) -> Self {
        StateDocument::Pure(p.amplitudes().map(pair))
    }

    /// Validates and converts; errors name the violated invariant.
    pub fn to_density(&self, tol: f64) -> qsep_core::Result<DensityMatrix64> {
        match self {
            StateDocument::Pure(a) => Ok(pure_to_density(&PureState64::new(a.map(cplx))?)),
            StateDocument::Density(rows) => {
                let flat: Vec<Complex<f64>> = rows.iter().flatten().map(|&p| cplx(p)).collect();
                validate_density(&CMat64::from_row_major(4, 4, flat)?, tol)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginsDoc {
    pub m_minus: f64,
    pub m_plus: f64,
    pub m_plus_all: f64,
}

impl From<&HefeiMargins64> for MarginsDoc {
    fn from(m: &HefeiMargins64) -> Self {
        Self {
            m_minus: m.m_minus,
            m_plus: m.m_plus,
            m_plus_all: m.m_plus_all,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    /// `[alpha, beta, gamma]` of the first qubit's rotation.
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl From<&LocalFrame64> for FrameDoc {
    fn from(f: &LocalFrame64) -> Self {
        Self {
            u: f.angles_u.to_array(),
            v: f.angles_v.to_array(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptDoc {
    pub min_eigenvalue: f64,
    pub spectrum: [f64; 4],
    pub verdict: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub grid_points_per_angle: usize,
    pub refinement_iterations: usize,
    pub refinement_tolerance: f64,
    pub violation_threshold: f64,
    pub seed_frames_from_correlation: bool,
    pub ppt_tolerance: f64,
    pub refinement_starts: usize,
}

impl From<&SearchConfig> for ConfigDoc {
    fn from(c: &SearchConfig) -> Self {
        Self {
            grid_points_per_angle: c.grid_points_per_angle,
            refinement_iterations: c.refinement_iterations,
            refinement_tolerance: c.refinement_tolerance,
            violation_threshold: c.violation_threshold,
            seed_frames_from_correlation: c.seed_frames_from_correlation,
            ppt_tolerance: c.ppt_tolerance,
            refinement_starts: c.refinement_starts,
        }
    }
}

/// Machine-readable analysis of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub source: String,
    pub seed: u64,
    pub config: ConfigDoc,
    pub verdict: String,
    pub agreement: bool,
    pub converged: bool,
    pub min_m_plus: f64,
    pub grid_min_m_plus: f64,
    pub min_m_minus_observed: f64,
    pub witness_frame: FrameDoc,
    pub margins_at_witness: MarginsDoc,
    pub margins_at_identity: MarginsDoc,
    pub ppt: PptDoc,
    pub concurrence: f64,
    pub chsh_max: f64,
    pub evaluations: usize,
}

impl ReportDocument {
    pub fn build(
        source: &str,
        seed: u64,
        cfg: &SearchConfig,
        rho: &DensityMatrix64,
        rep: &CriterionReport64,
    ) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            source: source.to_string(),
            seed,
            config: cfg.into(),
            verdict: rep.verdict.to_string(),
            agreement: rep.agreement,
            converged: rep.converged,
            min_m_plus: rep.min_m_plus,
            grid_min_m_plus: rep.grid_min_m_plus,
            min_m_minus_observed: rep.min_m_minus_observed,
            witness_frame: (&rep.witness_frame).into(),
            margins_at_witness: (&hefei_margins(rho, &rep.witness_frame)).into(),
            margins_at_identity: (&hefei_margins(rho, &LocalFrame64::identity())).into(),
            ppt: PptDoc {
                min_eigenvalue: rep.ppt.min_eigenvalue,
                spectrum: rep.ppt.spectrum,
                verdict: rep.ppt.verdict.to_string(),
            },
            concurrence: concurrence(rho),
            chsh_max: chsh_max(rho),
            evaluations: rep.evaluations,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Aligned `key  value` lines.
    pub fn to_text(&self) -> String {
        let f = crate::sig17;
        let tri = |a: [f64; 3]| format!("({}, {}, {})", f(a[0]), f(a[1]), f(a[2]));
        let rows: Vec<(&str, String)> = vec![
            ("source", self.source.clone()),
            ("verdict", self.verdict.clone()),
            ("ppt verdict", self.ppt.verdict.clone()),
            ("agreement", self.agreement.to_string()),
            ("min m_plus", f(self.min_m_plus)),
            ("grid min m_plus", f(self.grid_min_m_plus)),
            ("min m_minus seen", f(self.min_m_minus_observed)),
            ("witness u", tri(self.witness_frame.u)),
            ("witness v", tri(self.witness_frame.v)),
            (
                "m_plus_all @ witness",
                f(self.margins_at_witness.m_plus_all),
            ),
            ("m_minus @ identity", f(self.margins_at_identity.m_minus)),
            ("m_plus @ identity", f(self.margins_at_identity.m_plus)),
            ("ppt min eigenvalue", f(self.ppt.min_eigenvalue)),
            (
                "ppt spectrum",
                self.ppt
                    .spectrum
                    .iter()
                    .map(|&x| f(x))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            ("concurrence", f(self.concurrence)),
            ("chsh max", f(self.chsh_max)),
            ("converged", self.converged.to_string()),
            ("evaluations", self.evaluations.to_string()),
            ("version", self.tool_version.clone()),
        ];
        let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<w$}  {v}\n"))
            .collect()
    }
}
