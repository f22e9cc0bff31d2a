//! Report shapes written by the command-line entry points, and the CSV
//! writer they share.
//!
//! JSON reports are plain serde structs; every report here deserializes
//! under its own schema, so written artifacts can be read back for
//! comparison. CSV output uses a dot decimal separator and 17 significant
//! digits (`{:.16e}`), enough to round-trip an f64 exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::loci::BifurcationKind;
use crate::model::{ModelFamily, PlanarState};
use crate::nullcline::{Branch, BranchCell, CriticalPoint, DegreeClass};
use crate::spectral::SpectralSummary;

/// Formats one value the way every CSV column expects it.
pub fn csv_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> CsvTable {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        self.rows.push(values.iter().map(|&v| csv_number(v)).collect());
    }

    pub fn push_row(&mut self, values: Vec<String>) {
        debug_assert_eq!(values.len(), self.header.len());
        self.rows.push(values);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// One equilibrium with its spectrum and branch location.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub state: PlanarState,
    pub residual: f64,
    pub branch: Branch,
    pub cell_index: usize,
    pub spectrum: SpectralSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub family: ModelFamily,
    pub parameters: BTreeMap<String, f64>,
    /// admissible prey interval (nullcline positive on its interior)
    pub domain: [f64; 2],
    pub degree: DegreeClass,
    pub critical_points: Vec<CriticalPoint>,
    pub cells: Vec<BranchCell>,
    pub equilibria: Vec<EquilibriumReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchors: Option<Vec<String>>,
}

/// One located bifurcation point, uniform across the three kinds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub kind: BifurcationKind,
    pub family: ModelFamily,
    pub state: PlanarState,
    /// name of the parameter whose critical value is reported
    pub parameter: String,
    pub critical_value: f64,
    /// full instance parameters at the point
    pub parameters: BTreeMap<String, f64>,
    /// flow trace and determinant for flows; map trace and determinant for
    /// the discrete family
    pub trace: f64,
    pub det: f64,
    pub branch: Branch,
    /// the point sits on the branch the localization pattern expects
    pub on_expected_branch: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LociReport {
    pub kind: BifurcationKind,
    pub family: ModelFamily,
    pub points: Vec<BifurcationPoint>,
    /// runs that ended on the degenerate boundary (double-zero searches
    /// only): count of converged-but-boundary outcomes
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boundary_runs: Option<usize>,
}

impl LociReport {
    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(&["x", "critical_value", "trace", "det", "verdict"]);
        for p in &self.points {
            table.push_row(vec![
                csv_number(p.state.x),
                csv_number(p.critical_value),
                csv_number(p.trace),
                csv_number(p.det),
                if p.on_expected_branch { "expected_branch" } else { "off_branch" }.to_string(),
            ]);
        }
        table
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulateReport {
    pub family: ModelFamily,
    pub parameters: BTreeMap<String, f64>,
    pub start: PlanarState,
    pub reference: PlanarState,
    pub dt: f64,
    pub steps_recorded: usize,
    pub clipped: bool,
    pub verdict: crate::dynamics::OscillationVerdict,
}

/// Anchor strings attached by the traceability flag: stable names for the
/// behavior each entry checks, usable as cross-run identifiers.
pub fn anchor_for(kind: BifurcationKind, expected: bool) -> &'static str {
    match (kind, expected) {
        (BifurcationKind::Hopf, true) => "hopf-localization/ascending-branch",
        (BifurcationKind::Hopf, false) => "hopf-localization/violation",
        (BifurcationKind::BogdanovTakens, true) => "bt-localization/ascending-window",
        (BifurcationKind::BogdanovTakens, false) => "bt-localization/violation",
        (BifurcationKind::NeimarkSacker, true) => "ns-localization/descending-branch",
        (BifurcationKind::NeimarkSacker, false) => "ns-localization/violation",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip_f64() {
        for v in [0.1, 1.0 / 3.0, 27.0 / 256.0, 1e-300, -5.5e17] {
            let s = csv_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            assert!(!s.contains(','));
        }
    }

    #[test]
    fn csv_table_renders_header_and_rows() {
        let mut t = CsvTable::new(&["x", "y"]);
        t.push_numbers(&[1.0, 2.0]);
        let text = t.render();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,y");
        assert_eq!(lines.next().unwrap(), "1.0000000000000000e0,2.0000000000000000e0");
        assert!(lines.next().is_none());
    }
}
