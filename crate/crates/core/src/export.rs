//! CSV and JSON serialization of traces, spectra, and operators.
//!
//! All floats are printed with 17 significant digits so outputs
//! round-trip exactly and regression baselines can be compared
//! byte-for-byte.

use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::assembly::{ConfigSnapshot, OperatorBundle};
use crate::dynamics::{EnergyTrace, StateVector};
use crate::error::Result;
use crate::spectral::{CompareReport, SpectrumReport};

/// 17-significant-digit scientific notation; round-trips any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl OperatorBundle {
    /// Labels of the longitudinal fields, matching the assembled layup.
    pub fn axial_field_labels(&self) -> Vec<String> {
        match &self.config {
            ConfigSnapshot::ThreeLayer(_) => vec!["v1".to_string(), "v3".to_string()],
            ConfigSnapshot::Multilayer(c) => (0..c.odd.len())
                .map(|i| format!("y{}", 2 * i + 1))
                .collect(),
            ConfigSnapshot::Synthetic { .. } => (0..self.layout.n_axial_fields())
                .map(|i| format!("a{}", i + 1))
                .collect(),
        }
    }
}

/// Writes a dense matrix as CSV with a `# rows cols` header, row-major.
pub fn write_matrix_csv<W: Write>(mut out: W, matrix: &DMatrix<f64>) -> io::Result<()> {
    writeln!(out, "# {} {}", matrix.nrows(), matrix.ncols())?;
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols()).map(|j| fmt_float(matrix[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Dumps `M.csv`, `K.csv`, `D.csv` into `dir` for external verification.
pub fn dump_operators(dir: &Path, bundle: &OperatorBundle) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, matrix) in [
        ("M.csv", &bundle.mass),
        ("K.csv", &bundle.stiffness),
        ("D.csv", &bundle.damping),
    ] {
        let file = std::fs::File::create(dir.join(name))?;
        write_matrix_csv(io::BufWriter::new(file), matrix)?;
    }
    Ok(())
}

impl EnergyTrace {
    /// Columns `t,E,d_<channel>...,residual`; the row at `t0` carries
    /// zero dissipation and residual.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let channel_cols: Vec<String> =
            self.channel_labels.iter().map(|l| format!("d_{l}")).collect();
        writeln!(out, "t,E,{},residual", channel_cols.join(","))?;
        for (n, (t, e)) in self.times.iter().zip(&self.energies).enumerate() {
            let mut fields = vec![fmt_float(*t), fmt_float(*e)];
            if n == 0 {
                fields.extend(std::iter::repeat_n(fmt_float(0.0), self.channel_labels.len() + 1));
            } else {
                fields.extend(self.dissipations[n - 1].iter().map(|d| fmt_float(*d)));
                fields.push(fmt_float(self.residuals[n - 1]));
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Writes nodal field values of a state: `x,<fields>,w,wx`, one row per
/// mesh node (clamped node included with zeros).
pub fn write_snapshot_csv<W: Write>(
    mut out: W,
    bundle: &OperatorBundle,
    state: &StateVector,
) -> io::Result<()> {
    let labels = bundle.axial_field_labels();
    writeln!(out, "x,{},w,wx", labels.join(","))?;
    let layout = &bundle.layout;
    for (node, &x) in bundle.mesh.nodes().iter().enumerate() {
        let mut fields = vec![fmt_float(x)];
        for f in 0..layout.n_axial_fields() {
            let value = layout.axial_dof(f, node).map_or(0.0, |d| state.q[d]);
            fields.push(fmt_float(value));
        }
        fields.push(fmt_float(layout.w_value_dof(node).map_or(0.0, |d| state.q[d])));
        fields.push(fmt_float(layout.w_slope_dof(node).map_or(0.0, |d| state.q[d])));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

impl SpectrumReport {
    /// Columns `re,im,trace_<dof>...,axial_fraction`, one row per
    /// reported mode.
    pub fn write_csv<W: Write>(&self, mut out: W, bundle: &OperatorBundle) -> io::Result<()> {
        let mut cols: Vec<String> = bundle
            .axial_field_labels()
            .iter()
            .map(|l| format!("trace_{l}"))
            .collect();
        cols.push("trace_w".to_string());
        cols.push("trace_wx".to_string());
        writeln!(out, "re,im,{},axial_fraction", cols.join(","))?;
        for m in &self.modes {
            let mut fields = vec![fmt_float(m.lambda.re), fmt_float(m.lambda.im)];
            fields.extend(m.traces.iter().map(|t| fmt_float(*t)));
            fields.push(fmt_float(m.axial_fraction));
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Headline summary: abscissa, minimum trace norm, mesh size, gains.
    pub fn summary_json(&self) -> serde_json::Value {
        let gains: serde_json::Map<String, serde_json::Value> = self
            .gain_values
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        serde_json::json!({
            "spectral_abscissa": self.spectral_abscissa,
            "min_trace_norm": self.min_trace_norm(),
            "n_elem": self.n_elem,
            "n_modes": self.modes.len(),
            "gains": gains,
            "actuation": self.actuation,
        })
    }
}

impl CompareReport {
    /// Columns `mode,omega_voltage,omega_charge,shift,axial_fraction`,
    /// one row per axial-dominated mode.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "mode,omega_voltage,omega_charge,shift,axial_fraction")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.mode_index,
                fmt_float(row.omega_voltage),
                fmt_float(row.omega_charge),
                fmt_float(row.shift),
                fmt_float(row.axial_fraction)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::mesh::Mesh;
    use crate::model::BeamConfig;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.0, 1.0, -1.0 / 3.0, 6.02e23, -2.5e-17, f64::MIN_POSITIVE] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn matrix_csv_has_header_and_shape() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# 2 3");
        assert_eq!(lines.clone().count(), 2);
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn trace_csv_columns_follow_channels() {
        let bundle = assemble(&BeamConfig::reference(), &Mesh::uniform(1.0, 4).unwrap()).unwrap();
        let initial = crate::dynamics::default_initial_state(
            &bundle,
            crate::dynamics::InitialProfile::Mixed,
        );
        let out = crate::dynamics::simulate(&bundle, &initial, 0.1, 0.05, None).unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "t,E,d_s1,d_s3,d_k1,d_k2,residual");
        assert_eq!(text.lines().count(), 1 + out.trace.times.len());
    }

    #[test]
    fn snapshot_csv_has_one_row_per_node() {
        let bundle = assemble(&BeamConfig::reference(), &Mesh::uniform(1.0, 4).unwrap()).unwrap();
        let state = crate::dynamics::default_initial_state(
            &bundle,
            crate::dynamics::InitialProfile::BendingBump,
        );
        let mut buf = Vec::new();
        write_snapshot_csv(&mut buf, &bundle, &state).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,v1,v3,w,wx");
        assert_eq!(text.lines().count(), 1 + 5);
        // Clamped node row is all zeros except x.
        let row: Vec<f64> = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(&row[1..], &[0.0, 0.0, 0.0, 0.0]);
    }
}
