use std::io::Write;
use std::path::Path;

use bandedge::{eval_susceptibility, AmplitudeTrace, SystemParams, TimeGrid};
use serde_json::json;

use crate::args::FormatArg;
use crate::CliError;

pub const BASE_COLUMNS: [&str; 7] = [
    "t",
    "re_b1",
    "im_b1",
    "re_chi",
    "im_chi",
    "neg_im_chi",
    "pop1",
];

/// Named columns of equal length, in output order.
#[derive(Debug, Clone)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

fn trace_columns(params: &SystemParams, amp: &AmplitudeTrace) -> Vec<Vec<f64>> {
    let chi = eval_susceptibility(params, amp);
    vec![
        amp.b1.iter().map(|b| b.re).collect(),
        amp.b1.iter().map(|b| b.im).collect(),
        chi.chi.iter().map(|c| c.re).collect(),
        chi.chi.iter().map(|c| c.im).collect(),
        chi.neg_im_chi,
        chi.population1,
    ]
}

impl Table {
    /// Columns for a single method.
    pub fn single(params: &SystemParams, amp: &AmplitudeTrace) -> Self {
        let mut columns = vec![amp.grid.times().collect::<Vec<_>>()];
        columns.extend(trace_columns(params, amp));
        Table {
            names: BASE_COLUMNS.iter().map(|s| s.to_string()).collect(),
            columns,
        }
    }

    /// Closed-form columns, then the `volterra_` counterparts and `abs_diff = |b1 - b1_volterra|`.
    pub fn both(params: &SystemParams, closed: &AmplitudeTrace, volterra: &AmplitudeTrace) -> Self {
        let mut t = Table::single(params, closed);
        for (name, col) in BASE_COLUMNS[1..]
            .iter()
            .zip(trace_columns(params, volterra))
        {
            t.names.push(format!("volterra_{name}"));
            t.columns.push(col);
        }
        t.names.push("abs_diff".into());
        t.columns.push(
            closed
                .b1
                .iter()
                .zip(&volterra.b1)
                .map(|(a, b)| (a - b).norm())
                .collect(),
        );
        t
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.columns[k].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Header plus one line per sample; 17 significant digits, `\n` endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows() * self.names.len() * 25);
        out.push_str(&self.names.join(","));
        out.push('\n');
        for r in 0..self.rows() {
            for (c, col) in self.columns.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{:.16e}", col[r]));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(
        &self,
        method: &str,
        params: &SystemParams,
        grid: &TimeGrid,
    ) -> Result<String, CliError> {
        if self.columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::numerical(
                "non_finite",
                "trace contains non-finite samples",
            ));
        }
        let data: serde_json::Map<String, serde_json::Value> = self
            .names
            .iter()
            .cloned()
            .zip(self.columns.iter().map(|c| json!(c)))
            .collect();
        let doc = json!({
            "method": method,
            "params": params,
            "grid": { "t_max": grid.t_max, "n_steps": grid.n_steps },
            "columns": self.names,
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
        s.push('\n');
        Ok(s)
    }

    pub fn render(
        &self,
        format: FormatArg,
        method: &str,
        params: &SystemParams,
        grid: &TimeGrid,
    ) -> Result<String, CliError> {
        match format {
            FormatArg::Csv => Ok(self.to_csv()),
            FormatArg::Json => self.to_json(method, params, grid),
        }
    }
}

/// Replace `path` with `contents` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::io(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn gnuplot_script(data_file: &Path, both: bool) -> String {
    let f = data_file.display();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set xlabel 't'\n");
    s.push_str("set multiplot layout 2,1\n");
    s.push_str("set ylabel '-Im chi'\n");
    if both {
        s.push_str(&format!(
            "plot '{f}' using 1:6 with lines, '' using 1:13 with lines dashtype 2\n"
        ));
    } else {
        s.push_str(&format!("plot '{f}' using 1:6 with lines\n"));
    }
    s.push_str("set ylabel '|b1|^2'\n");
    s.push_str(&format!("plot '{f}' using 1:7 with lines\n"));
    s.push_str("unset multiplot\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use bandedge::solve_closed_form;

    #[test]
    fn csv_layout() {
        let p = SystemParams::default();
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let t = Table::single(&p, &solve_closed_form(&p, &grid).unwrap());
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,re_b1,im_b1,re_chi,im_chi,neg_im_chi,pop1"
        );
        assert_eq!(
            lines.next().unwrap().split(',').next().unwrap(),
            "0.0000000000000000e0"
        );
        assert_eq!(csv.lines().count(), 6);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
