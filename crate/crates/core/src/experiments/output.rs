//! Trajectory CSV, JSON summaries and SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::OutputConfig;
use super::RunOutput;

fn io(path: &Path, err: std::io::Error) -> Error {
    Error::Io(format!("{}: {err}", path.display()))
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header `t,x_1..x_n,residual[,dist_S,energy,ergavg_1..ergavg_n]`, one row
/// per recorded node. The optional group is written when a distance or
/// energy trace exists; a missing trace is written as `nan`.
pub fn write_csv(run: &RunOutput) -> String {
    let traj = &run.trajectory;
    let n = traj.dim();
    let extended = run.distance.is_some() || run.energy.is_some();
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    out.push_str(",residual");
    if extended {
        out.push_str(",dist_S,energy");
        for i in 1..=n {
            let _ = write!(out, ",ergavg_{i}");
        }
    }
    out.push('\n');
    for k in 0..traj.len() {
        out.push_str(&float(traj.times[k]));
        for v in traj.states[k].iter() {
            out.push(',');
            out.push_str(&float(*v));
        }
        out.push(',');
        out.push_str(&float(traj.step_residuals[k]));
        if extended {
            let pick = |trace: &Option<Vec<f64>>| trace.as_ref().map(|t| t[k]).unwrap_or(f64::NAN);
            out.push(',');
            out.push_str(&float(pick(&run.distance)));
            out.push(',');
            out.push_str(&float(pick(&run.energy)));
            for v in traj.ergodic_states[k].iter() {
                out.push(',');
                out.push_str(&float(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the requested artifacts into `dir` and returns their paths.
pub fn emit_outputs(run: &RunOutput, outputs: &OutputConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let stem = run.summary.scenario.name();
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
        written.push(path);
        Ok(())
    };
    if outputs.csv {
        put(format!("{stem}_trajectory.csv"), write_csv(run))?;
    }
    if outputs.summary {
        put(format!("{stem}_summary.json"), run.summary.to_json()?)?;
    }
    if outputs.svg {
        put(format!("{stem}_states.svg"), states_svg(run))?;
        if let Some(d) = &run.distance {
            let pts: Vec<(f64, f64)> = run.trajectory.times.iter().copied().zip(d.iter().copied()).collect();
            put(
                format!("{stem}_distance.svg"),
                Plot::new("distance to target", true, true).series("dist_S", pts).render(),
            )?;
        }
        if !run.summary.condition_verdicts.is_empty() {
            let mut plot = Plot::new("condition partial sums", true, true);
            for v in &run.summary.condition_verdicts {
                plot = plot.series(v.condition_id.label(), v.partial_sums.clone());
            }
            put(format!("{stem}_conditions.svg"), plot.render())?;
        }
    }
    Ok(written)
}

fn states_svg(run: &RunOutput) -> String {
    let traj = &run.trajectory;
    let mut plot = Plot::new("state components", false, false);
    // Large states (PDE grids) are thinned to at most 8 components.
    let n = traj.dim();
    let step = n.div_ceil(8).max(1);
    for i in (0..n).step_by(step) {
        let pts = traj.times.iter().zip(&traj.states).map(|(&t, x)| (t, x[i])).collect();
        plot = plot.series(&format!("x_{}", i + 1), pts);
    }
    plot.render()
}

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Minimal line plot with optional log axes.
struct Plot {
    title: String,
    log_x: bool,
    log_y: bool,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

impl Plot {
    fn new(title: &str, log_x: bool, log_y: bool) -> Self {
        Self {
            title: title.to_string(),
            log_x,
            log_y,
            series: Vec::new(),
        }
    }

    fn series(mut self, name: &str, points: Vec<(f64, f64)>) -> Self {
        self.series.push((name.to_string(), points));
        self
    }

    fn map(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let tx = if self.log_x { (1.0 + x).log10() } else { x };
        let ty = if self.log_y {
            if y > 0.0 {
                y.log10()
            } else {
                return None;
            }
        } else {
            y
        };
        (tx.is_finite() && ty.is_finite()).then_some((tx, ty))
    }

    fn render(&self) -> String {
        let (w, h, margin) = (640.0, 400.0, 50.0);
        let mapped: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|(_, pts)| pts.iter().filter_map(|&(x, y)| self.map(x, y)).collect())
            .collect();
        let all = mapped.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 <= 0.0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
        let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n\
             <rect x=\"{margin}\" y=\"{margin}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            w / 2.0,
            self.title,
            w - 2.0 * margin,
            h - 2.0 * margin
        );
        let label = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.3}") };
        let _ = writeln!(
            svg,
            "<text x=\"{margin}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            h - margin + 14.0,
            label(x0, self.log_x),
            w - margin,
            h - margin + 14.0,
            label(x1, self.log_x)
        );
        let _ = writeln!(
            svg,
            "<text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\
             <text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            margin + 4.0,
            label(y1, self.log_y),
            h - margin,
            label(y0, self.log_y)
        );
        for (k, ((name, _), pts)) in self.series.iter().zip(&mapped).enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                path.join(" ")
            );
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{name}</text>",
                w - margin + 4.0 - 40.0,
                margin + 14.0 * (k + 1) as f64
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}
