//! Figure presets, parameter sweeps over a time grid, and CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{report_from_moments, HzFlag};
use crate::dynamics::moments_at;
use crate::error::{Error, Result};
use crate::params::{Model, SystemParams};

pub const DEFAULT_T_END: f64 = 50.0;
pub const DEFAULT_POINTS: usize = 1000;

/// The one field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepField {
    Kappa,
    Gamma,
    Omega,
    Theta,
    GainA,
}

impl SweepField {
    pub fn name(self) -> &'static str {
        match self {
            SweepField::Kappa => "kappa",
            SweepField::Gamma => "gamma",
            SweepField::Omega => "omega",
            SweepField::Theta => "theta",
            SweepField::GainA => "gain_a",
        }
    }

    pub fn apply(self, base: SystemParams, value: f64) -> SystemParams {
        let mut p = base;
        match self {
            SweepField::Kappa => p.kappa = value,
            SweepField::Gamma => p.gamma = value,
            SweepField::Omega => p.omega = value,
            SweepField::Theta => p.theta = value,
            SweepField::GainA => p.gain_a = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub field: SweepField,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_points: usize) -> Self {
        Self {
            t_start: 0.0,
            t_end,
            n_points,
            spacing: Spacing::Linear,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.t_end
                } else {
                    self.t_start + span * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputColumn {
    VS,
    EN,
    Dgcz,
    HalfDgcz,
    HzG,
    NA,
    NB,
    CAb,
    Regime,
}

impl OutputColumn {
    pub const DEFAULT: [OutputColumn; 8] = [
        OutputColumn::VS,
        OutputColumn::EN,
        OutputColumn::Dgcz,
        OutputColumn::HzG,
        OutputColumn::NA,
        OutputColumn::NB,
        OutputColumn::CAb,
        OutputColumn::Regime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputColumn::VS => "v_s",
            OutputColumn::EN => "e_n",
            OutputColumn::Dgcz => "dgcz",
            OutputColumn::HalfDgcz => "half_dgcz",
            OutputColumn::HzG => "hz_g",
            OutputColumn::NA => "n_a",
            OutputColumn::NB => "n_b",
            OutputColumn::CAb => "c_ab",
            OutputColumn::Regime => "regime",
        }
    }
}

fn default_outputs() -> Vec<OutputColumn> {
    OutputColumn::DEFAULT.to_vec()
}

/// One run: base parameters, an optional one-field sweep, a time grid and
/// the columns to report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub label: String,
    pub params: SystemParams,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    pub t_grid: TimeGrid,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputColumn>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.t_grid;
        if !(g.t_end > 0.0 && g.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                g.t_end
            )));
        }
        if !(g.t_start >= 0.0 && g.t_start < g.t_end) {
            return Err(Error::InvalidConfig(format!(
                "t_start must lie in [0, t_end), got {}",
                g.t_start
            )));
        }
        if g.n_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_points must be at least 2, got {}",
                g.n_points
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidConfig("no output columns".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::InvalidConfig("sweep has no values".into()));
            }
        }
        Ok(())
    }

    /// Parameter sets in sweep order, each with its sweep value.
    pub fn parameter_sets(&self) -> Vec<(Option<f64>, SystemParams)> {
        match &self.sweep {
            None => vec![(None, self.params)],
            Some(s) => s
                .values
                .iter()
                .map(|v| (Some(*v), s.field.apply(self.params, *v)))
                .collect(),
        }
    }
}

/// Parameters of the figure presets; sweep values for captions that only say
/// "different values" are chosen inside the window where the moments stay
/// physical.
pub fn preset(fig_id: &str) -> Result<ScenarioConfig> {
    let base = |gamma, omega, theta, gain_a| SystemParams::new(0.5, gamma, omega, theta, gain_a);
    let sweep = |field, values: &[f64]| {
        Some(Sweep {
            field,
            values: values.to_vec(),
        })
    };
    let gain_values = [10.0, 25.0, 50.0, 100.0];
    let strong_gamma = [0.5, 0.7, 0.9, 1.0];

    let (params, sweep, t_end, outputs) = match fig_id {
        "fig1" => (
            base(1.0, 0.0, 0.0, 10.0),
            sweep(SweepField::Gamma, &[0.8, 0.85, 0.9, 1.0]),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig2" => (
            base(0.75, 0.0, 0.25, 10.0),
            sweep(SweepField::Gamma, &[0.6, 0.65, 0.7, 0.75]),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig3" => (
            base(0.75, 0.0, 0.25, 10.0),
            sweep(SweepField::Theta, &[0.1, 0.15, 0.2, 0.25]),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig4" => (
            base(0.75, 0.0, 0.25, 10.0),
            sweep(SweepField::GainA, &gain_values),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig5" => (
            base(1.0, 10.0, 0.0, 10.0),
            sweep(SweepField::Gamma, &strong_gamma),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig6" => (
            base(1.0, 10.0, 0.25, 10.0),
            sweep(SweepField::Gamma, &strong_gamma),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig7" => (
            base(1.0, 10.0, 0.0, 10.0),
            sweep(SweepField::Theta, &[0.0, 0.25, 0.5, 1.0]),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig8" => (
            base(0.75, 10.0, 0.25, 10.0),
            sweep(SweepField::GainA, &gain_values),
            DEFAULT_T_END,
            default_outputs(),
        ),
        "fig9" => (
            base(0.75, 0.0, 0.25, 25.0),
            None,
            DEFAULT_T_END,
            vec![OutputColumn::VS, OutputColumn::HalfDgcz],
        ),
        "fig10" => (
            base(0.75, 10.0, 0.25, 25.0),
            None,
            DEFAULT_T_END,
            vec![OutputColumn::VS, OutputColumn::HalfDgcz],
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(ScenarioConfig {
        label: fig_id.to_string(),
        params,
        sweep,
        t_grid: TimeGrid::new(t_end, DEFAULT_POINTS),
        outputs,
    })
}

pub const PRESET_IDS: [&str; 10] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

/// 17 significant digits, enough to re-parse the exact bits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of one column, with flag tokens as `None`.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates every (sweep value, time) pair; rows are sweep-major,
/// time-minor.
pub fn run(config: &ScenarioConfig) -> Result<ResultTable> {
    config.validate()?;
    let sweep_name = config.sweep.as_ref().map_or("none", |s| s.field.name());
    let mut header: Vec<String> = ["sweep_param", "sweep_value", "t"]
        .map(String::from)
        .to_vec();
    header.extend(config.outputs.iter().map(|c| c.name().to_string()));

    let times = config.t_grid.times();
    let mut rows = Vec::with_capacity(times.len() * config.parameter_sets().len());
    for (value, params) in config.parameter_sets() {
        let model = Model::new(params)?;
        let regime = model.spectrum.regime;
        let block: Vec<Vec<Cell>> = times
            .par_iter()
            .map(|&t| {
                let sm = moments_at(&model, t)?;
                let r = report_from_moments(&sm)?;
                let mut row = vec![
                    Cell::Text(sweep_name.to_string()),
                    value.map_or(Cell::Text(String::new()), Cell::Num),
                    Cell::Num(t),
                ];
                for col in &config.outputs {
                    row.push(match col {
                        OutputColumn::VS => Cell::Num(r.v_s),
                        OutputColumn::EN => Cell::Num(r.e_n),
                        OutputColumn::Dgcz => Cell::Num(r.dgcz),
                        OutputColumn::HalfDgcz => Cell::Num(r.half_dgcz()),
                        OutputColumn::HzG => match r.hz_flag {
                            HzFlag::Defined => Cell::Num(r.hz_g),
                            HzFlag::Divergent => Cell::Text("inf".into()),
                            HzFlag::Undefined => Cell::Text("nan-undefined".into()),
                        },
                        OutputColumn::NA => Cell::Num(sm.n_a),
                        OutputColumn::NB => Cell::Num(sm.n_b),
                        OutputColumn::CAb => Cell::Num(sm.c_ab),
                        OutputColumn::Regime => Cell::Text(regime.as_str().into()),
                    });
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        rows.extend(block);
    }
    Ok(ResultTable { header, rows })
}

pub fn emit_csv(table: &ResultTable, destination: &Path) -> Result<()> {
    let file = File::create(destination)?;
    table.write_csv(BufWriter::new(file))
}
