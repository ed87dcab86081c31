//! Periodic pseudo-spectral integration of hydrodynamic-type flows
//! v^i_t = V^i_k(v) v^k_x, numeric application of the nonlocal operator of a
//! canonical pair, and conservation diagnostics.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::expr::{parse, Ast, ParseMode};
use crate::{Error, Result};

mod compiled;
mod run;

pub use compiled::{apply_p1_numeric, CompiledBracket, CompiledFlow};
pub use run::{
    commute_check_numeric, diagnostics, run, step_rk4, write_diagnostics_csv, write_snapshot_csv, Densities, Diagnostics,
    RunConfig, RunOutcome, RunStatus, StepInfo,
};

/// Uniform periodic grid x_m = mL/M.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    m: usize,
    l: f64,
}

impl Grid {
    pub fn new(m: usize, l: f64) -> Result<Self> {
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::Input(format!("grid size must be a power of two >= 8, got {m}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Input(format!("period must be positive, got {l}")));
        }
        Ok(Grid { m, l })
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn period(&self) -> f64 {
        self.l
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.m as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| i as f64 * self.spacing()).collect()
    }

    /// Trapezoid rule on the periodic grid (spectrally accurate).
    pub fn integrate(&self, s: &[f64]) -> f64 {
        s.iter().sum::<f64>() * self.spacing()
    }

    pub fn mean(&self, s: &[f64]) -> f64 {
        s.iter().sum::<f64>() / self.m as f64
    }
}

/// N fields sampled on the grid at time t.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub fields: Vec<Vec<f64>>,
}

impl FieldState {
    pub fn new(fields: Vec<Vec<f64>>, t: f64) -> Result<Self> {
        let m = fields.first().map_or(0, Vec::len);
        if fields.is_empty() || fields.iter().any(|f| f.len() != m) {
            return Err(Error::Dimension("fields must be nonempty and equally sampled".into()));
        }
        let s = FieldState { t, fields };
        s.check_finite()?;
        Ok(s)
    }

    /// Samples expressions in `x` (sin, cos, exp, pi allowed) on the grid.
    pub fn from_expressions<S: AsRef<str>>(grid: &Grid, init: &[S]) -> Result<Self> {
        let nodes = grid.nodes();
        let fields = init
            .iter()
            .map(|text| {
                let ast: Ast = parse(text.as_ref(), &["x"], ParseMode::InitialData)?;
                nodes.iter().map(|&x| ast.eval_f64(&[x])).collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FieldState::new(fields, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn points(&self) -> usize {
        self.fields[0].len()
    }

    /// Values of all components at grid point m.
    pub fn at(&self, m: usize) -> Vec<f64> {
        self.fields.iter().map(|f| f[m]).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.fields.iter().flatten().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numerical(format!("non-finite field value at t = {}", self.t)))
        }
    }

    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.fields
            .iter()
            .flatten()
            .zip(other.fields.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// FFT plans and wavenumbers for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// angular wavenumbers, Nyquist mode zeroed
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let m = grid.points();
        let mut planner = FftPlanner::new();
        let base = 2.0 * PI / grid.period();
        let k = (0..m)
            .map(|j| match j {
                j if j < m / 2 => base * j as f64,
                j if j == m / 2 => 0.0,
                j => base * (j as f64 - m as f64),
            })
            .collect();
        Spectral { grid: grid.clone(), forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m), k }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn to_modes(&self, s: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn from_modes(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Fourier derivative.
    pub fn dx(&self, s: &[f64]) -> Vec<f64> {
        let mut modes = self.to_modes(s);
        for (c, &k) in modes.iter_mut().zip(&self.k) {
            *c *= Complex64::new(0.0, k);
        }
        self.from_modes(modes)
    }

    /// The mean-zero periodic antiderivative; input must have zero mean.
    pub fn antidx(&self, s: &[f64]) -> Result<Vec<f64>> {
        let norm = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mean = self.grid.mean(s);
        if mean.abs() > 1e-8 * norm.max(f64::MIN_POSITIVE) && norm > 0.0 {
            return Err(Error::Numerical(format!("antiderivative of data with nonzero mean {mean:e}")));
        }
        let mut modes = self.to_modes(s);
        for (c, &k) in modes.iter_mut().zip(&self.k) {
            *c = if k == 0.0 { Complex64::new(0.0, 0.0) } else { *c / Complex64::new(0.0, k) };
        }
        Ok(self.from_modes(modes))
    }

    /// Zeroes every mode with |j| > M/3.
    pub fn dealias(&self, s: &[f64]) -> Vec<f64> {
        let m = self.grid.points();
        let mut modes = self.to_modes(s);
        for (j, c) in modes.iter_mut().enumerate() {
            let w = j.min(m - j);
            if 3 * w > m {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.from_modes(modes)
    }

    /// Share of spectral energy in modes with |j| > M/3.
    pub fn tail_fraction(&self, s: &[f64]) -> f64 {
        let m = self.grid.points();
        let modes = self.to_modes(s);
        let (mut tail, mut total) = (0.0, 0.0);
        for (j, c) in modes.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if 3 * j.min(m - j) > m {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

#[cfg(test)]
mod tests;
