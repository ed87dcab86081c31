use serde::Deserialize;
use serde_json::Value;

use crate::bracket::{build_canonical, CanonicalPair, ConstantBracket, HydroBracket};
use crate::expr::{field_names, parse, parse_expr, parse_rational, Expr, ParseMode, Rational};
use crate::numsim::Grid;
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

/// JSON problem description. Rationals may be strings ("1/3") or numbers;
/// numbers are converted from their decimal text, so 0.1 means 1/10.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub eta: Option<Vec<Vec<Value>>>,
    #[serde(rename = "K", default)]
    pub k: Option<Value>,
    #[serde(rename = "H", default)]
    pub h: Option<Vec<String>>,
    #[serde(default)]
    pub g: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub b: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    pub simulation: Option<SimulationBlock>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    #[serde(rename = "grid_M")]
    pub grid_m: usize,
    /// period; a number or an expression such as "2*pi"
    #[serde(rename = "L")]
    pub l: Value,
    pub dt: f64,
    pub t_end: f64,
    pub init: Vec<String>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn rational_of(v: &Value, at: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Input(format!("{at}: expected a rational"))),
    }
    .map_err(|e| Error::Input(format!("{at}: {e}")))
}

fn expr_of(text: &str, n: usize, at: &str) -> Result<Expr> {
    parse_expr(text, &field_names(n)).map_err(|e| Error::Input(format!("{at}: {e}")))
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if p.n == 0 {
            return Err(Error::Input("N: must be positive".into()));
        }
        Ok(p)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        ProblemFile::from_json(&text).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn curvature(&self) -> Result<Rational> {
        self.k.as_ref().map_or(Ok(Rational::from_integer(0.into())), |v| rational_of(v, "K"))
    }

    pub fn eta(&self) -> Result<Option<ConstantBracket>> {
        let Some(rows) = &self.eta else { return Ok(None) };
        if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
            return Err(Error::Input(format!("eta: expected a {0}x{0} matrix", self.n)));
        }
        let upper = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, v)| rational_of(v, &format!("eta[{i}][{j}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ConstantBracket::new(upper).map(Some).map_err(|e| Error::Input(format!("eta: {e}")))
    }

    /// The pair (eta, K, H); eta defaults to the identity.
    pub fn pair(&self) -> Result<CanonicalPair> {
        let h = self.h.as_ref().ok_or_else(|| Error::Input("H: required for this command".into()))?;
        if h.len() != self.n {
            return Err(Error::Input(format!("H: expected {} expressions, got {}", self.n, h.len())));
        }
        let h = h
            .iter()
            .enumerate()
            .map(|(i, t)| expr_of(t, self.n, &format!("H[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let eta = self.eta()?.unwrap_or_else(|| ConstantBracket::identity(self.n));
        CanonicalPair::new(eta, self.curvature()?, h)
    }

    /// The bracket described by the file: explicit `g` (with `b`, or with its
    /// Levi-Civita connection when `b` is absent), else the one generated by `H`.
    pub fn bracket(&self) -> Result<HydroBracket> {
        let n = self.n;
        let Some(g_rows) = &self.g else {
            if self.b.is_some() {
                return Err(Error::Input("b: given without g".into()));
            }
            return Ok(build_canonical(&self.pair()?));
        };
        if g_rows.len() != n || g_rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!("g: expected a {n}x{n} matrix")));
        }
        let mut g = Matrix::zeros(n);
        for (i, r) in g_rows.iter().enumerate() {
            for (j, t) in r.iter().enumerate() {
                g[[i, j]] = expr_of(t, n, &format!("g[{i}][{j}]"))?;
            }
        }
        let k = self.curvature()?;
        let Some(b_rows) = &self.b else {
            return HydroBracket::from_metric(g, k).map_err(|e| Error::Input(format!("g: {e}")));
        };
        if b_rows.len() != n || b_rows.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
            return Err(Error::Input(format!("b: expected a {n}x{n}x{n} array")));
        }
        let mut b = Tensor3::zeros(n);
        for (i, r) in b_rows.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                for (kk, t) in c.iter().enumerate() {
                    b[[i, j, kk]] = expr_of(t, n, &format!("b[{i}][{j}][{kk}]"))?;
                }
            }
        }
        HydroBracket::new(g, b, k)
    }

    pub fn simulation(&self) -> Result<&SimulationBlock> {
        let s = self.simulation.as_ref().ok_or_else(|| Error::Input("simulation: block required".into()))?;
        if s.init.len() != self.n {
            return Err(Error::Input(format!("simulation.init: expected {} expressions", self.n)));
        }
        Ok(s)
    }
}

impl SimulationBlock {
    pub fn grid(&self) -> Result<Grid> {
        let l = match &self.l {
            Value::Number(x) => x.as_f64().ok_or_else(|| Error::Input("simulation.L: not a number".into()))?,
            Value::String(s) => parse(s, &[] as &[&str], ParseMode::InitialData)
                .and_then(|a| a.eval_f64(&[]))
                .map_err(|e| Error::Input(format!("simulation.L: {e}")))?,
            _ => return Err(Error::Input("simulation.L: expected a number or expression".into())),
        };
        Grid::new(self.grid_m, l).map_err(|e| Error::Input(format!("simulation: {e}")))
    }
}
