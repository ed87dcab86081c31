use std::fmt;

use serde::Serialize;

use crate::expr::{Expr, Prober, Rational, ZeroVerdict};

/// A failing residual entry: its index tuple and a probe point where it is
/// nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "ser_rationals")]
    pub point: Vec<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub status: ZeroVerdict,
    /// Number of residual entries that are not identically zero.
    pub failing_entries: usize,
    pub witness: Option<Witness>,
}

impl Condition {
    pub fn passed(&self) -> bool {
        self.status.vanishes()
    }
}

/// Per-condition verdicts of an identity check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PoissonReport {
    pub conditions: Vec<Condition>,
}

impl PoissonReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(Condition::passed)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.passed())
    }

    pub fn extend(&mut self, other: PoissonReport) {
        self.conditions.extend(other.conditions);
    }
}

impl fmt::Display for PoissonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            let verdict = match c.status {
                ZeroVerdict::Zero => "ok",
                ZeroVerdict::NumericallyZero => "ok (numerical)",
                ZeroVerdict::NonZero => "FAIL",
            };
            write!(f, "({}) {verdict}", c.name)?;
            if let Some(w) = &c.witness {
                let idx: Vec<String> = w.indices.iter().map(|i| (i + 1).to_string()).collect();
                let pt: Vec<String> = w.point.iter().map(|r| r.to_string()).collect();
                write!(
                    f,
                    "  [{} nonzero entries; indices ({}) at u = ({}) residual {}]",
                    c.failing_entries,
                    idx.join(","),
                    pt.join(", "),
                    w.value
                )?;
            }
            writeln!(f)?;
        }
        write!(f, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Builds a condition from residual entries listed in index order.
pub(crate) fn condition<'a, const R: usize>(
    name: &str,
    entries: impl Iterator<Item = ([usize; R], &'a Expr)>,
    n_vars: usize,
    seed: u64,
) -> Condition {
    let mut failing = 0;
    let mut first: Option<([usize; R], &Expr)> = None;
    for (idx, e) in entries {
        if !e.is_zero() {
            failing += 1;
            first.get_or_insert((idx, e));
        }
    }
    let witness = first.and_then(|(idx, e)| {
        let mut prober = Prober::new(seed);
        prober.nonzero_witness(e, n_vars).ok().map(|(point, value)| Witness {
            indices: idx.to_vec(),
            point,
            value,
        })
    });
    Condition {
        name: name.to_string(),
        status: if failing == 0 { ZeroVerdict::Zero } else { ZeroVerdict::NonZero },
        failing_entries: failing,
        witness,
    }
}
