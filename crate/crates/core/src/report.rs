//! End-to-end computation and its serializable report.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    decategorify, decategorify_with_anchors, f2_dims_from_integer, factor_out_w, tilde_homology, BigradedHomology,
    Coefficients, ComplexError, Decategorification,
};
use crate::gradings::{rational_string, GradingContext, Rational};
use crate::grid::{GridDiagram, GridError, GridSpec};
use crate::signs::CanonicalSigns;
use crate::ENGINE_VERSION;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("grid has {generators} generators, above the configured cap of {cap}")]
    SizeCapExceeded { generators: u128, cap: u128 },
    #[error("integer coefficients are limited to grid dimension {cap} (got {n}); use F2 coefficients")]
    ZCoefficientCap { n: usize, cap: usize },
    #[error("F2 coefficients are limited to grid dimension {cap} (got {n})")]
    F2DimensionCap { n: usize, cap: usize },
}

/// Size limits applied before any enumeration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub z_max_n: usize,
    pub f2_max_n: usize,
    pub max_generators: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Self { z_max_n: 4, f2_max_n: 6, max_generators: 5_000_000 }
    }
}

impl Caps {
    pub fn check(&self, grid: &GridDiagram, coefficients: Coefficients) -> Result<(), ReportError> {
        let n = grid.n();
        match coefficients {
            Coefficients::Integer if n > self.z_max_n => {
                return Err(ReportError::ZCoefficientCap { n, cap: self.z_max_n })
            }
            Coefficients::F2 if n > self.f2_max_n => {
                return Err(ReportError::F2DimensionCap { n, cap: self.f2_max_n })
            }
            _ => {}
        }
        let generators = grid.params().generator_count().unwrap_or(u128::MAX);
        if generators > self.max_generators {
            return Err(ReportError::SizeCapExceeded { generators, cap: self.max_generators });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub coefficients: Coefficients,
    pub include_tilde: bool,
    pub include_generators: bool,
    pub include_ascii: bool,
    /// Record wall-clock time; off by default so reports are reproducible
    /// byte for byte.
    pub timing: bool,
    pub caps: Caps,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            coefficients: Coefficients::Integer,
            include_tilde: false,
            include_generators: false,
            include_ascii: false,
            timing: false,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    #[serde(with = "rational_string")]
    pub maslov: Rational,
    #[serde(with = "rational_string")]
    pub alexander: Rational,
    pub free_rank: usize,
    /// Invariant factors greater than one, as decimal strings.
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpincReport {
    pub spinc: usize,
    pub total_rank: usize,
    pub groups: Vec<GroupReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermReport {
    #[serde(with = "rational_string")]
    pub exponent: Rational,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecategorificationReport {
    pub spinc: usize,
    /// Maslov grading counted with sign `+1` (the minimum in the class).
    #[serde(with = "option_rational")]
    pub anchor_maslov: Option<Rational>,
    pub terms: Vec<TermReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub columns: Vec<usize>,
    #[serde(with = "rational_string")]
    pub maslov: Rational,
    #[serde(with = "rational_string")]
    pub alexander: Rational,
    pub spinc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub engine_version: String,
    pub input: GridSpec,
    pub homology_class: usize,
    /// Offset added to computed Spin^c labels before reporting.
    pub spinc_label_shift: i64,
    pub coefficients: Coefficients,
    pub hat: Vec<SpincReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilde: Option<Vec<SpincReport>>,
    pub decategorification: Vec<DecategorificationReport>,
    /// Whether the F2 homology agrees with the integral homology through the
    /// universal coefficient theorem (integer runs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2_consistent: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ascii: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl ComputeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Human-readable summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        out.push_str(&format!(
            "grid n={} p={} q={} X={:?} O={:?}  homology class {} (mod {})\n",
            i.n, i.p, i.q, i.xs, i.os, self.homology_class, i.p
        ));
        if let Some(ascii) = &self.ascii {
            out.push_str(ascii);
        }
        let mut section = |title: &str, classes: &[SpincReport]| {
            out.push_str(&format!("{title} homology over {}:\n", self.coefficients));
            for c in classes {
                let parts: Vec<String> = c
                    .groups
                    .iter()
                    .map(|g| {
                        let mut summands = Vec::new();
                        match g.free_rank {
                            0 => {}
                            1 => summands.push("Z".to_string()),
                            r => summands.push(format!("Z^{r}")),
                        }
                        summands.extend(g.torsion.iter().map(|t| format!("Z/{t}")));
                        format!("{} at ({},{})", summands.join(" + "), g.maslov, g.alexander)
                    })
                    .collect();
                out.push_str(&format!("  spin^c {}: rank {}  {}\n", c.spinc, c.total_rank, parts.join(", ")));
            }
        };
        section("hat", &self.hat);
        if let Some(tilde) = &self.tilde {
            section("tilde", tilde);
        }
        out.push_str("decategorification:\n");
        for d in &self.decategorification {
            let terms: Vec<String> = d.terms.iter().map(|t| format!("{}*t^({})", t.coefficient, t.exponent)).collect();
            let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            out.push_str(&format!("  spin^c {}: {}\n", d.spinc, body));
        }
        out
    }
}

fn spinc_reports(h: &BigradedHomology, shift: i64) -> Vec<SpincReport> {
    let p = h.spinc_count() as i64;
    let mut reports: Vec<SpincReport> = (0..h.spinc_count())
        .map(|s| SpincReport {
            spinc: (s as i64 + shift).rem_euclid(p) as usize,
            total_rank: h.total_rank(s),
            groups: h
                .groups(s)
                .iter()
                .rev()
                .map(|(k, g)| GroupReport {
                    maslov: k.maslov.clone(),
                    alexander: k.alexander.clone(),
                    free_rank: g.free_rank,
                    torsion: g.torsion.iter().map(|t| t.to_string()).collect(),
                })
                .collect(),
        })
        .collect();
    reports.sort_by_key(|r| r.spinc);
    reports
}

fn decategorification_reports(d: &[Decategorification], shift: i64) -> Vec<DecategorificationReport> {
    let p = d.len() as i64;
    let mut out: Vec<DecategorificationReport> = d
        .iter()
        .map(|c| DecategorificationReport {
            spinc: (c.spinc as i64 + shift).rem_euclid(p) as usize,
            anchor_maslov: c.anchor_maslov.clone(),
            terms: c
                .terms
                .iter()
                .rev()
                .map(|(e, k)| TermReport { exponent: e.clone(), coefficient: *k })
                .collect(),
        })
        .collect();
    out.sort_by_key(|r| r.spinc);
    out
}

/// Runs the whole pipeline on a grid. Only knots are supported.
pub fn compute_report(grid: &GridDiagram, options: &ReportOptions) -> Result<ComputeReport, ReportError> {
    let start = Instant::now();
    options.caps.check(grid, options.coefficients)?;
    let components = grid.component_count();
    if components != 1 {
        return Err(ComplexError::NotAKnot { components }.into());
    }
    let signs = CanonicalSigns::new(grid.n());
    let tilde = tilde_homology(grid, &signs, options.coefficients)?;
    let hat = factor_out_w(&tilde, grid.n())?;
    let f2_consistent = match options.coefficients {
        Coefficients::Integer if grid.n() <= options.caps.f2_max_n => {
            let f2 = tilde_homology(grid, &signs, Coefficients::F2)?;
            let predicted = f2_dims_from_integer(&tilde);
            Some((0..f2.spinc_count()).all(|s| f2.poincare(s) == predicted[s]))
        }
        _ => None,
    };
    let shift = 0;
    let decat = decategorify(&hat);
    let generators = options.include_generators.then(|| {
        let ctx = GradingContext::new(grid);
        crate::gradings::enumerate_generators(grid)
            .map(|g| {
                let t = ctx.trigrading(&g);
                GeneratorReport { columns: g.column_vec(), maslov: t.maslov, alexander: t.alexander, spinc: t.spinc }
            })
            .collect()
    });
    Ok(ComputeReport {
        engine_version: ENGINE_VERSION.to_string(),
        input: grid.clone().into(),
        homology_class: grid.homology_class(),
        spinc_label_shift: shift,
        coefficients: options.coefficients,
        hat: spinc_reports(&hat, shift),
        tilde: options.include_tilde.then(|| spinc_reports(&tilde, shift)),
        decategorification: decategorification_reports(&decat, shift),
        f2_consistent,
        generators,
        ascii: options.include_ascii.then(|| grid.render_ascii()),
        timing_ms: options.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Decategorification of tilde homology anchored at the hat anchors, for the
/// `χ(tilde) = χ(hat) (1 - t^{-1})^{n-1}` consistency check.
pub fn tilde_decategorification(tilde: &BigradedHomology, hat: &BigradedHomology) -> Vec<Decategorification> {
    let anchors: Vec<Option<Rational>> = decategorify(hat).into_iter().map(|d| d.anchor_maslov).collect();
    decategorify_with_anchors(tilde, &anchors)
}

mod option_rational {
    use super::Rational;
    use crate::gradings::{format_rational, parse_rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(s) => parse_rational(&s).map(Some).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}"))),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips() {
        let grid = GridDiagram::new(2, 3, 1, &[0, 1], &[3, 4]).unwrap();
        let options = ReportOptions { include_tilde: true, include_generators: true, include_ascii: true, ..Default::default() };
        let report = compute_report(&grid, &options).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"3/2\""));
        assert_eq!(ComputeReport::from_json(&json).unwrap(), report);
        assert_eq!(report.f2_consistent, Some(true));
        assert_eq!(report.generators.as_ref().unwrap().len(), 18);
        assert!(report.timing_ms.is_none());
    }

    #[test]
    fn caps_are_enforced() {
        let grid = GridDiagram::new(5, 1, 0, &[0, 1, 2, 3, 4], &[1, 2, 3, 4, 0]).unwrap();
        let err = compute_report(&grid, &ReportOptions::default()).unwrap_err();
        assert!(matches!(err, ReportError::ZCoefficientCap { n: 5, cap: 4 }));
        let tight = ReportOptions { caps: Caps { max_generators: 10, ..Caps::default() }, ..Default::default() };
        let small = GridDiagram::new(2, 3, 1, &[0, 1], &[3, 4]).unwrap();
        assert!(matches!(compute_report(&small, &tight), Err(ReportError::SizeCapExceeded { generators: 18, cap: 10 })));
    }
}
