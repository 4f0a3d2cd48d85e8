//! Batch torsion surveys over families of grids.

use std::collections::HashSet;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{factor_out_w, tilde_homology, BigradedHomology, Coefficients, ComplexError};
use crate::generator::GeneratorSpace;
use crate::gradings::format_rational;
use crate::grid::{GridDiagram, GridParams};
use crate::report::{Caps, ReportError};
use crate::signs::CanonicalSigns;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("invalid scan range: {0}")]
    Range(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum SamplePolicy {
    /// Every knot diagram, deduplicated by canonical form.
    Exhaustive,
    /// `samples` uniformly random knot diagrams per `(p, q)`, drawn from a
    /// ChaCha generator seeded with `seed` (with replacement).
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n: usize,
    pub p_min: usize,
    pub p_max: usize,
    pub policy: SamplePolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionFinding {
    /// Canonical key of the grid, enough to reproduce the computation.
    pub key: String,
    pub flavor: String,
    pub spinc: usize,
    pub maslov: String,
    pub alexander: String,
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqSummary {
    pub p: usize,
    pub q: usize,
    pub grids: usize,
    pub grids_with_torsion: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TorsionSurvey {
    pub grids_examined: usize,
    pub per_pq: Vec<PqSummary>,
    pub findings: Vec<TorsionFinding>,
}

impl TorsionSurvey {
    /// Adds every torsion summand of `h` as a finding; returns whether any
    /// was found.
    pub fn record(&mut self, key: &str, flavor: &str, h: &BigradedHomology) -> bool {
        let before = self.findings.len();
        for (spinc, class) in h.classes.iter().enumerate() {
            for (grading, group) in class.iter().filter(|(_, g)| !g.torsion.is_empty()) {
                self.findings.push(TorsionFinding {
                    key: key.to_string(),
                    flavor: flavor.to_string(),
                    spinc,
                    maslov: format_rational(&grading.maslov),
                    alexander: format_rational(&grading.alexander),
                    torsion: group.torsion.iter().map(|t| t.to_string()).collect(),
                });
            }
        }
        self.findings.len() > before
    }

    pub fn torsion_free(&self) -> bool {
        self.findings.is_empty()
    }
}

/// All knot diagrams with the given parameters, one per canonical form.
pub fn enumerate_knot_grids(params: GridParams) -> Vec<GridDiagram> {
    enumerate_canonical_grids(params, true)
}

/// All valid diagrams (links included unless `knots_only`), one per
/// canonical form, sorted.
pub fn enumerate_canonical_grids(params: GridParams, knots_only: bool) -> Vec<GridDiagram> {
    let space = GeneratorSpace::new(&params).expect("small parameters");
    let placements: Vec<Vec<usize>> = space.iter().map(|g| g.column_vec()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for xs in &placements {
        for os in &placements {
            let Ok(grid) = GridDiagram::from_params(params, xs.clone(), os.clone()) else { continue };
            if knots_only && !grid.is_knot() {
                continue;
            }
            let canonical = grid.canonical_form();
            if seen.insert(canonical.clone()) {
                out.push(canonical);
            }
        }
    }
    out.sort();
    out
}

/// A uniformly random knot diagram with the given parameters.
///
/// # Panics
/// If the grid has a single square, where no diagram exists.
pub fn random_knot_grid<R: Rng>(params: GridParams, rng: &mut R) -> GridDiagram {
    assert!(params.width() > 1, "a 1x1 grid carries no diagram");
    let space = GeneratorSpace::new(&params).expect("small parameters");
    loop {
        let xs = space.generator(rng.gen_range(0..space.len())).column_vec();
        let os = space.generator(rng.gen_range(0..space.len())).column_vec();
        if let Ok(grid) = GridDiagram::from_params(params, xs, os) {
            if grid.is_knot() {
                return grid;
            }
        }
    }
}

/// Tilde and hat homology over `Z` of one grid.
fn examine(grid: &GridDiagram) -> Result<(BigradedHomology, BigradedHomology), ComplexError> {
    let signs = CanonicalSigns::new(grid.n());
    let tilde = tilde_homology(grid, &signs, Coefficients::Integer)?;
    let hat = factor_out_w(&tilde, grid.n())?;
    Ok((tilde, hat))
}

/// Grids sharing one `(p, q)`.
pub type PqGrids = ((usize, usize), Vec<GridDiagram>);

/// The grids a scan examines, grouped by `(p, q)` in increasing order.
pub fn scan_grids(config: &ScanConfig) -> Result<Vec<PqGrids>, ScanError> {
    if config.p_min == 0 || config.p_min > config.p_max {
        return Err(ScanError::Range(format!("p range {}..={}", config.p_min, config.p_max)));
    }
    let mut out = Vec::new();
    for p in config.p_min..=config.p_max {
        for q in (0..p.max(1)).filter(|&q| p.gcd(&q) == 1) {
            let params = GridParams::new(config.n, p, q).map_err(ReportError::from)?;
            let grids = match config.policy {
                SamplePolicy::Exhaustive => enumerate_knot_grids(params),
                SamplePolicy::Sampled { samples, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 32) ^ q as u64);
                    (0..samples).map(|_| random_knot_grid(params, &mut rng)).collect()
                }
            };
            out.push(((p, q), grids));
        }
    }
    Ok(out)
}

/// Computes integral tilde and hat homology of every grid in the range and
/// collects all torsion summands.
pub fn batch_scan(config: &ScanConfig, caps: &Caps) -> Result<TorsionSurvey, ScanError> {
    let mut survey = TorsionSurvey::default();
    for ((p, q), grids) in scan_grids(config)? {
        if let Some(first) = grids.first() {
            caps.check(first, Coefficients::Integer)?;
        }
        let results: Vec<(String, BigradedHomology, BigradedHomology)> = grids
            .par_iter()
            .map(|g| examine(g).map(|(t, h)| (g.canonical_key(), t, h)))
            .collect::<Result<_, _>>()?;
        let mut with_torsion = 0;
        for (key, tilde, hat) in &results {
            let a = survey.record(key, "tilde", tilde);
            let b = survey.record(key, "hat", hat);
            with_torsion += usize::from(a || b);
        }
        survey.grids_examined += results.len();
        survey.per_pq.push(PqSummary { p, q, grids: results.len(), grids_with_torsion: with_torsion });
    }
    Ok(survey)
}
