//! Randomized verification campaigns: sample queries, plan, certify, and
//! cross-check crossing counts against the brute-force oracle.
//!
//! Randomness is counter-based: query `i` of a campaign draws from a
//! SplitMix64 stream derived from `(seed, i)` alone, so campaigns are
//! reproducible bit for bit, order-independent, and safe to evaluate in
//! parallel. SplitMix64 is fully specified by the two constants below and
//! fits in a dozen lines, which keeps reports reproducible across
//! implementations in other languages as well.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::hypersurface::ImplicitHypersurface;
use crate::planners::{Planner, Query};
use crate::transversality::{
    certify_semi_transversal, crossing_count_oracle, DetectionConfig, Verdict,
};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64, used as a counter-based generator: one independent stream per
/// `(seed, index)` pair.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// The stream for draw `index` of a campaign seeded with `seed`.
    pub fn for_index(seed: u64, index: u64) -> Self {
        let mut probe = Self::new(
            seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))),
        );
        let state = probe.next_u64();
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Campaign parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub n_queries: usize,
    pub seed: u64,
    /// Per-axis `[lo, hi]` sampling ranges.
    pub bounding_box: Vec<[f64; 2]>,
    pub detection: DetectionConfig,
    /// Grid density of the per-query oracle comparison.
    pub oracle_samples: usize,
}

impl CampaignConfig {
    /// A cube `[lo, hi]^dimension` with default detection settings.
    pub fn cube(n_queries: usize, seed: u64, dimension: usize, lo: f64, hi: f64) -> Self {
        Self {
            n_queries,
            seed,
            bounding_box: vec![[lo, hi]; dimension],
            detection: DetectionConfig::default(),
            oracle_samples: 4096,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_queries == 0 {
            return Err(Error::InvalidConfig("n_queries must be at least 1".into()));
        }
        if self.bounding_box.iter().any(|[lo, hi]| lo.is_nan() || hi.is_nan() || lo >= hi) {
            return Err(Error::InvalidConfig(
                "bounding box needs lo < hi on every axis".into(),
            ));
        }
        if self.oracle_samples < 4096 {
            return Err(Error::InvalidConfig(
                "oracle_samples must be at least 4096".into(),
            ));
        }
        self.detection.validate()
    }
}

/// One failed query and its certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignFailure {
    pub query: Query,
    pub verdict: Verdict,
}

/// A query whose certified crossing count disagrees with the oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleMismatch {
    pub query: Query,
    pub detected: usize,
    pub oracle: usize,
}

/// Aggregated campaign outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub planner: String,
    pub n_queries: usize,
    pub n_pass: usize,
    pub n_fail: usize,
    pub n_endpoint_violations: usize,
    pub failures: Vec<CampaignFailure>,
    /// Transversal-crossing count per query -> number of queries.
    pub crossing_histogram: BTreeMap<usize, usize>,
    pub oracle_mismatches: Vec<OracleMismatch>,
}

/// Start and goal drawn independently, coordinates uniform per axis. Draw
/// order: all start coordinates in axis order, then all goal coordinates.
pub fn sample_query(bounding_box: &[[f64; 2]], rng: &mut SplitMix64) -> Query {
    let draw = |rng: &mut SplitMix64| {
        Point::new_unchecked(
            bounding_box
                .iter()
                .map(|&[lo, hi]| rng.uniform(lo, hi))
                .collect(),
        )
    };
    let start = draw(rng);
    let goal = draw(rng);
    Query { start, goal }
}

/// The worked planar fixture queries, injected ahead of random ones in every
/// campaign so the known-good (and known-bad) routes are always exercised.
pub fn pinned_queries(dimension: usize) -> Vec<Query> {
    if dimension != 2 {
        return Vec::new();
    }
    let q = |s: [f64; 2], g: [f64; 2]| Query {
        start: Point::new(s.to_vec()).unwrap(),
        goal: Point::new(g.to_vec()).unwrap(),
    };
    vec![
        q([-4.0, -1.0], [3.0, 0.0]),
        q([-3.0, 2.0], [1.0, 1.0]),
        q([-2.5, 2.0], [1.5, -2.0]),
        q([-1.0, 0.0], [1.0, 0.0]),
        q([1.0, 1.0], [-1.0, 1.0]),
    ]
}

const REJECTIONS_PER_QUERY: usize = 1000;

fn query_for_index(
    planner: &Planner,
    pins: &[Query],
    cfg: &CampaignConfig,
    index: usize,
) -> Result<Query> {
    if index < pins.len() {
        return Ok(pins[index].clone());
    }
    let mut rng = SplitMix64::for_index(cfg.seed, index as u64);
    for _ in 0..REJECTIONS_PER_QUERY {
        let q = sample_query(&cfg.bounding_box, &mut rng);
        if planner.contains(&q) {
            return Ok(q);
        }
    }
    Err(Error::DomainSamplingExhausted {
        attempts: REJECTIONS_PER_QUERY,
    })
}

struct QueryOutcome {
    query: Query,
    endpoint_ok: bool,
    verdict: Verdict,
    detected: usize,
    oracle: usize,
}

/// Plans, certifies, and oracle-checks `cfg.n_queries` queries (pinned
/// fixtures first, then rejection-sampled into the planner's cover).
/// Queries are evaluated in parallel; the report is deterministic in
/// `(planner, surface, cfg)`.
pub fn run_campaign(
    planner: &Planner,
    surface: &ImplicitHypersurface,
    cfg: &CampaignConfig,
) -> Result<CampaignReport> {
    cfg.validate()?;
    if planner.dimension() != surface.dimension() {
        return Err(Error::DimensionMismatch {
            expected: planner.dimension(),
            got: surface.dimension(),
        });
    }
    if cfg.bounding_box.len() != planner.dimension() {
        return Err(Error::DimensionMismatch {
            expected: planner.dimension(),
            got: cfg.bounding_box.len(),
        });
    }

    let mut pins: Vec<Query> = pinned_queries(planner.dimension())
        .into_iter()
        .filter(|q| planner.contains(q))
        .collect();
    pins.truncate(cfg.n_queries);

    let outcomes: Vec<QueryOutcome> = (0..cfg.n_queries)
        .into_par_iter()
        .map(|index| -> Result<QueryOutcome> {
            let query = query_for_index(planner, &pins, cfg, index)?;
            let path = planner.plan(&query)?;
            let endpoint_ok = path.start().dist(&query.start) <= 1e-9
                && path.end().dist(&query.goal) <= 1e-9;
            let verdict = certify_semi_transversal(&path, surface, &cfg.detection)?;
            let detected = verdict.transversal_count();
            let oracle = crossing_count_oracle(&path, surface, cfg.oracle_samples);
            Ok(QueryOutcome {
                query,
                endpoint_ok,
                verdict,
                detected,
                oracle,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CampaignReport {
        planner: planner.name().to_string(),
        n_queries: cfg.n_queries,
        n_pass: 0,
        n_fail: 0,
        n_endpoint_violations: 0,
        failures: Vec::new(),
        crossing_histogram: BTreeMap::new(),
        oracle_mismatches: Vec::new(),
    };
    for outcome in outcomes {
        if outcome.verdict.passed() {
            report.n_pass += 1;
        } else {
            report.n_fail += 1;
            report.failures.push(CampaignFailure {
                query: outcome.query.clone(),
                verdict: outcome.verdict.clone(),
            });
        }
        if !outcome.endpoint_ok {
            report.n_endpoint_violations += 1;
        }
        *report.crossing_histogram.entry(outcome.detected).or_insert(0) += 1;
        if outcome.detected != outcome.oracle {
            report.oracle_mismatches.push(OracleMismatch {
                query: outcome.query,
                detected: outcome.detected,
                oracle: outcome.oracle,
            });
        }
    }
    Ok(report)
}

/// True when all `n` sampled query pairs land in at least one cover domain.
pub fn cover_check(planner: &Planner, bounding_box: &[[f64; 2]], n: usize, seed: u64) -> bool {
    (0..n).into_par_iter().all(|index| {
        let mut rng = SplitMix64::for_index(seed, index as u64);
        planner.contains(&sample_query(bounding_box, &mut rng))
    })
}
