//! Named, seeded experiments that check the spread, distance and line-count
//! statements at desk scale.
//!
//! Every experiment returns an [`ExperimentReport`]. Trials run in parallel
//! but each derives its seed from `(master seed, trial index)`, and reports
//! are assembled in trial order, so the same parameters always give the same
//! JSON.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{Num, One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::census;
use crate::construct;
use crate::error::{Budget, Error, Result};
use crate::ff::{FieldDesc, Felt};
use crate::geom::{self, FVector};
use crate::pointset::PointSet;

pub type Rational = Ratio<i64>;

/// `eps^2 / (1 + eps + eps^2)`.
pub fn alpha_epsilon<T: Num + Copy>(eps: T) -> T {
    let sq = eps * eps;
    sq / (T::one() + eps + sq)
}

/// A size threshold parameter and its line-count constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold<T> {
    pub epsilon: T,
    pub alpha_epsilon: T,
}

impl<T: Num + Copy + PartialOrd> Threshold<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if epsilon <= T::zero() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(Threshold {
            epsilon,
            alpha_epsilon: alpha_epsilon(epsilon),
        })
    }
}

/// Parses `"3"`, `"0.5"` or `"2/3"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || frac.len() > 12 {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let r = Rational::new(num, 10i64.pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

fn rational_str(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ceil_ratio(r: Rational) -> u64 {
    r.ceil().to_integer().max(0) as u64
}

fn pow_i64(q: u32, e: usize) -> Result<i64> {
    (q as i64)
        .checked_pow(e as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("{q}^{e} overflows")))
}

/// SplitMix64 finalizer over `(master, index)`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform `n`-subset of `pool` by seeded partial Fisher-Yates; returned in
/// lexicographic order.
pub fn sample_subset(pool: &[FVector], n: usize, seed: u64) -> Vec<FVector> {
    let mut v = pool.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = v.partial_shuffle(&mut rng, n);
    let mut out = chosen.to_vec();
    out.sort_unstable();
    out
}

fn random_set(fd: &FieldDesc, d: usize, n: usize, seed: u64, budget: Budget) -> Result<PointSet> {
    let pool = geom::all_points(fd, d, budget)?;
    if n > pool.len() {
        return Err(Error::InvalidParameter(format!(
            "{n} points requested but F_q^d has only {}",
            pool.len()
        )));
    }
    PointSet::new(fd.clone(), d, sample_subset(&pool, n, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub field: String,
    pub d: usize,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

impl Params {
    fn new(fd: &FieldDesc, d: usize, seed: u64, trials: usize) -> Self {
        Params {
            field: fd.spec(),
            d,
            seed,
            trials,
            ..Default::default()
        }
    }
}

/// How a trial's measurement is compared against its requirement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl Relation {
    pub fn holds(self, measured: u64, required: u64) -> bool {
        match self {
            Relation::Eq => measured == required,
            Relation::Ge => measured >= required,
            Relation::Le => measured <= required,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub n_points: usize,
    pub measured: u64,
    pub relation: Relation,
    pub required: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Value>,
}

impl TrialOutcome {
    fn new(trial: usize, seed: u64, n_points: usize, measured: u64, relation: Relation, required: u64) -> Self {
        TrialOutcome {
            trial,
            seed,
            n_points,
            measured,
            relation,
            required,
            pass: relation.holds(measured, required),
            detail: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: Value) -> Self {
        self.detail.insert(key.to_string(), v);
        self
    }

    /// Extra conditions beyond the main relation.
    fn also(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub claim_ref: String,
    pub params: Params,
    pub per_trial: Vec<TrialOutcome>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    fn assemble(name: &str, claim: &str, params: Params, per_trial: Vec<TrialOutcome>) -> Self {
        let verdict = Verdict::from_bool(per_trial.iter().all(|t| t.pass));
        ExperimentReport {
            name: name.to_string(),
            claim_ref: claim.to_string(),
            params,
            per_trial,
            summary: BTreeMap::new(),
            notes: Vec::new(),
            verdict,
        }
    }

    fn summarize(mut self, key: &str, v: Value) -> Self {
        self.summary.insert(key.to_string(), v);
        self
    }

    fn note(mut self, s: &str) -> Self {
        self.notes.push(s.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per trial.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "trial", "seed", "n_points", "measured", "relation", "required", "pass"])
            .expect("in-memory write");
        for t in &self.per_trial {
            w.write_record([
                self.name.clone(),
                t.trial.to_string(),
                t.seed.to_string(),
                t.n_points.to_string(),
                t.measured.to_string(),
                t.relation.symbol().to_string(),
                t.required.to_string(),
                t.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<TrialOutcome>>
where
    F: Fn(usize, u64) -> Result<TrialOutcome> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, trial_seed(seed, t as u64)))
        .collect()
}

const BODE_CLAIM: &str = "a set of at least 2q-1 points in F_q^2 determines exactly q distinct spreads";

fn bode_trial(ps: &PointSet, trial: usize, seed: u64, budget: Budget) -> Result<TrialOutcome> {
    let c = census::distinct_spreads(ps, budget)?;
    let q = ps.field().q() as u64;
    Ok(TrialOutcome::new(trial, seed, ps.len(), c.defined_count as u64, Relation::Eq, q)
        .with("values", json!(c.defined_values)))
}

/// Spread values determined by all of F_q^2, i.e. every attainable value.
fn plane_spread_count(fd: &FieldDesc, budget: Budget) -> Option<usize> {
    let plane = PointSet::new(fd.clone(), 2, geom::all_points(fd, 2, budget).ok()?).ok()?;
    census::distinct_spreads(&plane, budget).ok().map(|c| c.defined_count)
}

/// Random subsets of F_q^2 of size `2q - 1`; each must determine exactly
/// `q` spreads.
pub fn run_bode(fd: &FieldDesc, trials: usize, seed: u64, budget: Budget) -> Result<ExperimentReport> {
    let n = 2 * fd.q() as usize - 1;
    let per_trial = run_trials(trials, seed, |t, s| {
        bode_trial(&random_set(fd, 2, n, s, budget)?, t, s, budget)
    })?;
    let mut params = Params::new(fd, 2, seed, trials);
    params.n_points = Some(n);
    Ok(ExperimentReport::assemble("bode", BODE_CLAIM, params, per_trial)
        .summarize("plane_spread_count", json!(plane_spread_count(fd, budget))))
}

/// Single deterministic trial on a given planar set.
pub fn run_bode_on(ps: &PointSet, budget: Budget) -> Result<ExperimentReport> {
    if ps.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: ps.dim() });
    }
    let fd = ps.field();
    let mut params = Params::new(fd, 2, 0, 1);
    params.n_points = Some(ps.len());
    params.mode = Some("fixed".into());
    Ok(ExperimentReport::assemble("bode", BODE_CLAIM, params, vec![bode_trial(ps, 0, 0, budget)?])
        .summarize("plane_spread_count", json!(plane_spread_count(fd, budget))))
}

const THRESHOLD_CLAIM: &str =
    "a set of at least (1+eps) q^ceil(d/2) points in F_q^d determines at least c*q distinct spreads";

/// Random sets of size `ceil((1+eps) q^ceil(d/2))`; each must determine at
/// least `floor(q/4)` spreads. Odd `d` is embedded in `d + 1` dimensions.
pub fn run_threshold(
    fd: &FieldDesc,
    d: usize,
    epsilon: Rational,
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<ExperimentReport> {
    if d < 2 {
        return Err(Error::BadDimension { d, reason: "needs d >= 2".into() });
    }
    let th = Threshold::new(epsilon)?;
    let n = ceil_ratio((Rational::one() + th.epsilon) * pow_i64(fd.q(), d.div_ceil(2))?) as usize;
    let floor = (fd.q() / 4) as u64;
    let embed_dim = if d % 2 == 1 { d + 1 } else { d };
    let per_trial = run_trials(trials, seed, |t, s| {
        let ps = random_set(fd, d, n, s, budget)?.embed(embed_dim);
        let c = census::distinct_spreads(&ps, budget)?;
        Ok(TrialOutcome::new(t, s, n, c.defined_count as u64, Relation::Ge, floor)
            .with("values", json!(c.defined_values)))
    })?;
    let mut params = Params::new(fd, d, seed, trials);
    params.epsilon = Some(rational_str(epsilon));
    params.n_points = Some(n);
    let counts: Vec<u64> = per_trial.iter().map(|t| t.measured).collect();
    Ok(ExperimentReport::assemble("threshold", THRESHOLD_CLAIM, params, per_trial)
        .summarize("embedded_dim", json!(embed_dim))
        .summarize("min_count", json!(counts.iter().min()))
        .summarize("max_count", json!(counts.iter().max()))
        .note("floor(q/4) is a desk-scale stand-in for the unspecified constant c; raw counts are recorded"))
}

/// The isotropic constructions sit exactly at `q^ceil(d/2)` points, below
/// every `(1+eps)` threshold, and determine 0 (even d) or at most 1 (odd d)
/// spreads regardless of seed.
pub fn run_threshold_adversarial(fd: &FieldDesc, d: usize, budget: Budget) -> Result<ExperimentReport> {
    let (ps, sharp) = construction_for(fd, d, budget)?;
    let c = census::distinct_spreads(&ps, budget)?;
    let trial = TrialOutcome::new(0, 0, ps.len(), c.defined_count as u64, Relation::Le, sharp)
        .with("values", json!(c.defined_values));
    let mut params = Params::new(fd, d, 0, 1);
    params.n_points = Some(ps.len());
    params.mode = Some("adversarial".into());
    Ok(ExperimentReport::assemble("threshold", THRESHOLD_CLAIM, params, vec![trial]))
}

const BECK_CLAIM: &str =
    "a set of at least (1+eps) q^(d-1) points in F_q^d spans at least alpha_eps q^(2d-2) lines, alpha_eps = eps^2/(1+eps+eps^2)";

fn beck_required(q: u32, d: usize, th: &Threshold<Rational>) -> Result<u64> {
    Ok(ceil_ratio(th.alpha_epsilon * pow_i64(q, 2 * d - 2)?))
}

fn beck_trial(ps: &PointSet, required: u64, trial: usize, seed: u64, budget: Budget) -> Result<TrialOutcome> {
    let lc = census::spanned_lines(ps, budget)?;
    Ok(TrialOutcome::new(trial, seed, ps.len(), lc.lines as u64, Relation::Ge, required)
        .with("max_degree", json!(lc.max_degree)))
}

/// Random sets of size `ceil((1+eps) q^(d-1))`; each must span at least
/// `alpha_eps q^(2d-2)` lines.
pub fn run_beck(
    fd: &FieldDesc,
    d: usize,
    epsilon: Rational,
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<ExperimentReport> {
    if d < 1 {
        return Err(Error::BadDimension { d, reason: "needs d >= 1".into() });
    }
    let th = Threshold::new(epsilon)?;
    let n = ceil_ratio((Rational::one() + th.epsilon) * pow_i64(fd.q(), d - 1)?) as usize;
    let required = beck_required(fd.q(), d, &th)?;
    let per_trial = run_trials(trials, seed, |t, s| {
        beck_trial(&random_set(fd, d, n, s, budget)?, required, t, s, budget)
    })?;
    let mut params = Params::new(fd, d, seed, trials);
    params.epsilon = Some(rational_str(epsilon));
    params.n_points = Some(n);
    Ok(ExperimentReport::assemble("beck", BECK_CLAIM, params, per_trial)
        .summarize("alpha_epsilon", json!(rational_str(th.alpha_epsilon))))
}

/// Single deterministic trial on a given set.
pub fn run_beck_on(ps: &PointSet, epsilon: Rational, budget: Budget) -> Result<ExperimentReport> {
    let th = Threshold::new(epsilon)?;
    let required = beck_required(ps.field().q(), ps.dim(), &th)?;
    let mut params = Params::new(ps.field(), ps.dim(), 0, 1);
    params.epsilon = Some(rational_str(epsilon));
    params.n_points = Some(ps.len());
    params.mode = Some("fixed".into());
    Ok(ExperimentReport::assemble("beck", BECK_CLAIM, params, vec![beck_trial(ps, required, 0, 0, budget)?])
        .summarize("alpha_epsilon", json!(rational_str(th.alpha_epsilon))))
}

const PROJECTION_CLAIM: &str =
    "a uniformly random projection F_q^d -> F_q^k has expected collisions below C(|P|,2) q^-k, so some projection keeps |P| - E_coll points";

/// Fixes a random set and averages collisions over seeded projections.
///
/// Passes when the mean is at most `1.2 * C(n,2) * q^-k` and every trial has
/// `|pi(P)| >= |P| - collisions`.
pub fn run_projection(
    fd: &FieldDesc,
    d: usize,
    k: usize,
    n_points: usize,
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("projection needs at least one trial".into()));
    }
    let ps = random_set(fd, d, n_points, trial_seed(seed, u64::MAX), budget)?;
    let per_trial = run_trials(trials, seed, |t, s| {
        let proj = census::random_projection(fd, d, k, s)?;
        let coll = census::collision_count(&ps, &proj)?;
        let img = census::image_size(&ps, &proj)?;
        Ok(TrialOutcome::new(t, s, ps.len(), coll, Relation::Le, ps.len() as u64 * (ps.len() as u64).saturating_sub(1) / 2)
            .with("image_size", json!(img))
            .also(img as u64 + coll >= ps.len() as u64))
    })?;
    let pairs = (n_points as i64) * (n_points as i64 - 1).max(0) / 2;
    let qk = pow_i64(fd.q(), k)?;
    let total: i64 = per_trial.iter().map(|t| t.measured as i64).sum();
    let mean = Rational::new(total, trials as i64);
    let bound = Rational::new(pairs, qk);
    let slack = Rational::new(6, 5);
    let mean_ok = mean <= slack * bound;
    let best = per_trial
        .iter()
        .min_by_key(|t| (t.measured, t.trial))
        .expect("at least one trial");

    let mut params = Params::new(fd, d, seed, trials);
    params.k = Some(k);
    params.n_points = Some(n_points);
    let best_json = json!({"trial": best.trial, "collisions": best.measured, "image_size": best.detail["image_size"]});
    let mut report = ExperimentReport::assemble("projection", PROJECTION_CLAIM, params, per_trial)
        .summarize("mean_collisions", json!(rational_str(mean)))
        .summarize("expected_bound", json!(rational_str(bound)))
        .summarize("allowed_mean", json!(rational_str(slack * bound)))
        .summarize("mean_within_bound", json!(mean_ok))
        .summarize("best_projection", best_json);
    report.verdict = Verdict::from_bool(report.verdict.passed() && mean_ok);
    Ok(report)
}

const CONSTRUCTION_CLAIM: &str = "the span of d/2 orthogonal isotropic vectors (plus e_d for odd d) has q^ceil(d/2) points and determines no spread (even d) or at most one (odd d)";

fn construction_for(fd: &FieldDesc, d: usize, budget: Budget) -> Result<(PointSet, u64)> {
    if d.is_multiple_of(2) {
        Ok((construct::con1_set(fd, d, budget)?, 0))
    } else {
        Ok((construct::con2_set(fd, d, budget)?, 1))
    }
}

pub fn run_constructions(fd: &FieldDesc, d: usize, budget: Budget) -> Result<ExperimentReport> {
    let (ps, sharp) = construction_for(fd, d, budget)?;
    let expected_size = pow_i64(fd.q(), d.div_ceil(2))? as usize;
    let c = census::distinct_spreads(&ps, Budget(budget.0.max(Budget::TRIPLES.0)))?;
    let trial = TrialOutcome::new(0, 0, ps.len(), c.defined_count as u64, Relation::Le, sharp)
        .with("expected_size", json!(expected_size))
        .with("values", json!(c.defined_values))
        .with("undefined_triples", json!(c.undefined_triples))
        .also(ps.len() == expected_size);
    let mut params = Params::new(fd, d, 0, 1);
    params.n_points = Some(ps.len());
    params.mode = Some(if d.is_multiple_of(2) { "con1" } else { "con2" }.into());
    Ok(ExperimentReport::assemble("constructions", CONSTRUCTION_CLAIM, params, vec![trial]))
}

const SPHERE_DISTANCE_CLAIM: &str =
    "a subset of the unit sphere in F_q^d (d >= 3) with at least C q^(d/2) points determines at least min(q/2, Cq/4) distances";

/// `min(floor(q/2), floor(C q / 4))`.
pub fn distance_floor(q: u32, c: Rational) -> u64 {
    let quarter = (c * Rational::from_integer(q as i64) / Rational::from_integer(4)).floor();
    (q as u64 / 2).min(quarter.to_integer().max(0) as u64)
}

/// Least `n` with `n >= C q^(d/2)`, exact for odd `d`.
fn sphere_sample_size(q: u32, d: usize, c: Rational) -> Result<usize> {
    let target = c * c * pow_i64(q, d)?;
    let mut n = (target.to_integer() as f64).sqrt() as i64;
    n = n.saturating_sub(2).max(0);
    while Rational::from_integer(n * n) < target {
        n += 1;
    }
    Ok(n as usize)
}

pub fn run_sphere_distance(
    fd: &FieldDesc,
    d: usize,
    c: Rational,
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<ExperimentReport> {
    if d < 3 {
        return Err(Error::BadDimension { d, reason: "needs d >= 3".into() });
    }
    if c <= Rational::zero() {
        return Err(Error::InvalidParameter("C must be positive".into()));
    }
    let sphere = geom::sphere_points(fd, d, Felt::ONE, budget)?;
    let n = sphere_sample_size(fd.q(), d, c)?;
    if n > sphere.len() {
        return Err(Error::SphereTooSmall { needed: n, available: sphere.len() });
    }
    let floor = distance_floor(fd.q(), c);
    let per_trial = run_trials(trials, seed, |t, s| {
        let ps = PointSet::new(fd.clone(), d, sample_subset(sphere.points(), n, s))?;
        let dc = census::distinct_distances(&ps)?;
        Ok(TrialOutcome::new(t, s, n, dc.nonzero.len() as u64, Relation::Ge, floor)
            .with("distances", json!(dc.nonzero)))
    })?;
    let mut params = Params::new(fd, d, seed, trials);
    params.c = Some(rational_str(c));
    params.n_points = Some(n);
    Ok(ExperimentReport::assemble("sphere-distance", SPHERE_DISTANCE_CLAIM, params, per_trial)
        .summarize("sphere_size", json!(sphere.len())))
}

const SPHERE_EQUIV_CLAIM: &str =
    "for a,b,c,d on the unit sphere, S(0a,0b) = S(0c,0d) iff |a-b| = |c-d| or |a-b| = |c+d|";

pub fn run_sphere_equiv(fd: &FieldDesc, d: usize, budget: Budget) -> Result<ExperimentReport> {
    let r = census::sphere_equiv_check(fd, d, budget)?;
    let trial = TrialOutcome::new(0, 0, r.sphere_points, r.violation_count as u64, Relation::Eq, 0)
        .with("quadruples_checked", json!(r.quadruples_checked.to_string()))
        .with("undefined_excluded", json!(r.undefined_excluded.to_string()))
        .with("violations", json!(r.violations));
    let mut params = Params::new(fd, d, 0, 1);
    params.n_points = Some(r.sphere_points);
    Ok(ExperimentReport::assemble("sphere-equiv", SPHERE_EQUIV_CLAIM, params, vec![trial]))
}

const ISO_SEARCH_CLAIM: &str =
    "three mutually orthogonal independent isotropic vectors exist in F_q^d exactly when the form sum x_i^2 has Witt index >= 3 (none in F_3^6)";

/// Witt index of `x_1^2 + ... + x_d^2` over F_q, q odd.
pub fn witt_index(fd: &FieldDesc, d: usize) -> usize {
    if d % 2 == 1 {
        return (d - 1) / 2;
    }
    // even d: hyperbolic iff (-1)^(d/2) times the discriminant 1 is a square
    let sign = if (d / 2).is_multiple_of(2) { fd.one() } else { fd.minus_one() };
    if fd.is_square(sign) {
        d / 2
    } else {
        d / 2 - 1
    }
}

/// Exhaustive triple search, checked against the Witt index and, where a
/// family of at least three vectors can be built, against that family.
pub fn run_iso_search(fd: &FieldDesc, d: usize, budget: Budget) -> Result<ExperimentReport> {
    let found = census::search_iso_triple(fd, d, budget)?;
    let expected = witt_index(fd, d) >= 3;
    let family = construct::iso_family(fd, d).ok().filter(|f| f.len() >= 3);
    let consistent = family.is_none() || found.is_some();
    let trial = TrialOutcome::new(0, 0, 0, found.is_some() as u64, Relation::Eq, expected as u64)
        .with("found", json!(found.as_ref().map(|f| f.vectors().iter().map(|v| v.to_string()).collect::<Vec<_>>())))
        .with("construct_family_size", json!(family.as_ref().map(|f| f.len())))
        .also(consistent);
    let params = Params::new(fd, d, 0, 1);
    Ok(ExperimentReport::assemble("iso-search", ISO_SEARCH_CLAIM, params, vec![trial])
        .summarize("witt_index", json!(witt_index(fd, d))))
}

const PROPERTIES_CLAIM: &str = "spread is symmetric, invariant under scaling each arm and under rigid motions, and equals the 2-spread";

/// Randomized property suite over dimensions 2..=4 (cycled by case index).
/// One trial per property; `measured` is its failure count.
pub fn run_spread_properties(fd: &FieldDesc, cases: usize, seed: u64) -> Result<ExperimentReport> {
    const NAMES: [&str; 4] = ["symmetry", "scaling", "rigid_motion", "k2_consistency"];
    let tallies = (0..cases)
        .into_par_iter()
        .map(|i| -> Result<([u64; 4], u64)> {
            let s = trial_seed(seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let d = 2 + i % 3;
            let a = geom::random_vector(fd, d, &mut rng);
            let b = geom::random_vector(fd, d, &mut rng);
            let c = geom::random_vector(fd, d, &mut rng);
            let base = geom::spread(fd, &a, &b, &c)?;
            let nonzero = |rng: &mut ChaCha8Rng| fd.elem(rng.gen_range(1..fd.q() as u64)).unwrap();
            let (r, t) = (nonzero(&mut rng), nonzero(&mut rng));
            let m = geom::random_orthogonal(fd, d, rng.gen());
            let z = geom::random_vector(fd, d, &mut rng);
            let motion = |x: &FVector| -> Result<FVector> { Ok(m.apply(fd, x)?.add(fd, &z)) };

            let scaled_b = a.add(fd, &b.sub(fd, &a).scale(fd, r));
            let scaled_c = a.add(fd, &c.sub(fd, &a).scale(fd, t));
            let ok = [
                geom::spread(fd, &a, &c, &b)? == base,
                geom::spread(fd, &a, &scaled_b, &scaled_c)? == base,
                geom::spread(fd, &motion(&a)?, &motion(&b)?, &motion(&c)?)? == base,
                geom::k_spread(fd, &[a.clone(), b.clone(), c.clone()])? == base,
            ];
            Ok((ok.map(|x| !x as u64), (!base.is_defined()) as u64))
        })
        .try_reduce(
            || ([0; 4], 0),
            |(f1, u1), (f2, u2)| Ok(([f1[0] + f2[0], f1[1] + f2[1], f1[2] + f2[2], f1[3] + f2[3]], u1 + u2)),
        )?;
    let (failures, undefined) = tallies;
    let per_trial = NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            TrialOutcome::new(i, seed, 3, failures[i], Relation::Eq, 0).with("property", json!(name))
        })
        .collect();
    let mut params = Params::new(fd, 0, seed, cases);
    params.mode = Some("d cycles 2,3,4".into());
    Ok(ExperimentReport::assemble("properties", PROPERTIES_CLAIM, params, per_trial)
        .summarize("undefined_cases", json!(undefined)))
}

fn field(p: u64, r: u32) -> FieldDesc {
    FieldDesc::new(p, r).expect("fixed suite fields are valid")
}

/// Every experiment configuration of the desk-scale acceptance suite.
pub fn run_all(seed: u64, budget: Budget) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    for (p, d) in [(5, 2), (5, 4), (13, 2), (3, 4), (7, 4), (5, 3), (13, 3), (3, 5)] {
        out.push(run_constructions(&field(p, 1), d, budget)?);
    }
    for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        out.push(run_bode(&field(p, r), 100, seed, budget)?);
    }
    for (p, d) in [(3, 6), (5, 6), (3, 8)] {
        out.push(run_iso_search(&field(p, 1), d, budget)?);
    }
    let one = Rational::one();
    for p in [5, 7, 11] {
        let fd = field(p, 1);
        out.push(run_beck(&fd, 2, one, 100, seed, budget)?);
        let plane = PointSet::new(fd.clone(), 2, geom::all_points(&fd, 2, budget)?)?;
        out.push(run_beck_on(&plane, one, budget)?);
    }
    out.push(run_projection(&field(5, 1), 4, 2, 25, 200, seed, budget)?);
    out.push(run_projection(&field(5, 1), 4, 4, 25, 200, seed, budget)?);
    for (p, d) in [(5, 2), (7, 2), (5, 3), (7, 3)] {
        out.push(run_sphere_equiv(&field(p, 1), d, budget)?);
    }
    for (p, r) in [(5, 1), (7, 1), (3, 2), (13, 1)] {
        out.push(run_spread_properties(&field(p, r), 10_000, seed)?);
    }
    for p in [5, 7] {
        out.push(run_sphere_distance(&field(p, 1), 3, Rational::from_integer(2), 20, seed, budget)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_epsilon_values() {
        let r = |n, d| Rational::new(n, d);
        assert_eq!(alpha_epsilon(r(1, 2)), r(1, 7));
        assert_eq!(alpha_epsilon(r(1, 1)), r(1, 3));
        assert_eq!(alpha_epsilon(r(2, 1)), r(4, 7));
        assert_eq!(alpha_epsilon(r(4, 1)), r(16, 21));
        assert!((alpha_epsilon(1.0f64) - 1.0 / 3.0).abs() < 1e-15);
        let mut prev = Rational::zero();
        for n in 1..40 {
            let eps = r(n, 4);
            let a = alpha_epsilon(eps);
            assert!(a > prev && a < Rational::one() && a < eps * eps);
            prev = a;
        }
        assert!(Threshold::new(Rational::zero()).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert_eq!(parse_rational("2/3").unwrap(), Rational::new(2, 3));
        assert_eq!(parse_rational(".25").unwrap(), Rational::new(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn sizes_and_floors() {
        assert_eq!(sphere_sample_size(5, 3, Rational::from_integer(2)).unwrap(), 23);
        assert_eq!(sphere_sample_size(7, 3, Rational::from_integer(2)).unwrap(), 38);
        assert_eq!(sphere_sample_size(5, 4, Rational::from_integer(1)).unwrap(), 25);
        assert_eq!(distance_floor(5, Rational::from_integer(2)), 2);
        assert_eq!(distance_floor(7, Rational::from_integer(1)), 1);
        let th = Threshold::new(Rational::one()).unwrap();
        assert_eq!(beck_required(5, 2, &th).unwrap(), 9);
    }

    #[test]
    fn witt_indices() {
        let f = |p| FieldDesc::new(p, 1).unwrap();
        assert_eq!(witt_index(&f(3), 6), 2);
        assert_eq!(witt_index(&f(3), 8), 4);
        assert_eq!(witt_index(&f(5), 6), 3);
        assert_eq!(witt_index(&f(7), 2), 0);
        assert_eq!(witt_index(&f(5), 2), 1);
    }

    #[test]
    fn sampling_is_seeded() {
        let fd = FieldDesc::new(5, 1).unwrap();
        let pool = geom::all_points(&fd, 2, Budget::DEFAULT).unwrap();
        let a = sample_subset(&pool, 9, 11);
        assert_eq!(a, sample_subset(&pool, 9, 11));
        assert_ne!(a, sample_subset(&pool, 9, 12));
        assert_eq!(sample_subset(&pool, 25, 3).len(), 25);
        assert_ne!(trial_seed(0, 0), trial_seed(0, 1));
    }
}
