//! Desk-scale experiments: seeded samples of rational points, weighted Weil
//! sums against the theorem bounds, pointwise chain checks and candidate
//! exceptional spans.

mod chain;
mod sample;
mod scan;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Place, Rat};
use crate::error::{Error, Result};
use crate::position::{check_general, check_subgeneral, PositionReport};
use crate::proj::{LinearForm, LinearSubvariety, ProjPoint};
use crate::seshadri::seshadri_constant;
use crate::weil::{height, MinMode, Target};

pub use chain::{chain_check, ChainChecker, ChainRecord, ExactChain};
pub use sample::{on_subspace, sample_points, Sample, MAX_WINDOW};
pub use scan::{candidate_is_sound, exceptional_scan, Candidate};

/// Targets attached to one place of S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceArrangement {
    pub place: Place,
    pub targets: Vec<Target>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordMode {
    #[default]
    All,
    Violators,
}

fn default_fraction() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ambient_dim: usize,
    /// Equations of X in P^M; empty means X = P^M.
    #[serde(default)]
    pub subvariety: Vec<LinearForm>,
    pub arrangements: Vec<PlaceArrangement>,
    pub l: usize,
    pub epsilon: Rat,
    pub height_window: [f64; 2],
    pub sample_count: usize,
    pub seed: u64,
    /// Position of non-linear targets is taken on trust when set.
    #[serde(default)]
    pub assert_position: bool,
    /// Linear subspaces (lists of equations) whose points are not sampled.
    #[serde(default)]
    pub exclude: Vec<Vec<LinearForm>>,
    /// Smallest share of all violators a fitted span must contain.
    #[serde(default = "default_fraction")]
    pub candidate_fraction: f64,
    #[serde(default)]
    pub records: RecordMode,
    #[serde(default)]
    pub min_mode: MinMode,
}

impl ExperimentConfig {
    pub fn subvariety(&self) -> Result<LinearSubvariety> {
        LinearSubvariety::new(self.ambient_dim, self.subvariety.clone())
    }

    pub fn places(&self) -> Vec<Place> {
        self.arrangements.iter().map(|a| a.place).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `(l-n+1)(n+1) + ε` with l-subgeneral targets.
    Main,
    /// `n + 1 + ε` with n+1 targets in general position per place.
    Baseline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionRecord {
    pub place: Place,
    /// "verified" for all-linear arrangements, otherwise "asserted".
    pub status: String,
    pub report: Option<PositionReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub prime: u64,
    /// The finite-place part of the weighted sum is `coefficient * log(prime)`.
    pub coefficient: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub value: f64,
    pub archimedean: f64,
    pub finite: Vec<LedgerEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: ProjPoint,
    pub height: f64,
    pub weighted_sum: f64,
    pub finite_ledger: Vec<LedgerEntry>,
    /// `weighted_sum / height`; absent at height 0.
    pub ratio: Option<f64>,
    pub violator: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub point: ProjPoint,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub requested: usize,
    pub drawn: usize,
    pub exhaustive: bool,
    pub partial: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub places: Vec<Place>,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    /// Points on the zero locus of some certificate output.
    pub skipped: usize,
    pub certificates: usize,
    pub min_slack: Option<f64>,
    /// Up to 20 failing records.
    pub failures: Vec<ChainRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub n: usize,
    pub l: usize,
    pub epsilon: Rat,
    pub bound: Rat,
    pub bound_value: f64,
    /// Informational: the δ the proof would budget for this (l, n, ε).
    pub delta: Rat,
    pub positions: Vec<PositionRecord>,
    pub sample: SampleSummary,
    pub evaluated: usize,
    pub height_zero: usize,
    pub skipped: Vec<SkippedPoint>,
    pub max_ratio: Option<f64>,
    pub violator_count: usize,
    pub violators: Vec<ProjPoint>,
    pub exceptional_candidates: Vec<Candidate>,
    pub chain_check: ChainSummary,
    pub records: Vec<PointRecord>,
    pub config: ExperimentConfig,
}

impl DefectReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-point table: point, height, weighted_sum, ratio, violator.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["point", "height", "weighted_sum", "ratio", "violator"])?;
        for r in &self.records {
            w.write_record([
                r.point.to_string(),
                r.height.to_string(),
                r.weighted_sum.to_string(),
                r.ratio.map(|x| x.to_string()).unwrap_or_default(),
                r.violator.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A target with its Seshadri weight.
struct Weighted {
    target: Target,
    weight: Rat,
}

struct Prepared {
    arrangements: Vec<(Place, Vec<Weighted>)>,
    mode: MinMode,
}

impl Prepared {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let mut arrangements = Vec::new();
        for a in &cfg.arrangements {
            let mut ws = Vec::new();
            for t in &a.targets {
                ws.push(Weighted {
                    weight: seshadri_constant(t)?.value,
                    target: t.clone(),
                });
            }
            arrangements.push((a.place, ws));
        }
        Ok(Prepared {
            arrangements,
            mode: cfg.min_mode,
        })
    }

    fn defect(&self, p: &ProjPoint) -> Result<Defect> {
        let mut arch = 0.0;
        let mut ledger: BTreeMap<u64, Rat> = BTreeMap::new();
        for (v, ws) in &self.arrangements {
            for w in ws {
                let val = w.target.weil(p, *v, self.mode)?;
                match val.exact {
                    Some(e) => {
                        let c = ledger.entry(e.prime).or_insert_with(Rat::zero);
                        *c = &*c + &(&w.weight * &Rat::from_integer(e.exponent));
                    }
                    None => arch += w.weight.to_f64() * val.value,
                }
            }
        }
        let finite: Vec<LedgerEntry> = ledger
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(prime, coefficient)| LedgerEntry { prime, coefficient })
            .collect();
        let value = arch
            + finite
                .iter()
                .map(|e| e.coefficient.to_f64() * (e.prime as f64).ln())
                .sum::<f64>();
        Ok(Defect {
            value,
            archimedean: arch,
            finite,
        })
    }
}

/// `sum_{v in S} sum_j ε_{Y_j}(O(1)) λ_{Y_j,v}(P)` with Seshadri weights.
pub fn weighted_defect(p: &ProjPoint, cfg: &ExperimentConfig) -> Result<Defect> {
    Prepared::new(cfg)?.defect(p)
}

/// The largest `δ = 1/2^k` with `δ(l-n+1) + δ(l-n+1)(n+1+δ) < ε`. Starts at
/// k = 1 and keeps halving past k = 40 if a tiny ε requires it.
pub fn delta_budget(l: usize, n: usize, epsilon: &Rat) -> Result<Rat> {
    if !epsilon.is_positive() {
        return Err(Error::arg(format!("epsilon = {epsilon} must be positive")));
    }
    if n < 1 || l < n {
        return Err(Error::arg(format!("need l >= n >= 1, got l = {l}, n = {n}")));
    }
    let a = Rat::from_integer((l - n + 1) as i64);
    let n1 = Rat::from_integer((n + 1) as i64);
    let mut delta = Rat::from_ratio(1, 2);
    loop {
        if delta_inequality(&delta, &a, &n1) < *epsilon {
            return Ok(delta);
        }
        delta = &delta / &Rat::from_integer(2);
    }
}

fn delta_inequality(delta: &Rat, a: &Rat, n1: &Rat) -> Rat {
    let da = delta * a;
    &da + &(&da * &(n1 + delta))
}

fn validate(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(LinearSubvariety, Vec<PositionRecord>)> {
    let x = cfg.subvariety()?;
    let n = x.dim();
    if !cfg.epsilon.is_positive() {
        return Err(Error::arg(format!("epsilon = {} must be positive", cfg.epsilon)));
    }
    if cfg.l < n {
        return Err(Error::arg(format!("l = {} is below dim X = {n}", cfg.l)));
    }
    let [h_min, h_max] = cfg.height_window;
    if !(h_min < h_max) {
        return Err(Error::arg(format!("height window [{h_min}, {h_max}] is empty")));
    }
    if !(0.0..=1.0).contains(&cfg.candidate_fraction) {
        return Err(Error::arg("candidate_fraction must lie in [0, 1]"));
    }
    let mut places = cfg.places();
    places.sort();
    places.dedup();
    if places.len() != cfg.arrangements.len() {
        return Err(Error::arg("duplicate places in S"));
    }
    for f in cfg.exclude.iter().flatten() {
        if f.dim() != cfg.ambient_dim {
            return Err(Error::arg(format!("excluded equation {f} is not on P^{}", cfg.ambient_dim)));
        }
    }

    let mut positions = Vec::new();
    for a in &cfg.arrangements {
        if let Some(t) = a.targets.iter().find(|t| t.dim() != cfg.ambient_dim) {
            return Err(Error::arg(format!("target {t} is not on P^{}", cfg.ambient_dim)));
        }
        if a.targets.is_empty() {
            return Err(Error::arg(format!("no targets at place {}", a.place)));
        }
        if kind == ExperimentKind::Baseline && a.targets.len() != n + 1 {
            return Err(Error::arg(format!(
                "baseline needs exactly n + 1 = {} targets at place {}, got {}",
                n + 1,
                a.place,
                a.targets.len()
            )));
        }
        let linear: Option<Vec<LinearForm>> = a
            .targets
            .iter()
            .map(|t| match t {
                Target::Linear(l) => Some(l.clone()),
                Target::Form(f) => f.as_linear(),
                Target::Subscheme(_) => None,
            })
            .collect();
        match linear {
            Some(forms) => {
                let report = match kind {
                    ExperimentKind::Main => check_subgeneral(&forms, &x, cfg.l)?,
                    ExperimentKind::Baseline => check_general(&forms, &x)?,
                };
                if !report.verdict {
                    return Err(Error::Position(Box::new(report)));
                }
                positions.push(PositionRecord {
                    place: a.place,
                    status: "verified".into(),
                    report: Some(report),
                });
            }
            None if cfg.assert_position => positions.push(PositionRecord {
                place: a.place,
                status: "asserted".into(),
                report: None,
            }),
            None => {
                return Err(Error::arg(format!(
                    "targets at place {} are not all hyperplanes; set assert_position to take \
                     their position on trust",
                    a.place
                )))
            }
        }
    }
    Ok((x, positions))
}

/// Checks the Main Theorem bound `(l-n+1)(n+1) + ε` on a seeded sample.
pub fn run_main_experiment(cfg: &ExperimentConfig) -> Result<DefectReport> {
    run(cfg, ExperimentKind::Main)
}

/// Checks the baseline bound `n + 1 + ε` for n+1 targets per place in
/// general position, weighted by `1/deg`.
pub fn run_evertse_ferretti_baseline(cfg: &ExperimentConfig) -> Result<DefectReport> {
    run(cfg, ExperimentKind::Baseline)
}

fn run(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<DefectReport> {
    let (x, positions) = validate(cfg, kind)?;
    let n = x.dim();
    let l = match kind {
        ExperimentKind::Main => cfg.l,
        ExperimentKind::Baseline => n,
    };
    let bound = &Rat::from_integer(((l - n + 1) * (n + 1)) as i64) + &cfg.epsilon;
    let bound_value = bound.to_f64();
    let delta = delta_budget(l, n, &cfg.epsilon)?;
    let prepared = Prepared::new(cfg)?;

    let supports: Vec<Target> = cfg
        .arrangements
        .iter()
        .flat_map(|a| a.targets.iter().cloned())
        .collect();
    let [h_min, h_max] = cfg.height_window;
    let sample = sample_points(&x, h_min, h_max, cfg.sample_count, cfg.seed, &supports, &cfg.exclude)?;

    let evaluated: Vec<(ProjPoint, Result<Defect>)> = sample
        .points
        .par_iter()
        .map(|p| (p.clone(), prepared.defect(p)))
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut height_zero = 0;
    for (p, d) in evaluated {
        let d = match d {
            Ok(d) => d,
            Err(e @ Error::Support { .. }) => {
                skipped.push(SkippedPoint {
                    point: p,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let h = height(&p);
        let ratio = if h > 0.0 {
            Some(d.value / h)
        } else {
            height_zero += 1;
            None
        };
        records.push(PointRecord {
            violator: ratio.is_some_and(|r| r > bound_value),
            point: p,
            height: h,
            weighted_sum: d.value,
            finite_ledger: d.finite,
            ratio,
        });
    }

    let violators: Vec<ProjPoint> = records
        .iter()
        .filter(|r| r.violator)
        .map(|r| r.point.clone())
        .collect();
    let max_ratio = records
        .iter()
        .filter_map(|r| r.ratio)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let exceptional_candidates = exceptional_scan(&violators, n, cfg.candidate_fraction);

    let chain = match kind {
        ExperimentKind::Main => run_chain_checks(cfg, &x, &records)?,
        ExperimentKind::Baseline => ChainSummary::default(),
    };

    let evaluated = records.len();
    if cfg.records == RecordMode::Violators {
        records.retain(|r| r.violator);
    }
    Ok(DefectReport {
        kind,
        seed: cfg.seed,
        n,
        l,
        epsilon: cfg.epsilon.clone(),
        bound,
        bound_value,
        delta,
        positions,
        sample: SampleSummary {
            requested: cfg.sample_count,
            drawn: sample.points.len(),
            exhaustive: sample.exhaustive,
            partial: sample.partial,
        },
        evaluated,
        height_zero,
        skipped,
        max_ratio,
        violator_count: violators.len(),
        violators,
        exceptional_candidates,
        chain_check: chain,
        records,
        config: cfg.clone(),
    })
}

/// Chain checks at every place whose arrangement is `l + 1` hyperplanes.
fn run_chain_checks(
    cfg: &ExperimentConfig,
    x: &LinearSubvariety,
    records: &[PointRecord],
) -> Result<ChainSummary> {
    let mut summary = ChainSummary::default();
    for a in &cfg.arrangements {
        let forms: Option<Vec<LinearForm>> = a.targets.iter().map(|t| t.as_linear()).collect();
        let Some(forms) = forms.filter(|f| f.len() == cfg.l + 1) else {
            continue;
        };
        if forms.iter().any(|f| x.annihilates(f)) {
            continue;
        }
        summary.places.push(a.place);
        let checker = ChainChecker::new(&forms, x)?;
        let results: Vec<Result<ChainRecord>> = records
            .par_iter()
            .map(|r| checker.check(&r.point, a.place))
            .collect();
        for res in results {
            match res {
                Ok(rec) => {
                    summary.checked += 1;
                    summary.min_slack = Some(summary.min_slack.map_or(rec.slack, |m| m.min(rec.slack)));
                    if rec.pass {
                        summary.passed += 1;
                    } else {
                        summary.failed += 1;
                        if summary.failures.len() < 20 {
                            summary.failures.push(rec);
                        }
                    }
                }
                Err(Error::Domain(_)) => summary.skipped += 1,
                Err(e) => return Err(e),
            }
        }
        summary.certificates += checker.certificates_built();
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(v: &[i64]) -> LinearForm {
        LinearForm::from_ints(v).unwrap()
    }

    fn pt(v: &[i64]) -> ProjPoint {
        ProjPoint::from_ints(v).unwrap()
    }

    fn config(m: usize, l: usize, arrangements: Vec<PlaceArrangement>) -> ExperimentConfig {
        ExperimentConfig {
            ambient_dim: m,
            subvariety: vec![],
            arrangements,
            l,
            epsilon: Rat::one(),
            height_window: [0.0, 20f64.ln()],
            sample_count: 10_000,
            seed: 1,
            assert_position: false,
            exclude: vec![],
            candidate_fraction: 0.05,
            records: RecordMode::All,
            min_mode: MinMode::Lenient,
        }
    }

    fn at(place: Place, forms: &[&[i64]]) -> PlaceArrangement {
        PlaceArrangement {
            place,
            targets: forms.iter().map(|f| Target::Linear(lin(f))).collect(),
        }
    }

    #[test]
    fn defect_examples() {
        let cfg = config(1, 1, vec![at(Place::Infinite, &[&[1, 0], &[0, 1]])]);
        let d = weighted_defect(&pt(&[1, 1000]), &cfg).unwrap();
        assert!((d.value - 1000f64.ln()).abs() < 1e-12);

        let empty = config(1, 1, vec![]);
        assert_eq!(weighted_defect(&pt(&[3, 4]), &empty).unwrap().value, 0.0);

        let cfg = config(
            2,
            3,
            vec![at(Place::Infinite, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]])],
        );
        // only x0 + x1 + x2 contributes: log(1 * 1 / 3)
        let d = weighted_defect(&pt(&[1, 1, 1]), &cfg).unwrap();
        assert!((d.value + 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn finite_ledger_is_exact() {
        let two = Place::finite(2).unwrap();
        let cfg = config(1, 1, vec![at(two, &[&[1, 0], &[0, 1]])]);
        let d = weighted_defect(&pt(&[8, 3]), &cfg).unwrap();
        assert_eq!(
            d.finite,
            vec![LedgerEntry {
                prime: 2,
                coefficient: Rat::from_integer(3)
            }]
        );
        assert_eq!(d.archimedean, 0.0);
    }

    #[test]
    fn p1_identity_never_violates() {
        let cfg = config(
            1,
            1,
            vec![
                at(Place::Infinite, &[&[1, 0], &[0, 1]]),
                at(Place::finite(2).unwrap(), &[&[1, 0], &[0, 1]]),
            ],
        );
        let r = run_evertse_ferretti_baseline(&cfg).unwrap();
        assert!(r.sample.exhaustive);
        assert_eq!(r.violator_count, 0);
        assert_eq!(r.bound, Rat::from_integer(3));
        // [1:1] and [1:-1] have height 0
        assert_eq!(r.height_zero, 2);
        for rec in &r.records {
            if let Some(ratio) = rec.ratio {
                assert!(ratio <= 2.0 + 1e-12);
                assert!((ratio - rec.weighted_sum / rec.height).abs() < 1e-12);
            }
        }
        let main = run_main_experiment(&cfg).unwrap();
        assert_eq!(main.chain_check.failed, 0);
        assert_eq!(main.chain_check.checked, 2 * main.evaluated);
    }

    #[test]
    fn position_failure_rejects_config() {
        let cfg = config(2, 2, vec![at(Place::Infinite, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])]);
        assert!(matches!(run_main_experiment(&cfg), Err(Error::Position(_))));
    }

    #[test]
    fn duplicate_places_and_bad_epsilon_rejected() {
        let a = at(Place::Infinite, &[&[1, 0], &[0, 1]]);
        let cfg = config(1, 1, vec![a.clone(), a.clone()]);
        assert!(matches!(run_main_experiment(&cfg), Err(Error::Argument(_))));
        let mut cfg = config(1, 1, vec![a]);
        cfg.epsilon = Rat::zero();
        assert!(matches!(run_main_experiment(&cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn nonlinear_targets_need_assertion() {
        let q = crate::proj::HomForm::from_terms(
            1,
            2,
            &[(vec![2, 0], Rat::one()), (vec![0, 2], Rat::one())],
        )
        .unwrap();
        let arr = PlaceArrangement {
            place: Place::Infinite,
            targets: vec![Target::Linear(lin(&[1, 0])), Target::Form(q)],
        };
        let mut cfg = config(1, 1, vec![arr]);
        assert!(matches!(run_evertse_ferretti_baseline(&cfg), Err(Error::Argument(_))));
        cfg.assert_position = true;
        let r = run_evertse_ferretti_baseline(&cfg).unwrap();
        assert_eq!(r.positions[0].status, "asserted");
        // weight 1/2 on the quadric: λ = log(max^2 * 1 / (a^2 + b^2)) <= 0
        let rec = r.records.iter().find(|r| r.point == pt(&[1, 7])).unwrap();
        let expect = 7f64.ln() + 0.5 * (49.0f64 / 50.0).ln();
        assert!((rec.weighted_sum - expect).abs() < 1e-12);
    }

    #[test]
    fn empty_sample_gives_empty_report() {
        let mut cfg = config(1, 1, vec![at(Place::Infinite, &[&[1, 0], &[0, 1]])]);
        cfg.sample_count = 0;
        let r = run_evertse_ferretti_baseline(&cfg).unwrap();
        assert!(r.records.is_empty() && r.violators.is_empty());
    }

    #[test]
    fn violators_match_ratio_and_shrink_with_epsilon() {
        // a deliberately loose arrangement so that some points violate a
        // small bound: many repeated places on P^1 near 0
        let places = [2u64, 3, 5, 7, 11];
        let mut arr = vec![at(Place::Infinite, &[&[1, 0], &[0, 1], &[1, -1]])];
        for p in places {
            arr.push(at(Place::finite(p).unwrap(), &[&[1, 0], &[0, 1], &[1, -1]]));
        }
        let mut cfg = config(1, 2, arr);
        cfg.height_window = [0.0, 30f64.ln()];
        let mut prev = usize::MAX;
        for eps in [Rat::from_ratio(1, 100), Rat::one(), Rat::from_integer(5)] {
            cfg.epsilon = eps;
            let r = run_main_experiment(&cfg).unwrap();
            for rec in &r.records {
                assert_eq!(rec.violator, rec.ratio.is_some_and(|x| x > r.bound_value));
            }
            assert!(r.violator_count <= prev);
            prev = r.violator_count;
            assert!(r.exceptional_candidates.iter().all(candidate_is_sound));
            assert_eq!(r.chain_check.failed, 0);
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_budget(2, 2, &Rat::one()).unwrap(), Rat::from_ratio(1, 8));
        assert_eq!(delta_budget(1, 1, &Rat::from_integer(100)).unwrap(), Rat::from_ratio(1, 2));
        assert!(delta_budget(1, 2, &Rat::one()).is_err());
        assert!(delta_budget(2, 1, &Rat::zero()).is_err());
        let tiny = Rat::new(1.into(), num_bigint::BigInt::from(10).pow(15)).unwrap();
        let d = delta_budget(3, 1, &tiny).unwrap();
        let a = Rat::from_integer(3);
        assert!(delta_inequality(&d, &a, &Rat::from_integer(2)) < tiny);
        let twice = &d * &Rat::from_integer(2);
        assert!(delta_inequality(&twice, &a, &Rat::from_integer(2)) >= tiny);
    }

    #[test]
    fn reports_are_deterministic() {
        let mut cfg = config(
            2,
            3,
            vec![
                at(Place::Infinite, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]),
                at(Place::finite(2).unwrap(), &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]),
            ],
        );
        cfg.height_window = [2.0, 5.0];
        cfg.sample_count = 300;
        let a = run_main_experiment(&cfg).unwrap().to_json().unwrap();
        let b = run_main_experiment(&cfg).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }
}
