//! Local Weil functions, heights and proximity sums on P^M over Q.
//!
//! For a form `F` of degree `d` and a point `x` the local Weil function is the
//! max-norm expression
//!
//! ```text
//! λ_{F,v}(x) = d log||x||_v + log||F||_v - log||F(x)||_v
//! ```
//!
//! where `||x||_v` and `||F||_v` are maxima over coordinates and coefficients.
//! Points and forms are canonical (coprime integers), so at a finite place the
//! first two terms vanish and `λ_{F,p}(x) = ord_p(F(x)) log p`, which is kept
//! exactly. A closed subscheme cut out by `D_1, ..., D_r` gets `min_i λ_{D_i,v}`.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ln_biguint, ln_ratio, ord_int, Place, PrimePower, Rat};
use crate::error::{Error, Result};
use crate::proj::{HomForm, LinearForm, ProjPoint};

/// A closed subscheme given as the intersection of hypersurfaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubschemeSpec {
    pub label: String,
    components: Vec<HomForm>,
}

impl SubschemeSpec {
    /// Components are sorted by their serialized form so that equal component
    /// sets compare equal regardless of input order.
    pub fn new(label: impl Into<String>, mut components: Vec<HomForm>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::arg("a subscheme needs at least one component"));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::arg("subscheme components live on different spaces"));
        }
        components.sort_by_cached_key(|c| serde_json::to_string(c).unwrap_or_default());
        Ok(SubschemeSpec {
            label: label.into(),
            components,
        })
    }

    pub fn components(&self) -> &[HomForm] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// The scheme-theoretic intersection `self ∩ other`.
    pub fn intersect(&self, other: &SubschemeSpec) -> Result<SubschemeSpec> {
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        SubschemeSpec::new(format!("({})∩({})", self.label, other.label), comps)
    }
}

impl<'de> Deserialize<'de> for SubschemeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(default)]
            label: String,
            components: Vec<HomForm>,
        }
        let r = Repr::deserialize(d)?;
        SubschemeSpec::new(r.label, r.components).map_err(serde::de::Error::custom)
    }
}

/// Anything a Weil function can be attached to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Linear(LinearForm),
    Form(HomForm),
    Subscheme(SubschemeSpec),
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Linear(l) => l.dim(),
            Target::Form(f) => f.dim(),
            Target::Subscheme(s) => s.dim(),
        }
    }

    pub fn as_linear(&self) -> Option<LinearForm> {
        match self {
            Target::Linear(l) => Some(l.clone()),
            Target::Form(f) => f.as_linear(),
            Target::Subscheme(s) if s.components.len() == 1 => s.components[0].as_linear(),
            Target::Subscheme(_) => None,
        }
    }

    /// Defining forms (one for a divisor, several for a subscheme).
    pub fn components(&self) -> Vec<HomForm> {
        match self {
            Target::Linear(l) => vec![l.to_hom()],
            Target::Form(f) => vec![f.clone()],
            Target::Subscheme(s) => s.components.clone(),
        }
    }

    /// Whether `p` lies on the zero locus of any defining form.
    pub fn touches(&self, p: &ProjPoint) -> bool {
        self.components()
            .iter()
            .any(|c| c.evaluate(p).map(|v| v.is_zero()).unwrap_or(true))
    }

    pub fn weil(&self, p: &ProjPoint, v: Place, mode: MinMode) -> Result<WeilValue> {
        match self {
            Target::Linear(l) => weil_hyperplane(p, l, v),
            Target::Form(f) => weil_divisor(p, f, v),
            Target::Subscheme(s) => weil_subscheme_with(p, s, v, mode),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Linear(l) => write!(f, "{l}"),
            Target::Form(h) => write!(f, "{h}"),
            Target::Subscheme(s) if !s.label.is_empty() => f.write_str(&s.label),
            Target::Subscheme(s) => {
                let parts: Vec<String> = s.components.iter().map(|c| format!("({c})")).collect();
                f.write_str(&parts.join("∩"))
            }
        }
    }
}

/// How [`weil_subscheme`] treats a point on some but not all components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinMode {
    /// Reject any point on any component.
    Strict,
    /// Drop components vanishing at the point from the minimum; reject only
    /// points on every component.
    #[default]
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilValue {
    pub value: f64,
    pub place: Place,
    pub subject: String,
    pub point: ProjPoint,
    /// At a finite place, `value = exponent * log(prime)` exactly.
    pub exact: Option<PrimePower>,
}

fn form_weil(
    p: &ProjPoint,
    coeffs_max: &BigInt,
    degree: u32,
    value_at_p: &BigInt,
    v: Place,
) -> (f64, Option<PrimePower>) {
    match v {
        Place::Infinite => {
            let num = p.max_abs().pow(degree) * coeffs_max;
            (ln_ratio(&num, value_at_p), None)
        }
        Place::Finite(q) => {
            let e = ord_int(value_at_p, q).expect("nonzero value");
            let pp = PrimePower {
                prime: q.get(),
                exponent: e,
            };
            (pp.ln(), Some(pp))
        }
    }
}

pub fn weil_divisor(p: &ProjPoint, f: &HomForm, v: Place) -> Result<WeilValue> {
    let val = f.evaluate(p)?;
    if val.is_zero() {
        return Err(Error::support(f.to_string()));
    }
    let (value, exact) = form_weil(p, &f.max_abs_coeff(), f.degree(), &val, v);
    Ok(WeilValue {
        value,
        place: v,
        subject: f.to_string(),
        point: p.clone(),
        exact,
    })
}

pub fn weil_hyperplane(p: &ProjPoint, l: &LinearForm, v: Place) -> Result<WeilValue> {
    let val = l.evaluate(p)?;
    if val.is_zero() {
        return Err(Error::support(l.to_string()));
    }
    let max = l.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let (value, exact) = form_weil(p, &max, 1, &val, v);
    Ok(WeilValue {
        value,
        place: v,
        subject: l.to_string(),
        point: p.clone(),
        exact,
    })
}

/// `min_i λ_{D_i,v}(P)` in the default lenient mode.
pub fn weil_subscheme(p: &ProjPoint, y: &SubschemeSpec, v: Place) -> Result<WeilValue> {
    weil_subscheme_with(p, y, v, MinMode::default())
}

pub fn weil_subscheme_with(
    p: &ProjPoint,
    y: &SubschemeSpec,
    v: Place,
    mode: MinMode,
) -> Result<WeilValue> {
    let mut best: Option<WeilValue> = None;
    for c in &y.components {
        let w = match weil_divisor(p, c, v) {
            Ok(w) => w,
            Err(Error::Support { subject }) => match mode {
                MinMode::Strict => {
                    return Err(Error::support(format!("component {subject} of {}", y.label)))
                }
                MinMode::Lenient => continue,
            },
            Err(e) => return Err(e),
        };
        let better = match (&best, &w.exact) {
            (None, _) => true,
            (Some(b), Some(e)) => e.exponent < b.exact.map_or(i64::MAX, |x| x.exponent),
            (Some(b), None) => w.value < b.value,
        };
        if better {
            best = Some(w);
        }
    }
    let mut w = best.ok_or_else(|| {
        Error::support(format!("every component of {}", Target::Subscheme(y.clone())))
    })?;
    w.subject = Target::Subscheme(y.clone()).to_string();
    Ok(w)
}

/// `h(P) = log max_i |x_i|` for canonical coordinates.
pub fn height(p: &ProjPoint) -> f64 {
    ln_biguint(p.max_abs().magnitude())
}

/// Height of raw rational coordinates (normalized first).
pub fn height_of(raw: &[Rat]) -> Result<f64> {
    Ok(height(&ProjPoint::new(raw)?))
}

/// `h_{dA}(P) = d h(P)`.
pub fn height_scaled(p: &ProjPoint, d: &Rat) -> Result<f64> {
    if !d.is_positive() {
        return Err(Error::arg(format!("height scale {d} must be positive")));
    }
    Ok(d.to_f64() * height(p))
}

/// Height as a sum over places of `log max_i ||x_i||_v`. Returns the
/// archimedean term and the finite-place exponents (all zero for canonical
/// coordinates); used to cross-check [`height`].
pub fn height_by_places(p: &ProjPoint) -> (f64, Vec<PrimePower>) {
    let arch = height(p);
    let mut finite = Vec::new();
    let nonzero: Vec<&BigInt> = p.coords().iter().filter(|x| !x.is_zero()).collect();
    let mut primes: Vec<u64> = Vec::new();
    for x in &nonzero {
        if let Ok(f) = crate::arith::factor_biguint(x.magnitude()) {
            primes.extend(f.into_iter().map(|(q, _)| q));
        }
    }
    primes.sort_unstable();
    primes.dedup();
    for q in primes {
        let q = crate::arith::Prime::new(q).expect("factor is prime");
        let min = nonzero
            .iter()
            .map(|x| ord_int(x, q).expect("nonzero"))
            .min()
            .unwrap_or(0);
        // log max_i ||x_i||_q = -min_i ord_q(x_i) log q
        finite.push(PrimePower {
            prime: q.get(),
            exponent: -min,
        });
    }
    (arch, finite)
}

/// `m_S(P, target) = sum_{v in S} λ_{target,v}(P)`.
pub fn proximity_sum(p: &ProjPoint, target: &Target, places: &[Place]) -> Result<f64> {
    proximity_sum_with(p, target, places, MinMode::default())
}

pub fn proximity_sum_with(
    p: &ProjPoint,
    target: &Target,
    places: &[Place],
    mode: MinMode,
) -> Result<f64> {
    let mut seen = places.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != places.len() {
        return Err(Error::arg("duplicate places in S"));
    }
    let mut total = 0.0;
    for &v in places {
        total += target.weil(p, v, mode)?.value;
    }
    Ok(total)
}

/// Input of a batch evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchManifest {
    pub points: Vec<ProjPoint>,
    pub targets: Vec<Target>,
    pub places: Vec<Place>,
    #[serde(default)]
    pub mode: MinMode,
}

/// Evaluates every (point, target, place) triple and writes CSV rows
/// `point,target,place,value,exact_ledger`. Points on a support get value
/// `inf` and ledger `support`.
pub fn write_batch_csv<W: Write>(manifest: &BatchManifest, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point", "target", "place", "value", "exact_ledger"])?;
    for p in &manifest.points {
        for t in &manifest.targets {
            for &v in &manifest.places {
                let (value, ledger) = match t.weil(p, v, manifest.mode) {
                    Ok(wv) => (
                        wv.value.to_string(),
                        wv.exact
                            .map(|e| format!("{}*log({})", e.exponent, e.prime))
                            .unwrap_or_default(),
                    ),
                    Err(Error::Support { .. }) => ("inf".into(), "support".into()),
                    Err(e) => return Err(e),
                };
                w.write_record([p.to_string(), t.to_string(), v.to_string(), value, ledger])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
