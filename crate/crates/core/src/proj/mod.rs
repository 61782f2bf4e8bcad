//! Projective points, linear and homogeneous forms, linear subvarieties, and
//! the Veronese reduction of degree-d data to linear data.
//!
//! Points and forms are stored as coprime integer vectors whose first nonzero
//! entry is positive. With this convention the max-norm of a point or of a
//! form's coefficient vector is 1 at every finite place.

pub mod monomial;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::linalg;

fn normalize_coords(raw: &[Rat], what: &str) -> Result<(Vec<BigInt>, Rat)> {
    if raw.iter().all(Rat::is_zero) {
        return Err(Error::arg(format!("{what} has all coordinates zero")));
    }
    let v: Vec<BigRational> = raw.iter().map(|r| r.inner().clone()).collect();
    let (w, scale) = linalg::primitive(&v);
    Ok((w, Rat::from(scale)))
}

fn ints_to_rats(v: &[BigInt]) -> Vec<Rat> {
    v.iter().cloned().map(Rat::from_integer).collect()
}

fn fmt_colon(v: &[BigInt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(":")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

/// A point of P^M in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    /// Canonical representative of `[raw_0 : ... : raw_M]`.
    pub fn new(raw: &[Rat]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::arg("a projective point needs at least 2 coordinates"));
        }
        Ok(ProjPoint {
            coords: normalize_coords(raw, "point")?.0,
        })
    }

    pub fn from_ints(raw: &[i64]) -> Result<Self> {
        let r: Vec<Rat> = raw.iter().map(|&x| Rat::from_integer(x)).collect();
        Self::new(&r)
    }

    pub fn from_bigints(raw: Vec<BigInt>) -> Result<Self> {
        Self::new(&ints_to_rats(&raw))
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Ambient dimension M.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `max_i |x_i|` of the canonical coordinates.
    pub fn max_abs(&self) -> BigInt {
        self.coords.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_colon(&self.coords, f)
    }
}

/// `normalize_point` from raw rational coordinates.
pub fn normalize_point(raw: &[Rat]) -> Result<ProjPoint> {
    ProjPoint::new(raw)
}

/// A nonzero linear form `a_0 x_0 + ... + a_M x_M`, normalized.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    coeffs: Vec<BigInt>,
}

impl LinearForm {
    pub fn new(raw: &[Rat]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::arg("a linear form needs at least 2 coefficients"));
        }
        Ok(LinearForm {
            coeffs: normalize_coords(raw, "linear form")?.0,
        })
    }

    /// Normalizes and also returns `s` with `raw = s * normalized`.
    pub fn new_scaled(raw: &[Rat]) -> Result<(Self, Rat)> {
        let (coeffs, s) = normalize_coords(raw, "linear form")?;
        Ok((LinearForm { coeffs }, s))
    }

    pub fn from_ints(raw: &[i64]) -> Result<Self> {
        let r: Vec<Rat> = raw.iter().map(|&x| Rat::from_integer(x)).collect();
        Self::new(&r)
    }

    pub fn from_bigints(raw: Vec<BigInt>) -> Result<Self> {
        Self::new(&ints_to_rats(&raw))
    }

    /// The coordinate form `x_i` on P^M.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); dim + 1];
        coeffs[i] = BigInt::from(1);
        LinearForm { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn evaluate(&self, p: &ProjPoint) -> Result<BigInt> {
        if p.dim() != self.dim() {
            return Err(Error::arg(format!(
                "dimension mismatch: form on P^{} at point of P^{}",
                self.dim(),
                p.dim()
            )));
        }
        Ok(linalg::dot(&self.coeffs, &p.coords))
    }

    pub fn to_hom(&self) -> HomForm {
        HomForm {
            nvars: self.coeffs.len(),
            degree: 1,
            coeffs: self.coeffs.clone(),
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().enumerate().map(|(i, c)| {
            let mut e = vec![0; self.coeffs.len()];
            e[i] = 1;
            (e, c)
        }))
    }
}

fn write_poly<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (Vec<u32>, &'a BigInt)>,
) -> fmt::Result {
    let mut first = true;
    for (exps, c) in terms {
        if c.is_zero() {
            continue;
        }
        let mono: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
            .collect();
        let mono = mono.join("*");
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        if mono.is_empty() {
            write!(f, "{mag}")?;
        } else if mag == BigInt::from(1) {
            f.write_str(&mono)?;
        } else {
            write!(f, "{mag}*{mono}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// A nonzero homogeneous form of degree `d >= 1` with coprime integer
/// coefficients, stored densely in graded-lex monomial order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomForm {
    nvars: usize,
    degree: u32,
    coeffs: Vec<BigInt>,
}

impl HomForm {
    /// Builds a form on P^`dim` from `(exponents, coefficient)` terms. Repeated
    /// exponent vectors are summed.
    pub fn from_terms(dim: usize, degree: u32, terms: &[(Vec<u32>, Rat)]) -> Result<Self> {
        if degree == 0 {
            return Err(Error::arg("form degree must be at least 1"));
        }
        let nvars = dim + 1;
        let mut dense = vec![Rat::zero(); monomial::count(nvars, degree)];
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::arg(format!(
                    "exponent vector {exps:?} has {} entries, expected {nvars}",
                    exps.len()
                )));
            }
            if exps.iter().sum::<u32>() != degree {
                return Err(Error::arg(format!(
                    "monomial {exps:?} is not of degree {degree}"
                )));
            }
            let i = monomial::index(exps);
            dense[i] = &dense[i] + c;
        }
        let (coeffs, _) = normalize_coords(&dense, "homogeneous form")?;
        Ok(HomForm {
            nvars,
            degree,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.nvars - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Nonzero `(exponents, coefficient)` pairs in graded-lex order.
    pub fn terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        monomial::monomials(self.nvars, self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, c.clone()))
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// `max_j |a_j|`.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    /// Sum over variables of the degree in that variable.
    pub fn partial_degree_sum(&self) -> u32 {
        let terms = self.terms();
        (0..self.nvars)
            .map(|i| terms.iter().map(|(m, _)| m[i]).max().unwrap_or(0))
            .sum()
    }

    /// Returns the linear form when the degree is 1.
    pub fn as_linear(&self) -> Option<LinearForm> {
        (self.degree == 1).then(|| LinearForm {
            coeffs: self.coeffs.clone(),
        })
    }

    pub fn evaluate(&self, p: &ProjPoint) -> Result<BigInt> {
        if p.dim() != self.dim() {
            return Err(Error::arg(format!(
                "dimension mismatch: form on P^{} at point of P^{}",
                self.dim(),
                p.dim()
            )));
        }
        let vals = veronese_raw(p.coords(), self.degree);
        Ok(linalg::dot(&self.coeffs, &vals))
    }

    /// The product form, renormalized (by Gauss's lemma the product of
    /// primitive forms is already primitive).
    pub fn mul(&self, other: &HomForm) -> Result<HomForm> {
        if self.nvars != other.nvars {
            return Err(Error::arg("cannot multiply forms on different spaces"));
        }
        let mut terms = Vec::new();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let m: Vec<u32> = ma.iter().zip(&mb).map(|(a, b)| a + b).collect();
                terms.push((m, Rat::from_integer(&ca * &cb)));
            }
        }
        HomForm::from_terms(self.dim(), self.degree + other.degree, &terms)
    }
}

impl fmt::Display for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        write_poly(f, terms.iter().map(|(m, c)| (m.clone(), c)))
    }
}

impl From<LinearForm> for HomForm {
    fn from(l: LinearForm) -> Self {
        l.to_hom()
    }
}

/// All degree-d monomials of `coords` in graded-lex order (unnormalized).
fn veronese_raw(coords: &[BigInt], d: u32) -> Vec<BigInt> {
    let pows: Vec<Vec<BigInt>> = coords
        .iter()
        .map(|x| {
            let mut v = Vec::with_capacity(d as usize + 1);
            v.push(BigInt::from(1));
            for k in 1..=d as usize {
                let next = &v[k - 1] * x;
                v.push(next);
            }
            v
        })
        .collect();
    monomial::monomials(coords.len(), d)
        .iter()
        .map(|m| {
            m.iter()
                .enumerate()
                .fold(BigInt::from(1), |acc, (i, &e)| acc * &pows[i][e as usize])
        })
        .collect()
}

/// Image of a point under the degree-d Veronese map with the positive scalar
/// `scale` such that `raw monomial vector = scale * point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeronesePoint {
    pub point: ProjPoint,
    pub scale: Rat,
}

/// Linearization of a degree-d form: `raw coefficient vector = scale * form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeroneseForm {
    pub form: LinearForm,
    pub scale: Rat,
}

pub fn veronese_point(p: &ProjPoint, d: u32) -> Result<VeronesePoint> {
    if d == 0 {
        return Err(Error::arg("Veronese degree must be at least 1"));
    }
    let raw = ints_to_rats(&veronese_raw(p.coords(), d));
    let (coords, scale) = normalize_coords(&raw, "Veronese image")?;
    Ok(VeronesePoint {
        point: ProjPoint { coords },
        scale,
    })
}

pub fn veronese_form(f: &HomForm) -> Result<VeroneseForm> {
    let raw = ints_to_rats(&f.coeffs);
    let (coeffs, scale) = normalize_coords(&raw, "form")?;
    if coeffs.len() < 2 {
        return Err(Error::arg("Veronese image of P^0 is not a projective space"));
    }
    Ok(VeroneseForm {
        form: LinearForm { coeffs },
        scale,
    })
}

/// A linear subvariety X of P^M cut out by independent linear forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubvariety {
    ambient: usize,
    forms: Vec<LinearForm>,
}

impl LinearSubvariety {
    pub fn new(ambient: usize, forms: Vec<LinearForm>) -> Result<Self> {
        if ambient < 1 {
            return Err(Error::arg("ambient dimension must be at least 1"));
        }
        if let Some(f) = forms.iter().find(|f| f.dim() != ambient) {
            return Err(Error::arg(format!(
                "defining form {f} is not on P^{ambient}"
            )));
        }
        let rows: Vec<Vec<BigInt>> = forms.iter().map(|f| f.coeffs.clone()).collect();
        if linalg::rank(&rows) != forms.len() {
            return Err(Error::arg("defining forms are linearly dependent"));
        }
        if forms.len() >= ambient {
            return Err(Error::arg(format!(
                "{} forms in P^{ambient} leave dimension < 1",
                forms.len()
            )));
        }
        Ok(LinearSubvariety { ambient, forms })
    }

    /// P^M itself.
    pub fn whole(ambient: usize) -> Self {
        LinearSubvariety {
            ambient,
            forms: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.forms.len()
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        p.dim() == self.ambient
            && self
                .forms
                .iter()
                .all(|f| linalg::dot(&f.coeffs, &p.coords).is_zero())
    }

    /// Primitive integer vectors spanning the affine cone over X.
    pub fn cone_basis(&self) -> Vec<Vec<BigInt>> {
        let rows: Vec<Vec<BigInt>> = self.forms.iter().map(|f| f.coeffs.clone()).collect();
        if rows.is_empty() {
            return (0..=self.ambient)
                .map(|i| LinearForm::coordinate(self.ambient, i).coeffs)
                .collect();
        }
        linalg::nullspace(&rows, self.ambient + 1)
    }

    /// Whether `f` vanishes identically on X.
    pub fn annihilates(&self, f: &LinearForm) -> bool {
        let rows: Vec<Vec<BigInt>> = self.forms.iter().map(|g| g.coeffs.clone()).collect();
        linalg::in_span(&rows, &f.coeffs)
    }
}

// ---- serialization ----------------------------------------------------------

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ints_to_rats(&self.coords).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Rat>::deserialize(d)?;
        ProjPoint::new(&raw).map_err(serde::de::Error::custom)
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ints_to_rats(&self.coeffs).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Rat>::deserialize(d)?;
        LinearForm::new(&raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: Rat,
}

#[derive(Serialize, Deserialize)]
struct HomFormRepr {
    dim: usize,
    degree: u32,
    terms: Vec<TermRepr>,
}

impl Serialize for HomForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HomFormRepr {
            dim: self.dim(),
            degree: self.degree,
            terms: self
                .terms()
                .into_iter()
                .map(|(exponents, c)| TermRepr {
                    exponents,
                    coeff: Rat::from_integer(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = HomFormRepr::deserialize(d)?;
        let terms: Vec<(Vec<u32>, Rat)> =
            r.terms.into_iter().map(|t| (t.exponents, t.coeff)).collect();
        HomForm::from_terms(r.dim, r.degree, &terms).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SubvarietyRepr {
    ambient_dim: usize,
    #[serde(default)]
    forms: Vec<LinearForm>,
}

impl Serialize for LinearSubvariety {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubvarietyRepr {
            ambient_dim: self.ambient,
            forms: self.forms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearSubvariety {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SubvarietyRepr::deserialize(d)?;
        LinearSubvariety::new(r.ambient_dim, r.forms).map_err(serde::de::Error::custom)
    }
}
