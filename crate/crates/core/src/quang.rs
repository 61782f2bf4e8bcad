//! Generic linear combinations: replacing `l + 1` hyperplanes in l-subgeneral
//! position on X by `n + 1` combinations in general position on X, with a
//! certificate that can be replayed exactly.
//!
//! The first output is the first input. Output `t >= 2` is drawn from
//! `span(L_2, ..., L_{l-n+t})` while avoiding the subspace of forms vanishing
//! on `H'_1 ∩ ... ∩ H'_{t-1} ∩ X`. For linear X that intersection is a single
//! linear space, so there is exactly one subspace to avoid at each step.
//! Instead of a random element of the open set we take the first admissible
//! small-coefficient combination in a fixed enumeration order, which keeps
//! certificates reproducible and the constants `C_v` small.

use std::cmp::Ordering as CmpOrdering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ord_int, Place, Rat};
use crate::error::{Error, Result};
use crate::linalg;
use crate::position::{check_general, check_subgeneral, PositionReport};
use crate::proj::{LinearForm, LinearSubvariety, ProjPoint};

/// Largest coefficient magnitude tried by [`avoid_subspaces`].
const MAX_COEFF: i64 = 64;

/// `C_v` for one place, exact and as a log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConstant {
    pub place: Place,
    pub value: Rat,
    pub log: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationCertificate {
    pub subvariety: LinearSubvariety,
    pub l: usize,
    pub n: usize,
    pub inputs: Vec<LinearForm>,
    pub outputs: Vec<LinearForm>,
    /// Row `t` holds `c_{t,j}` with `outputs[t] = sum_j c_{t,j} inputs[j]`.
    pub coefficients: Vec<Vec<Rat>>,
    pub position: PositionReport,
    #[serde(default)]
    pub constants: Vec<ChainConstant>,
}

/// Coefficient digits in enumeration order: 0, 1, -1, 2, -2, ...
fn digit(i: usize) -> i64 {
    let k = i.div_ceil(2) as i64;
    if i % 2 == 1 {
        k
    } else {
        -k
    }
}

/// Integer coefficient vectors of length `k` with max-abs exactly `b` and a
/// positive first nonzero entry. Sparser vectors come first, then vectors
/// supported on earlier positions; within one support the order is
/// lexicographic with each coordinate ranked 1 < -1 < 2 < -2 < ...
fn candidates(k: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = raw_candidates(k, b);
    out.sort_by_cached_key(|c| {
        let support: Vec<usize> = (0..k).filter(|&i| c[i] != 0).collect();
        (support.len(), support)
    });
    out
}

fn raw_candidates(k: usize, b: i64) -> Vec<Vec<i64>> {
    let radix = 2 * b as usize + 1;
    let mut out = Vec::new();
    let mut odo = vec![0usize; k];
    loop {
        let c: Vec<i64> = odo.iter().map(|&i| digit(i)).collect();
        let max = c.iter().map(|x| x.abs()).max().unwrap_or(0);
        let lead_ok = c.iter().find(|x| **x != 0).is_some_and(|x| *x > 0);
        if max == b && lead_ok {
            out.push(c);
        }
        let Some(i) = (0..k).rev().find(|&i| odo[i] + 1 < radix) else {
            return out;
        };
        odo[i] += 1;
        for slot in odo.iter_mut().skip(i + 1) {
            *slot = 0;
        }
    }
}

/// Core of [`avoid_subspaces`] on raw vectors: returns the coefficient vector
/// and the resulting combination.
fn avoid_vectors(
    spanning: &[Vec<BigInt>],
    excluded: &[Vec<Vec<BigInt>>],
) -> Result<(Vec<i64>, Vec<BigInt>)> {
    let w_rank = linalg::rank(spanning);
    if w_rank == 0 {
        return Err(Error::Infeasible("spanning set is zero".into()));
    }
    let ex_ranks: Vec<usize> = excluded.iter().map(|e| linalg::rank(e)).collect();
    if let Some(i) = ex_ranks.iter().position(|&r| r >= w_rank) {
        return Err(Error::Infeasible(format!(
            "excluded subspace {} is not proper (rank {} vs {w_rank})",
            i + 1,
            ex_ranks[i]
        )));
    }
    let width = spanning[0].len();
    for b in 1..=MAX_COEFF {
        for c in candidates(spanning.len(), b) {
            let mut v = vec![BigInt::zero(); width];
            for (cj, w) in c.iter().zip(spanning) {
                if *cj != 0 {
                    for (vi, wi) in v.iter_mut().zip(w) {
                        *vi += wi * cj;
                    }
                }
            }
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            let hit = excluded.iter().zip(&ex_ranks).any(|(e, &r)| {
                let mut rows = e.clone();
                rows.push(v.clone());
                linalg::rank(&rows) == r
            });
            if !hit {
                return Ok((c, v));
            }
        }
    }
    Err(Error::Infeasible(format!(
        "no admissible combination with coefficients up to {MAX_COEFF}"
    )))
}

/// A form in `span(spanning)` outside every excluded subspace. Candidates are
/// tried by increasing max-abs coefficient, then by support size, then by
/// support position, sign-normalized so each line is tried once.
pub fn avoid_subspaces(
    spanning: &[LinearForm],
    excluded: &[Vec<LinearForm>],
) -> Result<LinearForm> {
    if spanning.is_empty() {
        return Err(Error::arg("empty spanning set"));
    }
    let w: Vec<Vec<BigInt>> = spanning.iter().map(|f| f.coeffs().to_vec()).collect();
    let ex: Vec<Vec<Vec<BigInt>>> = excluded
        .iter()
        .map(|e| e.iter().map(|f| f.coeffs().to_vec()).collect())
        .collect();
    let (_, v) = avoid_vectors(&w, &ex)?;
    LinearForm::from_bigints(v)
}

/// Builds `n + 1` forms in general position on X from `l + 1` forms in
/// l-subgeneral position on X.
pub fn quang_combine(
    forms: &[LinearForm],
    x: &LinearSubvariety,
) -> Result<CombinationCertificate> {
    if forms.is_empty() {
        return Err(Error::arg("empty arrangement"));
    }
    let l = forms.len() - 1;
    let n = x.dim();
    if l < n {
        return Err(Error::arg(format!(
            "need at least dim X + 1 = {} forms, got {}",
            n + 1,
            forms.len()
        )));
    }
    if let Some(j) = forms.iter().position(|f| x.annihilates(f)) {
        return Err(Error::arg(format!(
            "form {} vanishes identically on X",
            j + 1
        )));
    }
    let report = check_subgeneral(forms, x, l)?;
    if !report.verdict {
        return Err(Error::Position(Box::new(report)));
    }
    combine_validated(forms, x)
}

/// The construction of [`quang_combine`] for inputs already known to be in
/// l-subgeneral position on X (for instance a permutation of a checked
/// arrangement).
pub(crate) fn combine_validated(
    forms: &[LinearForm],
    x: &LinearSubvariety,
) -> Result<CombinationCertificate> {
    let l = forms.len() - 1;
    let n = x.dim();
    let x_rows: Vec<Vec<BigInt>> = x.forms().iter().map(|f| f.coeffs().to_vec()).collect();
    let mut outputs = vec![forms[0].clone()];
    let mut coefficients = vec![unit_row(l + 1, 0)];

    for t in 2..=n + 1 {
        // 0-based span indices 1 ..= l - n + t - 1
        let span: Vec<usize> = (1..=l - n + t - 1).collect();
        let w: Vec<Vec<BigInt>> = span.iter().map(|&j| forms[j].coeffs().to_vec()).collect();

        let mut rows: Vec<Vec<BigInt>> =
            outputs.iter().map(|f| f.coeffs().to_vec()).collect();
        rows.extend(x_rows.iter().cloned());
        let gamma = linalg::nullspace(&rows, x.ambient_dim() + 1);
        let target_dim = n as i64 - t as i64 + 1;

        let mut excluded = Vec::new();
        if gamma.len() as i64 - 1 == target_dim {
            // combinations c with sum_j c_j L_j(b) = 0 for every b in Γ
            let eval: Vec<Vec<BigInt>> = gamma
                .iter()
                .map(|b| w.iter().map(|wj| linalg::dot(wj, b)).collect())
                .collect();
            let kernel = linalg::nullspace(&eval, w.len());
            let v_gamma: Vec<Vec<BigInt>> = kernel
                .iter()
                .map(|c| {
                    let mut v = vec![BigInt::zero(); x.ambient_dim() + 1];
                    for (cj, wj) in c.iter().zip(&w) {
                        for (vi, wi) in v.iter_mut().zip(wj) {
                            *vi += wi * cj;
                        }
                    }
                    v
                })
                .collect();
            excluded.push(v_gamma);
        }

        let (c, v) = avoid_vectors(&w, &excluded)?;
        let (form, scale) = LinearForm::new_scaled(
            &v.into_iter().map(Rat::from_integer).collect::<Vec<_>>(),
        )?;
        let mut row = vec![Rat::zero(); l + 1];
        for (&j, &cj) in span.iter().zip(&c) {
            row[j] = &Rat::from_integer(cj) / &scale;
        }
        outputs.push(form);
        coefficients.push(row);
    }

    let position = check_general(&outputs, x)?;
    if !position.verdict {
        return Err(Error::Infeasible(format!(
            "constructed forms failed general position ({} witnesses); this is a bug",
            position.witnesses.len()
        )));
    }
    Ok(CombinationCertificate {
        subvariety: x.clone(),
        l,
        n,
        inputs: forms.to_vec(),
        outputs,
        coefficients,
        position,
        constants: Vec::new(),
    })
}

fn unit_row(len: usize, i: usize) -> Vec<Rat> {
    let mut r = vec![Rat::zero(); len];
    r[i] = Rat::one();
    r
}

impl CombinationCertificate {
    /// Attaches `C_v` for each place (replacing any previous values).
    pub fn with_places(mut self, places: &[Place]) -> Self {
        self.constants = places.iter().map(|&v| chain_constant(&self, v)).collect();
        self
    }

    pub fn constant_for(&self, v: Place) -> ChainConstant {
        self.constants
            .iter()
            .find(|c| c.place == v)
            .cloned()
            .unwrap_or_else(|| chain_constant(self, v))
    }

    /// Replays the certificate: coefficient rows reproduce the outputs,
    /// rows respect the span condition, the first output is the first input,
    /// and the outputs are in general position on X.
    pub fn verify(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Infeasible(format!("certificate check failed: {m}")));
        if self.inputs.len() != self.l + 1 || self.outputs.len() != self.n + 1 {
            return fail("shape".into());
        }
        if self.outputs[0] != self.inputs[0] {
            return fail("first output differs from first input".into());
        }
        let width = self.subvariety.ambient_dim() + 1;
        for (t, (row, out)) in self.coefficients.iter().zip(&self.outputs).enumerate() {
            let t1 = t + 1;
            for (j, c) in row.iter().enumerate() {
                let j1 = j + 1;
                let allowed = if t1 == 1 {
                    j1 == 1
                } else {
                    (2..=self.l - self.n + t1).contains(&j1)
                };
                if !allowed && !c.is_zero() {
                    return fail(format!("row {t1} uses L_{j1} outside its span"));
                }
            }
            let mut acc = vec![BigRational::zero(); width];
            for (c, f) in row.iter().zip(&self.inputs) {
                for (a, x) in acc.iter_mut().zip(f.coeffs()) {
                    *a += c.inner() * BigRational::from_integer(x.clone());
                }
            }
            let expect: Vec<BigRational> = out
                .coeffs()
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            if acc != expect {
                return fail(format!("row {t1} does not reproduce output {t1}"));
            }
        }
        if !check_general(&self.outputs, &self.subvariety)?.verdict {
            return fail("outputs not in general position".into());
        }
        Ok(())
    }
}

/// An admissible `C_v` with `||L'_t(P)||_v <= C_v max_j ||L_j(P)||_v` over the
/// span of row `t`: at a finite place the largest coefficient norm, at the
/// archimedean place the number of nonzero coefficients times the largest one.
pub fn chain_constant(cert: &CombinationCertificate, v: Place) -> ChainConstant {
    let mut best = Rat::zero();
    for row in &cert.coefficients {
        let nonzero: Vec<&Rat> = row.iter().filter(|c| !c.is_zero()).collect();
        let value = match v {
            Place::Infinite => {
                let max = nonzero.iter().map(|c| c.abs()).max().unwrap_or_else(Rat::zero);
                &Rat::from_integer(nonzero.len() as i64) * &max
            }
            Place::Finite(p) => nonzero
                .iter()
                .map(|c| {
                    let e = ord_int(c.numer(), p).unwrap() - ord_int(c.denom(), p).unwrap();
                    p_power(p.get(), -e)
                })
                .max()
                .unwrap_or_else(Rat::zero),
        };
        if value > best {
            best = value;
        }
    }
    let log = crate::arith::ln_ratio(best.numer(), best.denom());
    ChainConstant {
        place: v,
        value: best,
        log,
    }
}

fn p_power(p: u64, e: i64) -> Rat {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(base)
    } else {
        Rat::from_integer(base).recip()
    }
}

/// A permutation sorting forms by `||L_j(P)||_v` ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub place: Place,
    /// 1-based indices: `permutation[0]` is the form with the smallest norm.
    pub permutation: Vec<usize>,
}

/// Exact comparison of `||a||_v` and `||b||_v` for nonzero integers.
pub(crate) fn cmp_local_norm(a: &BigInt, b: &BigInt, v: Place) -> CmpOrdering {
    match v {
        Place::Infinite => a.abs().cmp(&b.abs()),
        // larger valuation means smaller norm
        Place::Finite(p) => ord_int(b, p).unwrap().cmp(&ord_int(a, p).unwrap()),
    }
}

pub fn reorder_by_local_norm(
    p: &ProjPoint,
    v: Place,
    forms: &[LinearForm],
) -> Result<Ordering> {
    let mut vals = Vec::with_capacity(forms.len());
    for (j, f) in forms.iter().enumerate() {
        let val = f.evaluate(p)?;
        if val.is_zero() {
            return Err(Error::Domain(format!(
                "point {p} lies on hyperplane {} ({f})",
                j + 1
            )));
        }
        vals.push(val);
    }
    let mut idx: Vec<usize> = (0..forms.len()).collect();
    idx.sort_by(|&i, &j| cmp_local_norm(&vals[i], &vals[j], v).then(i.cmp(&j)));
    Ok(Ordering {
        place: v,
        permutation: idx.into_iter().map(|i| i + 1).collect(),
    })
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

    #[test]
    fn candidate_order() {
        let c = candidates(2, 1);
        assert_eq!(c, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]);
        assert!(candidates(3, 2).iter().all(|v| v.iter().any(|x| x.abs() == 2)));
    }

    #[test]
    fn avoid_examples() {
        let x1 = lin(&[0, 1, 0]);
        let x2 = lin(&[0, 0, 1]);
        let w = [x1.clone(), x2.clone()];
        assert_eq!(avoid_subspaces(&w, &[vec![x1.clone()]]).unwrap(), x2);
        assert_eq!(avoid_subspaces(std::slice::from_ref(&x1), &[]).unwrap(), x1);
        assert_eq!(
            avoid_subspaces(&w, &[vec![x1.clone()], vec![x2.clone()]]).unwrap(),
            lin(&[0, 1, 1])
        );
        assert!(matches!(
            avoid_subspaces(&w, &[vec![x1.clone(), x2.clone()]]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn worked_example_on_a_line() {
        let x = LinearSubvariety::new(2, vec![lin(&[0, 0, 1])]).unwrap();
        let forms = [lin(&[1, 0, 0]), lin(&[0, 1, 0]), lin(&[1, -1, 0])];
        let cert = quang_combine(&forms, &x).unwrap();
        assert_eq!(cert.outputs, vec![lin(&[1, 0, 0]), lin(&[0, 1, 0])]);
        assert_eq!((cert.l, cert.n), (2, 1));
        cert.verify().unwrap();
    }

    #[test]
    fn general_position_input_gives_identity_pattern() {
        let x = LinearSubvariety::whole(2);
        let forms = [lin(&[1, 0, 0]), lin(&[0, 1, 0]), lin(&[0, 0, 1])];
        let cert = quang_combine(&forms, &x).unwrap();
        assert_eq!(cert.outputs, forms.to_vec());
        for (t, row) in cert.coefficients.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                assert_eq!(*c, if t == j { Rat::one() } else { Rat::zero() });
            }
        }
        for v in [Place::Infinite, Place::finite(2).unwrap(), Place::finite(5).unwrap()] {
            assert_eq!(chain_constant(&cert, v).value, Rat::one());
        }
    }

    #[test]
    fn four_lines_in_the_plane() {
        let x = LinearSubvariety::whole(2);
        let forms = [lin(&[1, 0, 0]), lin(&[0, 1, 0]), lin(&[0, 0, 1]), lin(&[1, 1, 1])];
        let cert = quang_combine(&forms, &x).unwrap();
        assert_eq!(cert.outputs.len(), 3);
        assert!(check_general(&cert.outputs, &x).unwrap().verdict);
        cert.verify().unwrap();
    }

    #[test]
    fn rejects_bad_position() {
        let x = LinearSubvariety::whole(2);
        let forms = [lin(&[1, 0, 0]), lin(&[0, 1, 0]), lin(&[1, 1, 0])];
        assert!(matches!(quang_combine(&forms, &x), Err(Error::Position(_))));
        let on_x = LinearSubvariety::new(2, vec![lin(&[0, 0, 1])]).unwrap();
        let forms = [lin(&[0, 0, 1]), lin(&[1, 0, 0]), lin(&[0, 1, 0])];
        assert!(matches!(quang_combine(&forms, &on_x), Err(Error::Argument(_))));
    }

    #[test]
    fn tampered_certificate_fails() {
        let x = LinearSubvariety::whole(2);
        let forms = [lin(&[1, 0, 0]), lin(&[0, 1, 0]), lin(&[0, 0, 1]), lin(&[1, 1, 1])];
        let mut cert = quang_combine(&forms, &x).unwrap();
        cert.coefficients[1][3] = Rat::one();
        assert!(cert.verify().is_err());
    }

    fn cert_with_row(row: Vec<Rat>) -> CombinationCertificate {
        CombinationCertificate {
            subvariety: LinearSubvariety::whole(1),
            l: 2,
            n: 1,
            inputs: vec![lin(&[1, 0]), lin(&[0, 1]), lin(&[1, 1])],
            outputs: vec![lin(&[1, 0]), lin(&[1, 1])],
            coefficients: vec![
                vec![Rat::one(), Rat::zero(), Rat::zero()],
                row,
            ],
            position: PositionReport {
                verdict: true,
                l: 1,
                witnesses: vec![],
            },
            constants: vec![],
        }
    }

    #[test]
    fn chain_constant_examples() {
        let cert = cert_with_row(vec![Rat::zero(), Rat::one(), Rat::one()]);
        assert_eq!(chain_constant(&cert, Place::Infinite).value, Rat::from_integer(2));
        let cert = cert_with_row(vec![Rat::zero(), Rat::one(), Rat::from_integer(-3)]);
        let c3 = chain_constant(&cert, Place::finite(3).unwrap());
        assert_eq!(c3.value, Rat::one());
        assert_eq!(c3.log, 0.0);
    }

    #[test]
    fn reorder_examples() {
        let forms = [lin(&[1, 0]), lin(&[0, 1])];
        let o = reorder_by_local_norm(&pt(&[1, 10]), Place::Infinite, &forms).unwrap();
        assert_eq!(o.permutation, vec![1, 2]);
        let o = reorder_by_local_norm(&pt(&[4, 1]), Place::finite(2).unwrap(), &forms).unwrap();
        assert_eq!(o.permutation, vec![1, 2]);
        let o = reorder_by_local_norm(&pt(&[10, 1]), Place::Infinite, &forms).unwrap();
        assert_eq!(o.permutation, vec![2, 1]);
        let o = reorder_by_local_norm(&pt(&[3, 7]), Place::Infinite, &forms[..1]).unwrap();
        assert_eq!(o.permutation, vec![1]);
        assert!(matches!(
            reorder_by_local_norm(&pt(&[0, 1]), Place::Infinite, &forms),
            Err(Error::Domain(_))
        ));
    }
}
