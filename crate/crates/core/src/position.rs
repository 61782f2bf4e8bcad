//! General and l-subgeneral position of hyperplane arrangements on a linear
//! subvariety, decided exactly by rank computations over Q.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::proj::{LinearForm, LinearSubvariety};

/// One violated subset: `dim(∩_J H_j ∩ X) > l - #J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// 1-based indices into the arrangement.
    pub indices: Vec<usize>,
    pub dim: i64,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionReport {
    pub verdict: bool,
    pub l: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    /// Record every violating subset.
    Full,
    /// Stop at the first violation.
    VerdictOnly,
}

fn check_dims(forms: &[LinearForm], x: &LinearSubvariety) -> Result<()> {
    if let Some(f) = forms.iter().find(|f| f.dim() != x.ambient_dim()) {
        return Err(Error::arg(format!(
            "form {f} is on P^{}, subvariety is in P^{}",
            f.dim(),
            x.ambient_dim()
        )));
    }
    Ok(())
}

fn dim_of<'a>(forms: impl Iterator<Item = &'a LinearForm>, x: &'a LinearSubvariety) -> i64 {
    let rows: Vec<Vec<BigInt>> = forms
        .chain(x.forms())
        .map(|f| f.coeffs().to_vec())
        .collect();
    x.ambient_dim() as i64 - linalg::rank(&rows) as i64
}

/// Projective dimension of `(∩ H_j) ∩ X`, or -1 when empty.
pub fn intersection_dim(forms: &[LinearForm], x: &LinearSubvariety) -> Result<i64> {
    check_dims(forms, x)?;
    Ok(dim_of(forms.iter(), x))
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order; stops when
/// `f` returns false.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn check_subgeneral_with(
    forms: &[LinearForm],
    x: &LinearSubvariety,
    l: usize,
    scan: Scan,
) -> Result<PositionReport> {
    if forms.is_empty() {
        return Err(Error::arg("empty arrangement"));
    }
    check_dims(forms, x)?;
    if l < x.dim() {
        return Err(Error::arg(format!(
            "l = {l} is below dim X = {}",
            x.dim()
        )));
    }
    let mut witnesses = Vec::new();
    let max_size = (l + 1).min(forms.len());
    'sizes: for size in 1..=max_size {
        let bound = l as i64 - size as i64;
        let mut stop = false;
        for_each_subset(forms.len(), size, |j| {
            let dim = dim_of(j.iter().map(|&i| &forms[i]), x);
            if dim > bound {
                witnesses.push(Witness {
                    indices: j.iter().map(|i| i + 1).collect(),
                    dim,
                    bound,
                });
                if scan == Scan::VerdictOnly {
                    stop = true;
                    return false;
                }
            }
            true
        });
        if stop {
            break 'sizes;
        }
    }
    Ok(PositionReport {
        verdict: witnesses.is_empty(),
        l,
        witnesses,
    })
}

/// Whether every `J` with `#J <= l + 1` has `dim(∩_J H_j ∩ X) <= l - #J`.
/// Witnesses are listed smallest `#J` first, then lexicographically.
pub fn check_subgeneral(
    forms: &[LinearForm],
    x: &LinearSubvariety,
    l: usize,
) -> Result<PositionReport> {
    check_subgeneral_with(forms, x, l, Scan::Full)
}

/// General position on X, i.e. `dim X`-subgeneral position.
pub fn check_general(forms: &[LinearForm], x: &LinearSubvariety) -> Result<PositionReport> {
    check_subgeneral(forms, x, x.dim())
}
