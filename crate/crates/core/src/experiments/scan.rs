//! Fitting low-dimensional linear spans through violator clusters.
//!
//! The exceptional set of the theorem is not effective; these spans are
//! reported as candidates only.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::proj::{LinearForm, ProjPoint};

/// Seeds considered per round when fitting spans.
const MAX_SEEDS: usize = 48;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Always "candidate".
    pub label: String,
    /// Projective dimension of the span (0 for an isolated point).
    pub dim: usize,
    /// Equations of the span in P^M.
    pub forms: Vec<LinearForm>,
    /// Violators assigned to this span.
    pub members: Vec<ProjPoint>,
}

fn rows(points: &[&ProjPoint]) -> Vec<Vec<BigInt>> {
    points.iter().map(|p| p.coords().to_vec()).collect()
}

fn in_span(basis: &[Vec<BigInt>], rank: usize, p: &ProjPoint) -> bool {
    let mut r = basis.to_vec();
    r.push(p.coords().to_vec());
    linalg::rank(&r) == rank
}

fn equations(basis: &[Vec<BigInt>], ambient: usize) -> Vec<LinearForm> {
    linalg::nullspace(basis, ambient + 1)
        .into_iter()
        .map(|v| LinearForm::from_bigints(v).expect("nonzero kernel vector"))
        .collect()
}

/// Calls `f` on each k-subset of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Greedy cover of the violators by linear spans of dimension `1..max_dim`,
/// smallest dimension first. A span is kept if it contains at least
/// `max(d + 2, ceil(fraction * total))` violators; violators left over become
/// point candidates.
pub fn exceptional_scan(
    violators: &[ProjPoint],
    max_dim: usize,
    fraction: f64,
) -> Vec<Candidate> {
    let Some(first) = violators.first() else {
        return Vec::new();
    };
    let ambient = first.dim();
    let need_frac = (fraction * violators.len() as f64).ceil() as usize;
    let mut remaining: Vec<&ProjPoint> = violators.iter().collect();
    let mut out = Vec::new();

    'rounds: loop {
        for d in 1..max_dim {
            let need = (d + 2).max(need_frac);
            if remaining.len() < need {
                continue;
            }
            let seeds = &remaining[..remaining.len().min(MAX_SEEDS)];
            let mut best: Option<(usize, Vec<Vec<BigInt>>)> = None;
            subsets(seeds.len(), d + 1, |idx| {
                let pts: Vec<&ProjPoint> = idx.iter().map(|&i| seeds[i]).collect();
                let basis = rows(&pts);
                if linalg::rank(&basis) != d + 1 {
                    return;
                }
                let count = remaining.iter().filter(|p| in_span(&basis, d + 1, p)).count();
                if best.as_ref().is_none_or(|(c, _)| count > *c) {
                    best = Some((count, basis));
                }
            });
            if let Some((count, basis)) = best {
                if count >= need {
                    let (members, rest): (Vec<&ProjPoint>, Vec<&ProjPoint>) =
                        remaining.iter().partition(|p| in_span(&basis, d + 1, p));
                    out.push(Candidate {
                        label: "candidate".into(),
                        dim: d,
                        forms: equations(&basis, ambient),
                        members: members.into_iter().cloned().collect(),
                    });
                    remaining = rest;
                    continue 'rounds;
                }
            }
        }
        break;
    }
    for p in remaining {
        out.push(Candidate {
            label: "candidate".into(),
            dim: 0,
            forms: equations(&[p.coords().to_vec()], ambient),
            members: vec![p.clone()],
        });
    }
    out
}

/// Whether every member of `c` satisfies every equation of `c`.
pub fn candidate_is_sound(c: &Candidate) -> bool {
    c.members.iter().all(|p| {
        c.forms
            .iter()
            .all(|f| f.evaluate(p).map(|v| v == BigInt::from(0)).unwrap_or(false))
    })
}
