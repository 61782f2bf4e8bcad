//! Seeded point sampling on a linear subvariety inside a height window.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::proj::{LinearForm, LinearSubvariety, ProjPoint};
use crate::weil::{height, Target};

/// Largest `h_max` the sampler accepts; boxes of side `e^h` must fit in i64.
pub const MAX_WINDOW: f64 = 42.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub points: Vec<ProjPoint>,
    /// Every point of the window was enumerated (P^1 only).
    pub exhaustive: bool,
    /// Fewer than `count` points were found within the attempt budget.
    pub partial: bool,
}

/// Points lying on every form of a list (a linear subspace of P^M, possibly a
/// point) are excluded.
pub fn on_subspace(p: &ProjPoint, forms: &[LinearForm]) -> bool {
    forms
        .iter()
        .all(|f| f.evaluate(p).map(|v| v.is_zero()).unwrap_or(false))
}

fn is_excluded(p: &ProjPoint, supports: &[Target], subspaces: &[Vec<LinearForm>]) -> bool {
    supports.iter().any(|t| t.touches(p)) || subspaces.iter().any(|s| on_subspace(p, s))
}

/// Canonical points of X with `h_min <= h <= h_max`, off every support and
/// every excluded subspace, sorted and free of duplicates.
///
/// On P^1 the window is enumerated exhaustively; if it holds more than
/// `count` points a seeded subset of size `count` is returned. Elsewhere each
/// draw picks a target height uniformly in the window and integer coordinates
/// uniformly in a box of that size over a basis of the cone over X.
pub fn sample_points(
    x: &LinearSubvariety,
    h_min: f64,
    h_max: f64,
    count: usize,
    seed: u64,
    supports: &[Target],
    subspaces: &[Vec<LinearForm>],
) -> Result<Sample> {
    if !(h_min < h_max) || h_min < 0.0 {
        return Err(Error::arg(format!(
            "height window [{h_min}, {h_max}] must satisfy 0 <= h_min < h_max"
        )));
    }
    if h_max > MAX_WINDOW {
        return Err(Error::arg(format!(
            "h_max = {h_max} exceeds the sampler limit {MAX_WINDOW}"
        )));
    }
    if count == 0 {
        return Ok(Sample {
            points: Vec::new(),
            exhaustive: false,
            partial: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if x.ambient_dim() == 1 {
        let all = enumerate_p1(h_min, h_max, supports, subspaces);
        if all.len() <= count {
            return Ok(Sample {
                points: all,
                exhaustive: true,
                partial: false,
            });
        }
        let mut chosen: Vec<usize> = index::sample(&mut rng, all.len(), count).into_vec();
        chosen.sort_unstable();
        return Ok(Sample {
            points: chosen.into_iter().map(|i| all[i].clone()).collect(),
            exhaustive: false,
            partial: false,
        });
    }

    let basis = x.cone_basis();
    let entry_max = basis
        .iter()
        .flatten()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(|| BigInt::from(1));
    let entry_max = entry_max.to_string().parse::<f64>().unwrap_or(1.0).max(1.0);
    let width = x.ambient_dim() + 1;
    let budget = 50 * count + 1000;
    let mut found = BTreeSet::new();
    for _ in 0..budget {
        if found.len() == count {
            break;
        }
        let h = rng.gen_range(h_min..=h_max);
        let bound = ((h.exp() / entry_max).floor() as i64).max(1);
        let mut v = vec![BigInt::zero(); width];
        for b in &basis {
            let u: i64 = rng.gen_range(-bound..=bound);
            if u != 0 {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += bi * u;
                }
            }
        }
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        let p = ProjPoint::from_bigints(v)?;
        let hp = height(&p);
        if hp < h_min || hp > h_max || is_excluded(&p, supports, subspaces) {
            continue;
        }
        found.insert(p);
    }
    let partial = found.len() < count;
    Ok(Sample {
        points: found.into_iter().collect(),
        exhaustive: false,
        partial,
    })
}

/// All canonical `[a:b]` with height in the window, in canonical order.
fn enumerate_p1(
    h_min: f64,
    h_max: f64,
    supports: &[Target],
    subspaces: &[Vec<LinearForm>],
) -> Vec<ProjPoint> {
    let top = h_max.exp().floor() as i64 + 1;
    let mut out = Vec::new();
    for a in 0..=top {
        for b in -top..=top {
            let canonical = a > 0 || b == 1;
            if !canonical || a.gcd(&b) != 1 {
                continue;
            }
            let p = ProjPoint::from_ints(&[a, b]).expect("nonzero");
            let h = height(&p);
            if h < h_min || h > h_max {
                continue;
            }
            if !is_excluded(&p, supports, subspaces) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}
