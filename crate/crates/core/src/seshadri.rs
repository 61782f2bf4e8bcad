//! Seshadri constants `ε_Y(O(1))` on P^M for the classes with closed forms:
//! hypersurfaces of degree d (value `1/d`) and linear subspaces (value 1).

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::linalg;
use crate::weil::Target;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectClass {
    Hypersurface { degree: u32 },
    LinearSubspace { codim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeshadriValue {
    pub value: Rat,
    pub class: SubjectClass,
    pub justification: String,
}

pub fn seshadri_constant(y: &Target) -> Result<SeshadriValue> {
    let comps = y.components();
    if comps.len() == 1 {
        let d = comps[0].degree();
        return Ok(SeshadriValue {
            value: Rat::from_ratio(1, d as i64),
            class: SubjectClass::Hypersurface { degree: d },
            justification: format!(
                "Y ~ {d}H on P^M: H - γ·{d}H is nef iff 1 - {d}γ >= 0"
            ),
        });
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(comps.len());
    for c in &comps {
        match c.as_linear() {
            Some(l) => rows.push(l.coeffs().to_vec()),
            None => {
                return Err(Error::Unsupported(format!(
                    "intersection involving the degree-{} form {c}; only single \
                     hypersurfaces and linear subspaces have closed forms",
                    c.degree()
                )))
            }
        }
    }
    let rank = linalg::rank(&rows);
    if rank != rows.len() {
        return Err(Error::Unsupported(format!(
            "{} linear components of rank {rank} are not independent",
            rows.len()
        )));
    }
    Ok(SeshadriValue {
        value: Rat::one(),
        class: SubjectClass::LinearSubspace { codim: rank },
        justification: format!(
            "blow-up of a codimension-{rank} linear subspace: π*H - γE is nef iff 0 <= γ <= 1"
        ),
    })
}
