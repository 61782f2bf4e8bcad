//! Degree-d monomials in graded-lexicographic order.
//!
//! All monomials here share one degree, so the order is lexicographic on
//! exponent vectors with larger leading exponents first:
//! `x0^2, x0 x1, x0 x2, x1^2, x1 x2, x2^2`.

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of degree-`d` monomials in `nvars` variables.
pub fn count(nvars: usize, d: u32) -> usize {
    binom(d as usize + nvars - 1, nvars - 1)
}

pub fn monomials(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            go(nvars, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(count(nvars, d));
    go(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Position of an exponent vector in [`monomials`].
pub fn index(exps: &[u32]) -> usize {
    let nvars = exps.len();
    let mut remaining: u32 = exps.iter().sum();
    let mut idx = 0;
    for (i, &e) in exps.iter().enumerate().take(nvars.saturating_sub(1)) {
        let rest = nvars - i - 1;
        for larger in e + 1..=remaining {
            idx += count(rest, remaining - larger);
        }
        remaining -= e;
    }
    idx
}
