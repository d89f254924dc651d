//! The arity recursion: given a value domain size n, a solution size m, and
//! per-level value bounds d_0..d_r, produce arities k_0..k_r large enough
//! that every consistent sequence of tables within those value bounds has an
//! m-solution at some level. Entries grow as towers of binomials and powers,
//! so all arithmetic is arbitrary precision with explicit budgets.

use crate::error::{Error, Result};
use crate::structure::Template;
use num_bigint::BigUint;
use num_traits::{CheckedSub, One, ToPrimitive, Zero};
use std::collections::HashMap;

/// Iteration budget for one binomial coefficient.
const BINOM_ITER_CAP: u64 = 1_000_000;
/// Bit budget for one power computation.
const POW_BIT_CAP: u64 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleCase {
    /// Fewer than two positive bounds: no consistent sequence exists, every
    /// level gets arity m.
    AllM,
    /// Leading bound zero: schedule the tail and duplicate its head.
    DropZeroHead,
    /// Bounds exactly (1,1): arities (m, 1).
    Base,
    Recursive,
}

/// The computed arities together with the top-level intermediates of the
/// recursion, kept for audit. The intermediate vectors are empty except in
/// the recursive case.
#[derive(Clone, Debug)]
pub struct AritySchedule {
    pub n: u64,
    pub m: u64,
    pub d: Vec<u64>,
    pub case: ScheduleCase,
    pub k: Vec<BigUint>,
    /// Per level i >= 1, the head of the two-level schedule for (d_i, 1).
    pub pair_heads: Vec<BigUint>,
    /// Per level i >= 1, the tail of that schedule.
    pub pair_tails: Vec<BigUint>,
    /// The schedule for (d_0 - 1, d_1, ..., d_r).
    pub reduced: Vec<BigUint>,
    /// Window sizes per level 0..=r.
    pub ell: Vec<BigUint>,
}

impl AritySchedule {
    /// The arities as machine integers, when they fit.
    pub fn small_arities(&self) -> Result<Vec<usize>> {
        self.k
            .iter()
            .map(|v| {
                v.to_usize().ok_or_else(|| {
                    Error::ValueTooLarge(format!("arity {v} does not fit a machine word"))
                })
            })
            .collect()
    }
}

fn binom(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    if b > a {
        return Ok(BigUint::zero());
    }
    let iters = b.to_u64().filter(|&x| x <= BINOM_ITER_CAP).ok_or_else(|| {
        Error::ValueTooLarge(format!("binomial lower index {b} beyond budget"))
    })?;
    let mut r = BigUint::one();
    for t in 0..iters {
        r = r * (a - BigUint::from(t)) / BigUint::from(t + 1);
    }
    Ok(r)
}

fn budgeted_pow(n: u64, exp: &BigUint) -> Result<BigUint> {
    let e = exp
        .to_u64()
        .ok_or_else(|| Error::ValueTooLarge(format!("exponent {exp} beyond budget")))?;
    let base = BigUint::from(n);
    let bits = base.bits().max(1);
    if bits.saturating_mul(e) > POW_BIT_CAP {
        return Err(Error::ValueTooLarge(format!(
            "power {n}^{e} beyond the bit budget"
        )));
    }
    Ok(num_traits::pow(base, e as usize))
}

fn classify(d: &[u64]) -> ScheduleCase {
    if d.iter().filter(|&&x| x >= 1).count() < 2 {
        ScheduleCase::AllM
    } else if d[0] == 0 {
        ScheduleCase::DropZeroHead
    } else if d == [1, 1] {
        ScheduleCase::Base
    } else {
        ScheduleCase::Recursive
    }
}

struct RecursiveTrace {
    pair_heads: Vec<BigUint>,
    pair_tails: Vec<BigUint>,
    reduced: Vec<BigUint>,
    ell: Vec<BigUint>,
    k: Vec<BigUint>,
}

type Memo = HashMap<Vec<u64>, Vec<BigUint>>;

fn core(n: u64, m: u64, d: &[u64], memo: &mut Memo) -> Result<Vec<BigUint>> {
    if let Some(k) = memo.get(d) {
        return Ok(k.clone());
    }
    let k = match classify(d) {
        ScheduleCase::AllM => vec![BigUint::from(m); d.len()],
        ScheduleCase::DropZeroHead => {
            let tail = core(n, m, &d[1..], memo)?;
            let mut k = Vec::with_capacity(d.len());
            k.push(tail[0].clone());
            k.extend(tail);
            k
        }
        ScheduleCase::Base => vec![BigUint::from(m), BigUint::one()],
        ScheduleCase::Recursive => recursive_step(n, m, d, memo)?.k,
    };
    memo.insert(d.to_vec(), k.clone());
    Ok(k)
}

fn recursive_step(n: u64, m: u64, d: &[u64], memo: &mut Memo) -> Result<RecursiveTrace> {
    let r = d.len() - 1;
    let mut pair_heads = vec![BigUint::zero(); r + 1];
    let mut pair_tails = vec![BigUint::zero(); r + 1];
    for i in 1..=r {
        let sub = core(n, m, &[d[i], 1], memo)?;
        pair_heads[i] = sub[0].clone();
        pair_tails[i] = sub[1].clone();
    }
    let mut shrunk = d.to_vec();
    shrunk[0] -= 1;
    let reduced = core(n, m, &shrunk, memo)?;

    let zero = BigUint::zero();
    let mut k = vec![BigUint::zero(); r + 1];
    let mut ell = vec![BigUint::zero(); r + 1];
    for i in (1..=r).rev() {
        let (k_next, p_next) = if i == r {
            (&zero, &zero)
        } else {
            (&k[i + 1], &reduced[i + 1])
        };
        let gap = k_next.checked_sub(p_next).ok_or_else(|| {
            Error::ValueTooLarge("arity fell below its reduced schedule".to_string())
        })?;
        ell[i] = &reduced[i] + binom(&reduced[i], p_next)? * gap;
        k[i] = &pair_heads[i] + binom(&pair_heads[i], &pair_tails[i])? * &ell[i];
    }
    let gap = k[1].checked_sub(&reduced[1]).ok_or_else(|| {
        Error::ValueTooLarge("arity fell below its reduced schedule".to_string())
    })?;
    ell[0] = &reduced[0] + binom(&reduced[0], &reduced[1])? * gap;
    let tail_sum: BigUint = pair_tails[1..].iter().sum();
    k[0] = &tail_sum + budgeted_pow(n, &tail_sum)? * &ell[0];

    Ok(RecursiveTrace {
        pair_heads,
        pair_tails,
        reduced,
        ell,
        k,
    })
}

/// Compute arities for the given bounds, with the top-level intermediates.
pub fn pas_arities(n: u64, m: u64, d: &[u64]) -> Result<AritySchedule> {
    if d.len() < 2 {
        return Err(Error::BadInput(format!(
            "need at least two value bounds, got {}",
            d.len()
        )));
    }
    let mut memo = Memo::new();
    let case = classify(d);
    let (k, pair_heads, pair_tails, reduced, ell) = match case {
        ScheduleCase::Recursive => {
            let t = recursive_step(n, m, d, &mut memo)?;
            (t.k, t.pair_heads, t.pair_tails, t.reduced, t.ell)
        }
        _ => (
            core(n, m, d, &mut memo)?,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
        ),
    };
    Ok(AritySchedule {
        n,
        m,
        d: d.to_vec(),
        case,
        k,
        pair_heads,
        pair_tails,
        reduced,
        ell,
    })
}

/// The arity schedule a reduction with image bound `d` and chain length
/// bound `r` needs on this template: the value domain is the second side's
/// domain and the solution size is the signature's maximal arity, with bound
/// d at every one of the r+1 levels.
pub fn dr_arity_schedule(template: &Template, d: u64, r: u64) -> Result<AritySchedule> {
    if d < 1 || r < 1 {
        return Err(Error::BadParam("both bounds must be >= 1".to_string()));
    }
    let n = template.b.domain_size() as u64;
    let m = template
        .a
        .signature()
        .max_arity()
        .ok_or_else(|| Error::BadParam("template has no relations".to_string()))? as u64;
    pas_arities(n, m, &vec![d; r as usize + 1])
}
