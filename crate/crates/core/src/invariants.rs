//! Multiplicity, dfpt and fpt at a point of `V(Q)`, and their maximum over
//! a finite search set of points.
//!
//! For `Q = (f_1, ..., f_t)` with variable-disjoint square-free supported
//! factors, the multiplicity at a point is the order of `∏ f_i` there,
//! `dfpt = mult - t` and `fpt = dim - dfpt = n - mult`.

use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx};
use crate::frobenius::{fpt_oracle, FptSample};
use crate::poly::{Point, Poly};
use crate::structure::{require_squarefree, CIdeal};

/// Default cap on `|F|^n` per searched field.
pub const DEFAULT_POINT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub point: Point,
    /// Degree over `F_p` of the field the point's coordinates live in.
    pub point_field_degree: usize,
    /// Order of each factor at the point.
    pub orders: Vec<u32>,
    pub ord: u32,
    pub mult: u32,
    pub dim: usize,
    pub dfpt: i64,
    pub fpt: Ratio<i64>,
    pub t: usize,
    /// True when the reported value is the global maximum rather than a
    /// lower bound.
    pub exact: bool,
    pub budget_exceeded: bool,
}

/// Order of `f` at `a`, which is the multiplicity of `S/(f)` there.
pub fn multiplicity_hypersurface(f: &Poly, a: &Point) -> Result<u32> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !f.evaluate(a)?.is_zero() {
        return Err(Error::PointNotOnHypersurface);
    }
    Ok(f.shift_point(a)?.order_and_initial()?.0)
}

fn report_at(ideal: &CIdeal, a: &Point, orders: Vec<u32>) -> InvariantReport {
    let n = ideal.nvars();
    let t = ideal.len();
    let mult: u32 = orders.iter().sum();
    let dim = n - t;
    let dfpt = mult as i64 - t as i64;
    InvariantReport {
        point: a.clone(),
        point_field_degree: ideal.field().degree(),
        orders,
        ord: mult,
        mult,
        dim,
        dfpt,
        fpt: Ratio::from_integer(dim as i64 - dfpt),
        t,
        exact: true,
        budget_exceeded: false,
    }
}

/// Orders of the factors at `a`, or `None` when some factor does not vanish there.
fn factor_orders(ideal: &CIdeal, a: &Point) -> Result<Option<Vec<u32>>> {
    let mut orders = Vec::with_capacity(ideal.len());
    for f in ideal.factors() {
        if !f.evaluate(a)?.is_zero() {
            return Ok(None);
        }
        orders.push(f.shift_point(a)?.order_and_initial()?.0);
    }
    Ok(Some(orders))
}

pub fn dfpt_at(ideal: &CIdeal, a: &Point) -> Result<InvariantReport> {
    for f in ideal.factors() {
        require_squarefree(f)?;
    }
    match factor_orders(ideal, a)? {
        Some(orders) => Ok(report_at(ideal, a, orders)),
        None => Err(Error::PointNotOnVariety),
    }
}

/// Maximizes the multiplicity over the origin and all points of `V(Q)`
/// with coordinates in `F_{p^(s0·j)}`, `j ≤ s_max`, where `F_{p^s0}` is the
/// coefficient field. Fields whose grid exceeds `budget` points are skipped
/// and flagged. Among maximizers the origin wins, then the smaller field,
/// then the least coordinate-index vector.
pub fn global_invariants(ideal: &CIdeal, s_max: usize, budget: u128) -> Result<InvariantReport> {
    for f in ideal.factors() {
        require_squarefree(f)?;
    }
    let n = ideal.nvars();
    let base = ideal.field();
    let all_homogeneous = ideal.factors().iter().all(|f| f.is_homogeneous());
    let mut budget_exceeded = false;

    let origin = Point::origin(n);
    let mut best = factor_orders(ideal, &origin)?.map(|o| report_at(ideal, &origin, o));

    for j in 1..=s_max {
        let degree = base.degree() * j;
        if degree > 4 {
            break;
        }
        let field = Arc::new(FieldCtx::new(base.characteristic() as u64, degree)?);
        let grid = field.order().checked_pow(n as u32);
        let Some(size) = grid.filter(|&g| g <= budget) else {
            budget_exceeded = true;
            continue;
        };
        let emb = Embedding::new(base, &field)?;
        let lifted = ideal.embed(&emb);
        let order = field.order();
        let found = (0..size as u64)
            .into_par_iter()
            .map(|idx| -> Result<Option<(u32, u64, Vec<u32>)>> {
                let mut rest = idx as u128;
                let mut coords = vec![field.zero(); n];
                for c in coords.iter_mut().rev() {
                    *c = field.element(rest % order);
                    rest /= order;
                }
                let a = Point::new(coords);
                Ok(factor_orders(&lifted, &a)?.map(|o| (o.iter().sum(), idx, o)))
            })
            .try_reduce(
                || None,
                |x, y| {
                    Ok(match (x, y) {
                        (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
                        (a, b) => a.or(b),
                    })
                },
            )?;
        if let Some((mult, idx, orders)) = found {
            if best.as_ref().is_none_or(|b| mult > b.mult) {
                let mut rest = idx as u128;
                let mut coords = vec![field.zero(); n];
                for c in coords.iter_mut().rev() {
                    *c = field.element(rest % order);
                    rest /= order;
                }
                let mut r = report_at(&lifted, &Point::new(coords), orders);
                r.point_field_degree = degree;
                best = Some(r);
            }
        }
    }

    let mut report = best.ok_or(Error::PointNotOnVariety)?;
    report.exact = all_homogeneous;
    report.budget_exceeded = budget_exceeded;
    Ok(report)
}

/// Oracle samples with `(n - mult) - λ(e)` at the origin; the discrepancy
/// is `None` where the oracle has no surviving monomial.
pub fn fpt_crosscheck(ideal: &CIdeal, e_list: &[u32]) -> Result<Vec<(FptSample, Option<Ratio<i64>>)>> {
    let origin = Point::origin(ideal.nvars());
    let orders = factor_orders(ideal, &origin)?.ok_or(Error::PointNotOnVariety)?;
    let closed_form = Ratio::from_integer(ideal.nvars() as i64 - orders.iter().sum::<u32>() as i64);
    e_list
        .iter()
        .map(|&e| {
            let sample = fpt_oracle(ideal, e)?;
            let discrepancy = sample.lambda.map(|l| closed_form - l);
            Ok((sample, discrepancy))
        })
        .collect()
}
