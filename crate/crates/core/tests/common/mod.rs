//! Brute-force oracles shared by the integration tests. None of them call
//! the optimized kernels they are compared against.
#![allow(dead_code)]

use std::sync::Arc;

use fsing_core::field::{FieldCtx, Scalar};
use fsing_core::poly::{Monomial, Poly, VarCtx};

pub fn ctx(p: u64, names: &str) -> (Arc<FieldCtx>, Arc<VarCtx>) {
    (
        Arc::new(FieldCtx::prime(p).unwrap()),
        Arc::new(VarCtx::new(names.split_whitespace()).unwrap()),
    )
}

pub fn numbered(p: u64, n: usize) -> (Arc<FieldCtx>, Arc<VarCtx>) {
    (
        Arc::new(FieldCtx::prime(p).unwrap()),
        Arc::new(VarCtx::numbered("x", n).unwrap()),
    )
}

pub fn build(field: &Arc<FieldCtx>, vars: &Arc<VarCtx>, terms: &[(Vec<u16>, i64)]) -> Poly {
    let terms = terms
        .iter()
        .map(|(e, c)| (Monomial::from_exps(e.clone()), field.from_int(*c)));
    Poly::from_terms(field.clone(), vars.clone(), terms).unwrap()
}

/// Parses `2*x^2*y + z` style text (no subtraction) against `vars`.
pub fn parse(field: &Arc<FieldCtx>, vars: &Arc<VarCtx>, text: &str) -> Poly {
    let mut terms = Vec::new();
    for raw in text.split('+') {
        let mut coeff = 1i64;
        let mut exps = vec![0u16; vars.len()];
        for factor in raw.split('*').map(str::trim) {
            if let Ok(v) = factor.parse::<i64>() {
                coeff *= v;
                continue;
            }
            let (name, e) = match factor.split_once('^') {
                Some((a, b)) => (a, b.parse::<u16>().unwrap()),
                None => (factor, 1),
            };
            exps[vars.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}"))] += e;
        }
        terms.push((exps, coeff));
    }
    build(field, vars, &terms)
}

/// `f^k` by repeated schoolbook multiplication.
pub fn naive_power(f: &Poly, k: u32) -> Poly {
    let mut acc = Poly::one(f.field().clone(), f.vars().clone());
    for _ in 0..k {
        acc = acc.mul(f).unwrap();
    }
    acc
}

/// Full expansion of `f^(q-1)` followed by deleting every monomial with an
/// exponent `≥ q`.
pub fn naive_kernel(f: &Poly, e: u32) -> Poly {
    let q = f.field().characteristic().pow(e);
    let full = naive_power(f, q - 1);
    let kept = full
        .terms()
        .iter()
        .filter(|(m, _)| m.exps().iter().all(|&x| (x as u32) < q))
        .cloned()
        .collect::<Vec<_>>();
    Poly::from_terms(f.field().clone(), f.vars().clone(), kept).unwrap()
}

pub fn matrix_rank(mut rows: Vec<Vec<Scalar>>, field: &FieldCtx) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(&rows[rank][c]).unwrap();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = field.mul(&rows[r][c], &inv);
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = field.sub(x, &field.mul(&factor, y));
                }
            }
        }
        rank += 1;
    }
    rank
}

fn split_parts(m: &Monomial, block: &[usize]) -> (Vec<u16>, Vec<u16>) {
    let mut a = vec![0u16; m.len()];
    let mut b = vec![0u16; m.len()];
    for (i, &e) in m.exps().iter().enumerate() {
        if block.contains(&i) {
            a[i] = e;
        } else {
            b[i] = e;
        }
    }
    (a, b)
}

/// Irreducible factors by brute force: the factor holding the least
/// variable uses the smallest variable block `A` for which the coefficient
/// matrix indexed by (A-part, complement part) has rank one.
pub fn brute_force_factors(f: &Poly) -> Vec<Poly> {
    let vars = f.used_vars();
    if vars.len() <= 1 {
        return vec![f.monic().unwrap().1];
    }
    let field = f.field();
    let rest = &vars[1..];
    let mut subsets: Vec<u32> = (0..(1u32 << rest.len()) - 1).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for mask in subsets {
        let block: Vec<usize> = std::iter::once(vars[0])
            .chain(
                rest.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v),
            )
            .collect();
        let mut alphas: Vec<Vec<u16>> = Vec::new();
        let mut betas: Vec<Vec<u16>> = Vec::new();
        for (m, _) in f.terms() {
            let (a, b) = split_parts(m, &block);
            if !alphas.contains(&a) {
                alphas.push(a);
            }
            if !betas.contains(&b) {
                betas.push(b);
            }
        }
        let mut matrix = vec![vec![field.zero(); betas.len()]; alphas.len()];
        for (m, c) in f.terms() {
            let (a, b) = split_parts(m, &block);
            let i = alphas.iter().position(|x| *x == a).unwrap();
            let j = betas.iter().position(|x| *x == b).unwrap();
            matrix[i][j] = *c;
        }
        if matrix_rank(matrix.clone(), field) != 1 {
            continue;
        }
        let (i0, j0) = (0..alphas.len())
            .flat_map(|i| (0..betas.len()).map(move |j| (i, j)))
            .find(|&(i, j)| !matrix[i][j].is_zero())
            .unwrap();
        let fa = Poly::from_terms(
            field.clone(),
            f.vars().clone(),
            (0..alphas.len()).map(|i| (Monomial::from_exps(alphas[i].clone()), matrix[i][j0])),
        )
        .unwrap();
        let inv = field.inv(&matrix[i0][j0]).unwrap();
        let fb = Poly::from_terms(
            field.clone(),
            f.vars().clone(),
            (0..betas.len()).map(|j| (Monomial::from_exps(betas[j].clone()), field.mul(&matrix[i0][j], &inv))),
        )
        .unwrap();
        let mut out = vec![fa.monic().unwrap().1];
        out.extend(brute_force_factors(&fb));
        return out;
    }
    vec![f.monic().unwrap().1]
}
