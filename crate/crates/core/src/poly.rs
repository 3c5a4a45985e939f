//! Sparse multivariate polynomials over `F_{p^s}`.
//!
//! Terms are kept sorted by the canonical monomial order (see [`Monomial`]'s
//! `Ord`), with no zero coefficients and one entry per exponent vector.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx, Scalar};

/// Largest exponent a monomial may carry.
pub const MAX_EXPONENT: u32 = u16::MAX as u32;

/// Ordered, distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarCtx {
    names: Vec<String>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl VarCtx {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidParameter("variable list is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::InvalidParameter(format!("`{n}` is not a valid variable name")));
            }
            if names[..i].contains(n) {
                return Err(Error::NameCollision(n.clone()));
            }
        }
        Ok(VarCtx { names })
    }

    /// `x1, ..., xn`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn with_appended(&self, name: &str) -> Result<Self> {
        if self.index_of(name).is_some() {
            return Err(Error::NameCollision(name.to_string()));
        }
        let mut names = self.names.clone();
        names.push(name.to_string());
        Self::new(names)
    }

    /// `base` if unused, otherwise the first unused `base0`, `base1`, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (0..)
            .map(|i| format!("{base}{i}"))
            .find(|n| self.index_of(n).is_none())
            .expect("unbounded name supply")
    }
}

/// Exponent vector.
///
/// Ordered first by total degree, then lexicographically *descending* with
/// the first variable most significant, so that within a degree `x*y` sorts
/// before `z*w`. The order is compatible with multiplication. "Least" and
/// "leading" monomials refer to the minimum and maximum of this order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { exps: vec![0; n] }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Monomial { exps }
    }

    /// Monomial with exponent one on each listed variable.
    pub fn from_vars(n: usize, vars: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::one(n);
        for v in vars {
            m.exps[v] = m.exps[v].saturating_add(1);
        }
        m
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&e| e <= 1)
    }

    pub fn max_exponent(&self) -> u16 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        debug_assert_eq!(self.len(), other.len());
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            let e = *a as u32 + *b as u32;
            if e > MAX_EXPONENT {
                return Err(Error::ExponentOverflow);
            }
            exps.push(e as u16);
        }
        Ok(Monomial { exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        })
    }

    /// Degree counting only the flagged variables.
    pub fn degree_in(&self, mask: &[bool]) -> u32 {
        self.exps
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&e, _)| e as u32)
            .sum()
    }

    pub fn format(&self, vars: &VarCtx) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    vars.name(i).to_string()
                } else {
                    format!("{}^{}", vars.name(i), e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Point of affine space over the polynomial's coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<Scalar>,
}

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point { coords }
    }

    pub fn origin(n: usize) -> Self {
        Point {
            coords: vec![Scalar::ZERO; n],
        }
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn negate(&self, field: &FieldCtx) -> Point {
        Point {
            coords: self.coords.iter().map(|c| field.neg(c)).collect(),
        }
    }

    pub fn format(&self, field: &FieldCtx) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| field.format_scalar(c)).collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<FieldCtx>,
    vars: Arc<VarCtx>,
    terms: Vec<(Monomial, Scalar)>,
}

type Accumulator = HashMap<Monomial, Scalar>;

fn accumulate(acc: &mut Accumulator, field: &FieldCtx, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut o) => {
            let v = field.add(o.get(), &c);
            if v.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = v;
            }
        }
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

impl Poly {
    fn from_acc(field: Arc<FieldCtx>, vars: Arc<VarCtx>, acc: Accumulator) -> Poly {
        let mut terms: Vec<(Monomial, Scalar)> = acc.into_iter().collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { field, vars, terms }
    }

    pub fn zero(field: Arc<FieldCtx>, vars: Arc<VarCtx>) -> Poly {
        Poly {
            field,
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: Arc<FieldCtx>, vars: Arc<VarCtx>, c: Scalar) -> Poly {
        let n = vars.len();
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Monomial::one(n), c)]
        };
        Poly { field, vars, terms }
    }

    pub fn one(field: Arc<FieldCtx>, vars: Arc<VarCtx>) -> Poly {
        Self::constant(field, vars, Scalar::ONE)
    }

    pub fn var(field: Arc<FieldCtx>, vars: Arc<VarCtx>, i: usize) -> Result<Poly> {
        let n = vars.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        Ok(Poly {
            field,
            vars,
            terms: vec![(Monomial::var(n, i), Scalar::ONE)],
        })
    }

    pub fn monomial(field: Arc<FieldCtx>, vars: Arc<VarCtx>, m: Monomial, c: Scalar) -> Result<Poly> {
        Self::from_terms(field, vars, [(m, c)])
    }

    /// Sums the given terms, validating lengths and coefficients.
    pub fn from_terms<I>(field: Arc<FieldCtx>, vars: Arc<VarCtx>, terms: I) -> Result<Poly>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut acc = Accumulator::new();
        for (m, c) in terms {
            if m.len() != vars.len() {
                return Err(Error::ContextMismatch);
            }
            if !field.is_element(&c) {
                return Err(Error::FieldMismatch);
            }
            accumulate(&mut acc, &field, m, c);
        }
        Ok(Self::from_acc(field, vars, acc))
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn vars(&self) -> &Arc<VarCtx> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms
            .binary_search_by(|(t, _)| t.cmp(m))
            .map(|i| self.terms[i].1)
            .unwrap_or(Scalar::ZERO)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.last().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        match (self.terms.first(), self.terms.last()) {
            (Some((a, _)), Some((b, _))) => a.degree() == b.degree(),
            _ => true,
        }
    }

    /// Greatest term under the canonical order.
    pub fn leading(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.last()
    }

    /// Least term under the canonical order.
    pub fn least(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.first()
    }

    pub fn same_ring(&self, other: &Poly) -> bool {
        (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
            && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn empty_like(&self) -> Poly {
        Poly::zero(self.field.clone(), self.vars.clone())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut acc: Accumulator = self.terms.iter().cloned().collect();
        for (m, c) in &other.terms {
            accumulate(&mut acc, &self.field, m.clone(), *c);
        }
        Ok(Self::from_acc(self.field.clone(), self.vars.clone(), acc))
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect();
        Poly {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return self.empty_like();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), self.field.mul(a, c)))
            .collect();
        Poly {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Result<Poly> {
        if c.is_zero() {
            return Ok(self.empty_like());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, a) in &self.terms {
            terms.push((t.mul(m)?, self.field.mul(a, c)));
        }
        // multiplication by a monomial preserves the order
        Ok(Poly {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut acc = Accumulator::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut acc, &self.field, ma.mul(mb)?, self.field.mul(ca, cb));
            }
        }
        Ok(Self::from_acc(self.field.clone(), self.vars.clone(), acc))
    }

    pub fn pow(&self, mut k: u32) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field.clone(), self.vars.clone());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Drops every term with an exponent `≥ q` on a flagged variable.
    pub fn reduce_mod_bracket(&self, q: u32, truncated: &[bool]) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| !exceeds(m, q, truncated))
            .cloned()
            .collect();
        Poly {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Product reduced modulo `(x_i^q : truncated[i])`, skipping products
    /// that would land in the bracket power.
    pub fn mul_mod_bracket(&self, other: &Poly, q: u32, truncated: &[bool]) -> Result<Poly> {
        self.check_ring(other)?;
        let n = self.nvars();
        let mut acc = Accumulator::new();
        let mut exps = vec![0u16; n];
        for (ma, ca) in &self.terms {
            'pair: for (mb, cb) in &other.terms {
                for i in 0..n {
                    let e = ma.exps[i] as u32 + mb.exps[i] as u32;
                    if truncated[i] && e >= q {
                        continue 'pair;
                    }
                    if e > MAX_EXPONENT {
                        return Err(Error::ExponentOverflow);
                    }
                    exps[i] = e as u16;
                }
                accumulate(
                    &mut acc,
                    &self.field,
                    Monomial { exps: exps.clone() },
                    self.field.mul(ca, cb),
                );
            }
        }
        Ok(Self::from_acc(self.field.clone(), self.vars.clone(), acc))
    }

    fn pow_mod_bracket(&self, mut k: u32, q: u32, truncated: &[bool]) -> Result<Poly> {
        let mut base = self.reduce_mod_bracket(q, truncated);
        let mut acc = Poly::one(self.field.clone(), self.vars.clone()).reduce_mod_bracket(q, truncated);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_mod_bracket(&base, q, truncated)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_mod_bracket(&base, q, truncated)?;
            }
        }
        Ok(acc)
    }

    /// `g ↦ g^[p^i]`: exponents times `p^i`, coefficients through `i` Frobenius steps,
    /// terms landing in the bracket power dropped.
    fn bracket_frobenius(&self, i: u32, q: u32, truncated: &[bool]) -> Result<Poly> {
        let p = self.field.characteristic() as u64;
        let factor = p.pow(i);
        let mut terms = Vec::with_capacity(self.terms.len());
        'term: for (m, c) in &self.terms {
            let mut exps = Vec::with_capacity(m.exps.len());
            for (j, &e) in m.exps.iter().enumerate() {
                let v = e as u64 * factor;
                if truncated[j] && v >= q as u64 {
                    continue 'term;
                }
                if v > MAX_EXPONENT as u64 {
                    return Err(Error::ExponentOverflow);
                }
                exps.push(v as u16);
            }
            terms.push((Monomial { exps }, self.field.frobenius_iter(c, i)));
        }
        // scaling all exponents by the same factor preserves the order
        Ok(Poly {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Poly> {
        let n = self.nvars();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[i] -= 1;
            let coeff = self.field.mul(c, &self.field.from_int(e as i64));
            accumulate(&mut acc, &self.field, Monomial { exps }, coeff);
        }
        Ok(Self::from_acc(self.field.clone(), self.vars.clone(), acc))
    }

    fn check_point(&self, a: &Point) -> Result<()> {
        if a.len() != self.nvars() || !a.coords.iter().all(|c| self.field.is_element(c)) {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn evaluate(&self, a: &Point) -> Result<Scalar> {
        self.check_point(a)?;
        let f = &self.field;
        let mut total = Scalar::ZERO;
        for (m, c) in &self.terms {
            let mut v = *c;
            for (j, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    v = f.mul(&v, &f.pow(&a.coords[j], e as u128));
                }
            }
            total = f.add(&total, &v);
        }
        Ok(total)
    }

    /// `f(x_1 + a_1, ..., x_n + a_n)`.
    pub fn shift_point(&self, a: &Point) -> Result<Poly> {
        self.check_point(a)?;
        if a.is_origin() {
            return Ok(self.clone());
        }
        let mut powers: HashMap<(usize, u16), Poly> = HashMap::new();
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            let mut fixed = Monomial::one(self.nvars());
            let mut expanded = Poly::one(self.field.clone(), self.vars.clone());
            for (j, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if a.coords[j].is_zero() {
                    fixed.exps[j] = e;
                    continue;
                }
                let power = match powers.entry((j, e)) {
                    std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                    std::collections::hash_map::Entry::Vacant(v) => {
                        let lin = Poly::var(self.field.clone(), self.vars.clone(), j)?.add(&Poly::constant(
                            self.field.clone(),
                            self.vars.clone(),
                            a.coords[j],
                        ))?;
                        v.insert(lin.pow(e as u32)?)
                    }
                };
                expanded = expanded.mul(power)?;
            }
            for (t, b) in expanded.mul_term(&fixed, c)?.terms {
                accumulate(&mut acc, &self.field, t, b);
            }
        }
        Ok(Self::from_acc(self.field.clone(), self.vars.clone(), acc))
    }

    /// Substitutes values for some variables; the variable context is unchanged.
    pub fn specialize(&self, assignment: &[(usize, Scalar)]) -> Poly {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            let mut exps = m.exps.clone();
            let mut v = *c;
            for (j, a) in assignment {
                let e = exps[*j];
                if e > 0 {
                    v = f.mul(&v, &f.pow(a, e as u128));
                    exps[*j] = 0;
                }
            }
            accumulate(&mut acc, f, Monomial { exps }, v);
        }
        Self::from_acc(self.field.clone(), self.vars.clone(), acc)
    }

    /// Exact quotient `f / g` by long division on leading terms, re-verified by multiplication.
    pub fn exact_divide(&self, g: &Poly) -> Result<Poly> {
        self.check_ring(g)?;
        let (lm_g, lc_g) = g.leading().cloned().ok_or(Error::ZeroDivisor)?;
        let inv = self.field.inv(&lc_g)?;
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((lm, lc)) = rem.leading().cloned() {
            let m = lm.checked_div(&lm_g).ok_or(Error::NotDivisible)?;
            let c = self.field.mul(&lc, &inv);
            rem = rem.sub(&g.mul_term(&m, &c)?)?;
            quotient.push((m, c));
        }
        let q = Poly::from_terms(self.field.clone(), self.vars.clone(), quotient)?;
        if q.mul(g)? != *self {
            return Err(Error::NotDivisible);
        }
        Ok(q)
    }

    /// Homogenization with a new last variable.
    pub fn homogenize(&self, name: &str) -> Result<Poly> {
        let vars = Arc::new(self.vars.with_appended(name)?);
        let d = self.total_degree().unwrap_or(0);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = m.exps.clone();
            exps.push((d - m.degree()) as u16);
            (Monomial { exps }, *c)
        });
        Poly::from_terms(self.field.clone(), vars, terms)
    }

    /// m-adic order at the origin and the lowest-degree form.
    pub fn order_and_initial(&self) -> Result<(u32, Poly)> {
        let ord = self.terms.first().ok_or(Error::ZeroInput)?.0.degree();
        let terms = self
            .terms
            .iter()
            .take_while(|(m, _)| m.degree() == ord)
            .cloned()
            .collect();
        Ok((
            ord,
            Poly {
                field: self.field.clone(),
                vars: self.vars.clone(),
                terms,
            },
        ))
    }

    /// Leading coefficient and the monic associate.
    pub fn monic(&self) -> Result<(Scalar, Poly)> {
        let lc = self.leading().ok_or(Error::ZeroInput)?.1;
        let inv = self.field.inv(&lc)?;
        Ok((lc, self.scale(&inv)))
    }

    /// Indices of variables dividing some support monomial.
    pub fn used_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars()];
        for (m, _) in &self.terms {
            for v in m.support() {
                used[v] = true;
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    /// Same polynomial with coefficients pushed through a field embedding.
    pub fn embed(&self, emb: &Embedding) -> Poly {
        let field = Arc::new(emb.target().clone());
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), emb.apply(c))).collect();
        Poly {
            field,
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Re-homes the polynomial into a larger variable context; `map[i]` is the
    /// new index of old variable `i`.
    pub fn extend_vars(&self, vars: Arc<VarCtx>, map: &[usize]) -> Result<Poly> {
        if map.len() != self.nvars() || map.iter().any(|&j| j >= vars.len()) {
            return Err(Error::ContextMismatch);
        }
        let n = vars.len();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0u16; n];
            for (i, &e) in m.exps.iter().enumerate() {
                exps[map[i]] = e;
            }
            (Monomial { exps }, *c)
        });
        Poly::from_terms(self.field.clone(), vars, terms)
    }
}

fn exceeds(m: &Monomial, q: u32, truncated: &[bool]) -> bool {
    m.exps.iter().zip(truncated).any(|(&e, &t)| t && e as u32 >= q)
}

/// `p^e` as an exponent bound, rejecting values past the exponent range.
pub fn frobenius_modulus(p: u32, e: u32) -> Result<u32> {
    if e == 0 {
        return Err(Error::InvalidParameter("e must be positive".into()));
    }
    let q = (p as u64).checked_pow(e).ok_or(Error::ExponentOverflow)?;
    if q > MAX_EXPONENT as u64 + 1 {
        return Err(Error::ExponentOverflow);
    }
    Ok(q as u32)
}

/// `f^(q-1)` modulo `(x_i^q : truncated[i])`, `q = p^e`.
///
/// Computed as `∏_{i<e} (f^(p-1))^[p^i]` with every intermediate product
/// reduced; reduction commutes with multiplication because exponents only
/// grow.
pub fn frobenius_power_mod_partial_bracket(f: &Poly, e: u32, truncated: &[bool]) -> Result<Poly> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    if truncated.len() != f.nvars() {
        return Err(Error::ContextMismatch);
    }
    let p = f.field().characteristic();
    let q = frobenius_modulus(p, e)?;
    let base = f.pow_mod_bracket(p - 1, q, truncated)?;
    let mut acc = base.clone();
    for i in 1..e {
        if acc.is_zero() {
            break;
        }
        let layer = base.bracket_frobenius(i, q, truncated)?;
        acc = acc.mul_mod_bracket(&layer, q, truncated)?;
    }
    Ok(acc)
}

/// Image of `f^(p^e - 1)` in `S / (x_1^(p^e), ..., x_n^(p^e))`.
pub fn frobenius_power_mod_bracket(f: &Poly, e: u32) -> Result<Poly> {
    frobenius_power_mod_partial_bracket(f, e, &vec![true; f.nvars()])
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return out.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.write_str(" + ")?;
            }
            let mut coeff = self.field.format_scalar(c);
            if coeff.contains('+') {
                coeff = format!("({coeff})");
            }
            if m.is_one() {
                out.write_str(&coeff)?;
            } else if c.is_one() {
                out.write_str(&m.format(&self.vars))?;
            } else {
                write!(out, "{coeff}*{}", m.format(&self.vars))?;
            }
        }
        Ok(())
    }
}
