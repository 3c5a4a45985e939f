//! Finite fields `F_{p^s}` with `p < 2^16` and `s ≤ 4`.
//!
//! Elements are stored as coordinate vectors in the power basis
//! `1, t, t^2, t^3` of `F_p[t]/(m(t))`, where `m` is the smallest monic
//! irreducible polynomial of degree `s` (coefficient vectors compared as
//! base-`p` integers, constant term least significant).

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const MAX_EXTENSION_DEGREE: usize = 4;
pub const MAX_CHARACTERISTIC: u64 = 1 << 16;

/// Element of `F_{p^s}`. Coordinates past the field's degree are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar {
    coords: [u32; MAX_EXTENSION_DEGREE],
}

impl Scalar {
    pub const ZERO: Scalar = Scalar {
        coords: [0; MAX_EXTENSION_DEGREE],
    };
    pub const ONE: Scalar = Scalar { coords: [1, 0, 0, 0] };

    pub fn coords(&self) -> &[u32; MAX_EXTENSION_DEGREE] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0; MAX_EXTENSION_DEGREE]
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::ONE
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_field(&self) -> bool {
        self.coords[1..].iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Mul,
    Neg,
    Inv,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u32,
    s: usize,
    /// Monic modulus, coefficients low to high (length `s + 1`), present iff `s > 1`.
    modulus: Option<Vec<u32>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds `F_{p^s}` with the canonical modulus.
    pub fn new(p: u64, s: usize) -> Result<Self> {
        if !is_prime(p) || p >= MAX_CHARACTERISTIC {
            return Err(Error::NotPrime(p));
        }
        if s == 0 || s > MAX_EXTENSION_DEGREE {
            return Err(Error::DegreeOutOfRange(s));
        }
        let p32 = p as u32;
        if s == 1 {
            return Ok(FieldCtx {
                p: p32,
                s,
                modulus: None,
            });
        }
        let total = (p as u128).pow(s as u32);
        for index in 0..total {
            let mut coeffs = Vec::with_capacity(s + 1);
            let mut rest = index;
            for _ in 0..s {
                coeffs.push((rest % p as u128) as u64);
                rest /= p as u128;
            }
            coeffs.push(1);
            if upoly::is_irreducible(&coeffs, p) {
                let modulus = coeffs.into_iter().map(|c| c as u32).collect();
                return Ok(FieldCtx {
                    p: p32,
                    s,
                    modulus: Some(modulus),
                });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.s as u32)
    }

    pub fn zero(&self) -> Scalar {
        Scalar::ZERO
    }

    pub fn one(&self) -> Scalar {
        Scalar::ONE
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        let r = v.rem_euclid(self.p as i64) as u32;
        let mut coords = [0; MAX_EXTENSION_DEGREE];
        coords[0] = r;
        Scalar { coords }
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Scalar> {
        if coords.len() > self.s || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::FieldMismatch);
        }
        let mut out = [0; MAX_EXTENSION_DEGREE];
        out[..coords.len()].copy_from_slice(coords);
        Ok(Scalar { coords: out })
    }

    /// The class of `t` in `F_p[t]/(m)`; `None` for prime fields.
    pub fn generator(&self) -> Option<Scalar> {
        (self.s > 1).then_some(Scalar { coords: [0, 1, 0, 0] })
    }

    pub fn is_element(&self, a: &Scalar) -> bool {
        a.coords
            .iter()
            .enumerate()
            .all(|(i, &c)| if i < self.s { c < self.p } else { c == 0 })
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let mut coords = [0; MAX_EXTENSION_DEGREE];
        for (i, c) in coords.iter_mut().enumerate().take(self.s) {
            let v = a.coords[i] as u64 + b.coords[i] as u64;
            *c = (v % self.p as u64) as u32;
        }
        Scalar { coords }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        let mut coords = [0; MAX_EXTENSION_DEGREE];
        for (i, c) in coords.iter_mut().enumerate().take(self.s) {
            *c = if a.coords[i] == 0 { 0 } else { self.p - a.coords[i] };
        }
        Scalar { coords }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let p = self.p as u64;
        if self.s == 1 {
            let v = (a.coords[0] as u64 * b.coords[0] as u64) % p;
            return Scalar {
                coords: [v as u32, 0, 0, 0],
            };
        }
        let s = self.s;
        let mut prod = [0u64; 2 * MAX_EXTENSION_DEGREE - 1];
        for i in 0..s {
            if a.coords[i] == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + a.coords[i] as u64 * b.coords[j] as u64) % p;
            }
        }
        let m = self.modulus.as_ref().expect("extension field has a modulus");
        for d in (s..2 * s - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            // t^d = t^(d-s) * t^s and t^s = -(m_0 + ... + m_{s-1} t^{s-1})
            for k in 0..s {
                let sub = c * m[k] as u64 % p;
                prod[d - s + k] = (prod[d - s + k] + p - sub) % p;
            }
        }
        let mut coords = [0; MAX_EXTENSION_DEGREE];
        for i in 0..s {
            coords[i] = prod[i] as u32;
        }
        Scalar { coords }
    }

    pub fn pow(&self, a: &Scalar, mut exp: u128) -> Scalar {
        let mut base = *a;
        let mut acc = Scalar::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a ↦ a^p`.
    pub fn frobenius(&self, a: &Scalar) -> Scalar {
        if self.s == 1 {
            *a
        } else {
            self.pow(a, self.p as u128)
        }
    }

    /// `a ↦ a^(p^i)`.
    pub fn frobenius_iter(&self, a: &Scalar, i: u32) -> Scalar {
        let i = i % self.s as u32;
        (0..i).fold(*a, |acc, _| self.frobenius(&acc))
    }

    /// Checked field operation; `b` is ignored for unary kinds.
    pub fn arith(&self, kind: ArithKind, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        if !self.is_element(a) || !self.is_element(b) {
            return Err(Error::FieldMismatch);
        }
        match kind {
            ArithKind::Add => Ok(self.add(a, b)),
            ArithKind::Mul => Ok(self.mul(a, b)),
            ArithKind::Neg => Ok(self.neg(a)),
            ArithKind::Inv => self.inv(a),
        }
    }

    /// Element with base-`p` digit expansion `index` (constant coordinate least significant).
    pub fn element(&self, index: u128) -> Scalar {
        let mut coords = [0; MAX_EXTENSION_DEGREE];
        let mut rest = index;
        for c in coords.iter_mut().take(self.s) {
            *c = (rest % self.p as u128) as u32;
            rest /= self.p as u128;
        }
        Scalar { coords }
    }

    pub fn index_of(&self, a: &Scalar) -> u128 {
        a.coords[..self.s]
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn format_scalar(&self, a: &Scalar) -> String {
        if self.s == 1 || a.is_prime_field() {
            return a.coords[0].to_string();
        }
        let mut out = String::new();
        for i in (0..self.s).rev() {
            let c = a.coords[i];
            if c == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            match (i, c) {
                (0, _) => write!(out, "{c}").unwrap(),
                (1, 1) => out.push('t'),
                (1, _) => write!(out, "{c}*t").unwrap(),
                (_, 1) => write!(out, "t^{i}").unwrap(),
                _ => write!(out, "{c}*t^{i}").unwrap(),
            }
        }
        out
    }
}

/// Field embedding `F_{p^a} → F_{p^b}` with `a | b`.
#[derive(Debug, Clone)]
pub struct Embedding {
    target: FieldCtx,
    /// Images of `1, t, ..., t^(a-1)`.
    images: Vec<Scalar>,
}

/// Largest target order for which a modulus root is searched by enumeration.
const ROOT_SEARCH_LIMIT: u128 = 1 << 22;

impl Embedding {
    pub fn new(source: &FieldCtx, target: &FieldCtx) -> Result<Self> {
        if source.p != target.p || !target.s.is_multiple_of(source.s) {
            return Err(Error::FieldMismatch);
        }
        if source.s == 1 {
            return Ok(Embedding {
                target: target.clone(),
                images: vec![Scalar::ONE],
            });
        }
        if source == target {
            let images = (0..source.s)
                .map(|i| source.element((source.p as u128).pow(i as u32)))
                .collect();
            return Ok(Embedding {
                target: target.clone(),
                images,
            });
        }
        if target.order() > ROOT_SEARCH_LIMIT {
            return Err(Error::FieldTooLarge(target.order()));
        }
        let m = source.modulus.as_ref().expect("extension field has a modulus");
        let root = target
            .elements()
            .find(|r| {
                let v = m.iter().rev().fold(Scalar::ZERO, |acc, &c| {
                    target.add(&target.mul(&acc, r), &target.from_int(c as i64))
                });
                v.is_zero()
            })
            .expect("a degree-dividing extension contains every root");
        let mut images = Vec::with_capacity(source.s);
        let mut pw = Scalar::ONE;
        for _ in 0..source.s {
            images.push(pw);
            pw = target.mul(&pw, &root);
        }
        Ok(Embedding {
            target: target.clone(),
            images,
        })
    }

    pub fn target(&self) -> &FieldCtx {
        &self.target
    }

    pub fn apply(&self, a: &Scalar) -> Scalar {
        let mut acc = Scalar::ZERO;
        for (i, img) in self.images.iter().enumerate() {
            let c = a.coords[i];
            if c != 0 {
                let term = self.target.mul(&self.target.from_int(c as i64), img);
                acc = self.target.add(&acc, &term);
            }
        }
        acc
    }
}

/// Dense univariate polynomials over `F_p`, coefficients low to high.
pub(crate) mod upoly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let d = r.len() - 1;
            let c = r[d] * lead_inv % p;
            for (k, &mk) in m.iter().enumerate() {
                let idx = d - dm + k;
                r[idx] = (r[idx] + p - c * mk % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// `base^(p^k) mod m` by repeated `p`-th powering.
    fn frobenius_power(base: &[u64], k: usize, m: &[u64], p: u64) -> Vec<u64> {
        let mut cur = base.to_vec();
        for _ in 0..k {
            let mut acc = vec![1u64];
            let mut b = cur.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod(&acc, &b, m, p);
                }
                b = mul_mod(&b, &b, m, p);
                e >>= 1;
            }
            cur = acc;
        }
        cur
    }

    /// Ben-Or test: `m` (monic, degree `s`) is irreducible iff
    /// `gcd(m, t^(p^i) - t) = 1` for `1 ≤ i ≤ s/2`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let s = m.len() - 1;
        if s == 0 {
            return false;
        }
        if s == 1 {
            return true;
        }
        let t = vec![0, 1];
        for i in 1..=s / 2 {
            let mut h = frobenius_power(&t, i, m, p);
            h.resize(h.len().max(2), 0);
            h[1] = (h[1] + p - 1) % p;
            trim(&mut h);
            let g = gcd(m, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}
