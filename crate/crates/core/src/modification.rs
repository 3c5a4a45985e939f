//! The `f = g·ℓ + h` construction with `ℓ = 1 + Σ a_i x_i`.
//!
//! Homogenizing gives `f̃ = g·ℓ̃ + h` with `ℓ̃ = z + Σ a_i x_i`; in the
//! coordinates `(x_1, ..., x_n, y = ℓ̃)` this is `g·y + h`, which is square-free
//! supported and irreducible whenever `g` is irreducible and does not divide
//! `h`. On the chart `z ≠ 0` the hypersurfaces `f̃ = 0` and `f = 0` differ by a
//! free variable, so the defect of the threshold of `f` at `P` can be read off
//! the transformed polynomial at `(P, ℓ(P))`.

use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Hypothesis, Result};
use crate::field::{Embedding, FieldCtx, Scalar};
use crate::frobenius::{
    build_regularity_certificate, fedder_fsplit, fpt_oracle, verify_regularity_certificate, CertificateCheck,
    FedderOutcome, RegCertificate,
};
use crate::poly::{Point, Poly, VarCtx};
use crate::structure::{disjoint_factorization, is_irreducible_sqfree, is_squarefree_supported, CIdeal};

#[derive(Debug, Clone, PartialEq)]
pub struct ModificationBuild {
    pub f: Poly,
    /// Homogenization of `f` in the variables `(x, z)`.
    pub ftilde: Poly,
    /// `g·y + h` in the variables `(x, y)`.
    pub transformed: Poly,
}

fn violated(h: Hypothesis) -> Error {
    Error::HypothesisViolated(h)
}

/// Checks the hypotheses on `(g, h, a)` and returns the first failure.
pub fn check_hypotheses(g: &Poly, h: &Poly, a: &[Scalar]) -> Result<()> {
    if !g.same_ring(h) {
        return Err(Error::ContextMismatch);
    }
    if a.len() != g.nvars() || a.iter().any(|c| !g.field().is_element(c)) {
        return Err(violated(Hypothesis::EllLength));
    }
    if h.is_zero() {
        return Err(violated(Hypothesis::HIsZero));
    }
    if !is_squarefree_supported(g) {
        return Err(violated(Hypothesis::GNotSquareFreeSupported));
    }
    if !is_squarefree_supported(h) {
        return Err(violated(Hypothesis::HNotSquareFreeSupported));
    }
    if !g.is_homogeneous() {
        return Err(violated(Hypothesis::GNotHomogeneous));
    }
    if !h.is_homogeneous() {
        return Err(violated(Hypothesis::HNotHomogeneous));
    }
    if g.is_zero() || g.is_constant() || !is_irreducible_sqfree(g)? {
        return Err(violated(Hypothesis::GReducible));
    }
    if h.total_degree() != g.total_degree().map(|d| d + 1) {
        return Err(violated(Hypothesis::DegreeMismatch));
    }
    match h.exact_divide(g) {
        Ok(_) => Err(violated(Hypothesis::GDividesH)),
        Err(Error::NotDivisible) => Ok(()),
        Err(e) => Err(e),
    }
}

/// `Σ c·m·r^e` where `e` is the exponent of `var` in `m` and `m` has `var` removed.
fn substitute(f: &Poly, var: usize, replacement: &Poly) -> Result<Poly> {
    let mut acc = Poly::zero(f.field().clone(), f.vars().clone());
    for (m, c) in f.terms() {
        let mut exps = m.exps().to_vec();
        let e = std::mem::take(&mut exps[var]);
        let rest = Poly::monomial(
            f.field().clone(),
            f.vars().clone(),
            crate::poly::Monomial::from_exps(exps),
            *c,
        )?;
        acc = acc.add(&rest.mul(&replacement.pow(e as u32)?)?)?;
    }
    Ok(acc)
}

fn linear_form(field: &Arc<FieldCtx>, vars: &Arc<VarCtx>, a: &[Scalar], constant_var: Option<usize>) -> Result<Poly> {
    let mut ell = match constant_var {
        None => Poly::one(field.clone(), vars.clone()),
        Some(z) => Poly::var(field.clone(), vars.clone(), z)?,
    };
    for (i, c) in a.iter().enumerate() {
        ell = ell.add(&Poly::var(field.clone(), vars.clone(), i)?.scale(c))?;
    }
    Ok(ell)
}

pub fn modification_build(g: &Poly, h: &Poly, a: &[Scalar]) -> Result<ModificationBuild> {
    check_hypotheses(g, h, a)?;
    let field = g.field().clone();
    let n = g.nvars();

    let ell = linear_form(&field, g.vars(), a, None)?;
    let f = g.mul(&ell)?.add(h)?;

    let z_name = g.vars().fresh_name("z");
    let ftilde = f.homogenize(&z_name)?;
    let zvars = ftilde.vars().clone();
    let identity: Vec<usize> = (0..n).collect();
    let g_z = g.extend_vars(zvars.clone(), &identity)?;
    let h_z = h.extend_vars(zvars.clone(), &identity)?;
    let ell_tilde = linear_form(&field, &zvars, a, Some(n))?;
    assert_eq!(
        ftilde,
        g_z.mul(&ell_tilde)?.add(&h_z)?,
        "homogenization disagrees with g·ℓ̃ + h"
    );

    let y_name = g.vars().fresh_name("y");
    let yvars = Arc::new(g.vars().with_appended(&y_name)?);
    let y = Poly::var(field.clone(), yvars.clone(), n)?;
    let transformed = g
        .extend_vars(yvars.clone(), &identity)?
        .mul(&y)?
        .add(&h.extend_vars(yvars, &identity)?)?;

    // rewriting y = ℓ̃ must recover f̃; compare in the variables (x, z, y)
    let wide = Arc::new(zvars.with_appended(&y_name)?);
    let x_z: Vec<usize> = (0..=n).collect();
    let x_y: Vec<usize> = (0..n).chain([n + 1]).collect();
    let back = substitute(
        &transformed.extend_vars(wide.clone(), &x_y)?,
        n + 1,
        &ell_tilde.extend_vars(wide.clone(), &x_z)?,
    )?;
    assert_eq!(
        back,
        ftilde.extend_vars(wide, &x_z)?,
        "coordinate change y = ℓ̃ does not recover f̃"
    );

    Ok(ModificationBuild { f, ftilde, transformed })
}

#[derive(Debug, Clone)]
pub struct ModificationOptions {
    pub e_max: u32,
    pub points: usize,
    /// Largest extension degree over the coefficient field searched for points.
    pub s_max: usize,
    pub e_list: Vec<u32>,
}

impl Default for ModificationOptions {
    fn default() -> Self {
        ModificationOptions {
            e_max: 3,
            points: 20,
            s_max: 2,
            e_list: vec![1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    pub point: Point,
    pub field_degree: usize,
    pub mult: u32,
    /// `mult - 1`.
    pub dfpt: i64,
    /// `(e, dim - λ(e))` from the oracle on the transformed polynomial at `(P, ℓ(P))`.
    pub oracle_dfpt: Vec<(u32, Option<Ratio<i64>>)>,
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct ModificationReport {
    pub build: ModificationBuild,
    pub squarefree: bool,
    pub irreducible: bool,
    pub fedder: Option<FedderOutcome>,
    pub certificate: Option<RegCertificate>,
    pub certificate_check: Option<CertificateCheck>,
    pub points: Vec<PointCheck>,
}

impl ModificationReport {
    pub fn passed(&self) -> bool {
        self.squarefree
            && self.irreducible
            && matches!(self.fedder, Some(FedderOutcome::Split(_)))
            && self.certificate_check.as_ref().is_some_and(|c| c.is_valid())
            && !self.points.is_empty()
            && self.points.iter().all(|p| p.consistent)
    }
}

/// Builds the modification, certifies the transformed polynomial at the
/// origin and compares `mult - 1` with the oracle at up to `opts.points`
/// points of `V(f)`.
pub fn modification_pipeline(
    g: &Poly,
    h: &Poly,
    a: &[Scalar],
    opts: &ModificationOptions,
) -> Result<ModificationReport> {
    let build = modification_build(g, h, a)?;
    let t = &build.transformed;
    let squarefree = is_squarefree_supported(t);
    let irreducible = squarefree && is_irreducible_sqfree(t)?;

    let (mut fedder, mut certificate, mut certificate_check) = (None, None, None);
    if squarefree {
        let ideal = disjoint_factorization(t)?;
        fedder = Some(fedder_fsplit(&ideal, 1)?);
        match build_regularity_certificate(&ideal, opts.e_max) {
            Ok(cert) => {
                certificate_check = Some(verify_regularity_certificate(&ideal, &cert));
                certificate = Some(cert);
            }
            Err(Error::CertificateSearchExhausted { stage, .. }) => {
                certificate_check = Some(CertificateCheck::Invalid {
                    stage: Some(stage),
                    reason: "certificate search exhausted".into(),
                });
            }
            Err(e) => return Err(e),
        }
    }

    let points = point_checks(&build, a, opts)?;
    Ok(ModificationReport {
        build,
        squarefree,
        irreducible,
        fedder,
        certificate,
        certificate_check,
        points,
    })
}

fn point_checks(build: &ModificationBuild, a: &[Scalar], opts: &ModificationOptions) -> Result<Vec<PointCheck>> {
    let base = build.f.field().clone();
    let n = build.f.nvars();
    let mut out = Vec::new();
    for j in 1..=opts.s_max {
        let degree = base.degree() * j;
        if degree > 4 || out.len() >= opts.points {
            break;
        }
        let field = Arc::new(FieldCtx::new(base.characteristic() as u64, degree)?);
        let emb = Embedding::new(&base, &field)?;
        let f = build.f.embed(&emb);
        let transformed = build.transformed.embed(&emb);
        let a: Vec<Scalar> = a.iter().map(|c| emb.apply(c)).collect();
        let order = field.order();
        let Some(size) = order.checked_pow(n as u32) else { break };
        for idx in 0..size {
            if out.len() >= opts.points {
                break;
            }
            let mut rest = idx;
            let mut coords = vec![field.zero(); n];
            for c in coords.iter_mut().rev() {
                *c = field.element(rest % order);
                rest /= order;
            }
            // points of the smaller fields were already visited
            if j > 1 && coords.iter().all(|c| base_contains(&field, &base, c)) {
                continue;
            }
            let point = Point::new(coords);
            if !f.evaluate(&point)?.is_zero() {
                continue;
            }
            out.push(check_point(&f, &transformed, &a, point, degree, &opts.e_list)?);
        }
    }
    Ok(out)
}

fn base_contains(field: &FieldCtx, base: &FieldCtx, c: &Scalar) -> bool {
    // F_{p^k} ⊂ F_{p^K} is the fixed field of the k-th Frobenius power
    field.frobenius_iter(c, base.degree() as u32) == *c
}

fn check_point(
    f: &Poly,
    transformed: &Poly,
    a: &[Scalar],
    point: Point,
    degree: usize,
    e_list: &[u32],
) -> Result<PointCheck> {
    let field = f.field();
    let mult = f.shift_point(&point)?.order_and_initial()?.0;
    let dfpt = mult as i64 - 1;

    let mut ell = field.one();
    for (c, x) in a.iter().zip(point.coords()) {
        ell = field.add(&ell, &field.mul(c, x));
    }
    let mut lifted = point.coords().to_vec();
    lifted.push(ell);
    let shifted = transformed.shift_point(&Point::new(lifted))?;
    let ideal = CIdeal::from_generators(vec![shifted])?;
    let dim = Ratio::from_integer(transformed.nvars() as i64 - 1);
    let mut oracle_dfpt = Vec::with_capacity(e_list.len());
    let mut consistent = true;
    for &e in e_list {
        let d = fpt_oracle(&ideal, e)?.lambda.map(|l| dim - l);
        consistent &= d == Some(Ratio::from_integer(dfpt));
        oracle_dfpt.push((e, d));
    }
    Ok(PointCheck {
        point,
        field_degree: degree,
        mult,
        dfpt,
        oracle_dfpt,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::test_support::{poly, ring};

    #[test]
    fn build_examples() {
        let (f2, v) = ring(2, "x y z w");
        let g = poly(&f2, &v, "x*y + z*w");
        let h = poly(&f2, &v, "x*z*w");
        let b = modification_build(&g, &h, &[f2.zero(); 4]).unwrap();
        assert!(is_squarefree_supported(&b.transformed));
        assert_eq!(b.transformed.vars().names().last().unwrap(), "y0");
        assert_eq!(b.f, g.add(&h).unwrap());

        let (f3, v3) = ring(3, "x y z w");
        let g3 = poly(&f3, &v3, "x*y + z*w");
        let h3 = poly(&f3, &v3, "x*z*w");
        let a = [f3.one(), f3.zero(), f3.zero(), f3.zero()];
        let b = modification_build(&g3, &h3, &a).unwrap();
        assert!(!is_squarefree_supported(&b.f));
        assert!(is_squarefree_supported(&b.transformed));
        assert!(is_irreducible_sqfree(&b.transformed).unwrap());
    }

    #[test]
    fn hypothesis_failures() {
        let (f, v) = ring(2, "x y z w");
        let g = poly(&f, &v, "x*y + z*w");
        let zero = [f.zero(); 4];
        let h = g.mul(&poly(&f, &v, "w")).unwrap();
        assert_eq!(
            modification_build(&g, &h, &zero).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::HNotSquareFreeSupported)
        );
        let (f5, v5) = ring(2, "x y z w u");
        let g5 = poly(&f5, &v5, "x*y + z*w");
        let h5 = g5.mul(&poly(&f5, &v5, "u")).unwrap();
        assert_eq!(
            modification_build(&g5, &h5, &[f5.zero(); 5]).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::GDividesH)
        );
        let hz = Poly::zero(f.clone(), v.clone());
        assert_eq!(
            modification_build(&g, &hz, &zero).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::HIsZero)
        );
        assert_eq!(
            modification_build(&g, &poly(&f, &v, "x*y"), &zero).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::DegreeMismatch)
        );
        assert_eq!(
            modification_build(&g, &poly(&f, &v, "x*z*w"), &zero[..3]).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::EllLength)
        );
        let red = poly(&f, &v, "x*z + x*w + y*z + y*w");
        assert_eq!(
            modification_build(&red, &poly(&f, &v, "x*y*z"), &zero).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::GReducible)
        );
        assert_eq!(
            modification_build(&g, &poly(&f, &v, "x*z*w + x"), &zero).unwrap_err(),
            Error::HypothesisViolated(Hypothesis::HNotHomogeneous)
        );
    }

    #[test]
    fn pipeline_passes_on_quadric() {
        for p in [2, 3] {
            let (f, v) = ring(p, "x y z w");
            let g = poly(&f, &v, "x*y + z*w");
            let h = poly(&f, &v, "x*z*w");
            for a in [[f.zero(); 4], [f.one(), f.zero(), f.zero(), f.zero()]] {
                let r = modification_pipeline(&g, &h, &a, &ModificationOptions::default()).unwrap();
                assert_eq!(r.points.len(), 20);
                assert!(
                    r.passed(),
                    "p = {p}, a = {a:?}: {:?}",
                    r.points.iter().find(|c| !c.consistent)
                );
            }
        }
    }
}
