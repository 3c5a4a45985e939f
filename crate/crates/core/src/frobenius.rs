//! Frobenius criteria for `S/Q` with `Q` generated by variable-disjoint
//! square-free supported factors: F-splitting, the complete-intersection
//! strong F-regularity condition, localization certificates, and the
//! F-pure threshold oracle.
//!
//! Inverting a variable is modeled by no longer truncating its exponents:
//! after inverting `V`, the maximal ideal of the localization is generated
//! by the remaining variables.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::poly::{frobenius_modulus, frobenius_power_mod_partial_bracket, Monomial, Poly};
use crate::structure::CIdeal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWitness {
    pub e: u32,
    pub q: u32,
    pub witness: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FedderOutcome {
    Split(SplitWitness),
    NotSplit { e: u32, q: u32 },
}

impl FedderOutcome {
    pub fn witness(&self) -> Option<&SplitWitness> {
        match self {
            FedderOutcome::Split(w) => Some(w),
            FedderOutcome::NotSplit { .. } => None,
        }
    }
}

fn all_truncated(n: usize) -> Vec<bool> {
    vec![true; n]
}

fn truncation_mask(n: usize, inverted: &[usize]) -> Vec<bool> {
    let mut mask = vec![true; n];
    for &v in inverted {
        mask[v] = false;
    }
    mask
}

fn within_bracket(m: &Monomial, q: u32, truncated: &[bool]) -> bool {
    m.exps().iter().zip(truncated).all(|(&e, &t)| !t || (e as u32) < q)
}

/// `f^(q-1) mod m^[q]` for the product of the generators.
fn kernel(ideal: &CIdeal, e: u32, truncated: &[bool]) -> Result<Poly> {
    frobenius_power_mod_partial_bracket(&ideal.product()?, e, truncated)
}

/// Fedder's test at one `e`: the least monomial of `f^(q-1)` outside `m^[q]`.
pub fn fedder_fsplit(ideal: &CIdeal, e: u32) -> Result<FedderOutcome> {
    let q = frobenius_modulus(ideal.field().characteristic(), e)?;
    let reduced = kernel(ideal, e, &all_truncated(ideal.nvars()))?;
    Ok(match reduced.least() {
        Some((m, _)) => {
            assert!((m.max_exponent() as u32) < q, "witness exceeds the bracket bound");
            FedderOutcome::Split(SplitWitness {
                e,
                q,
                witness: m.clone(),
            })
        }
        None => FedderOutcome::NotSplit { e, q },
    })
}

/// Rechecks that the witness survives in `f^(q-1) mod m^[q]`.
pub fn verify_split_witness(ideal: &CIdeal, w: &SplitWitness) -> Result<bool> {
    let q = frobenius_modulus(ideal.field().characteristic(), w.e)?;
    if q != w.q || w.witness.len() != ideal.nvars() {
        return Ok(false);
    }
    let reduced = kernel(ideal, w.e, &all_truncated(ideal.nvars()))?;
    Ok(!reduced.coefficient(&w.witness).is_zero())
}

/// Rejects multipliers divisible by a generator, i.e. lying in a minimal
/// prime of `Q`.
fn check_multiplier(ideal: &CIdeal, g: &Monomial) -> Result<()> {
    let gp = Poly::monomial(
        ideal.field().clone(),
        ideal.vars().clone(),
        g.clone(),
        ideal.field().one(),
    )?;
    for f in ideal.factors() {
        match gp.exact_divide(f) {
            Ok(_) => return Err(Error::MultiplierInMinimalPrime),
            Err(Error::NotDivisible) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Decides `g·f^(q-1) ∉ m^[q]`, returning the least surviving monomial.
pub fn glassbrenner_condition(ideal: &CIdeal, g: &Monomial, e: u32) -> Result<Option<Monomial>> {
    if g.len() != ideal.nvars() {
        return Err(Error::ContextMismatch);
    }
    check_multiplier(ideal, g)?;
    let q = frobenius_modulus(ideal.field().characteristic(), e)?;
    let mask = all_truncated(ideal.nvars());
    let reduced = kernel(ideal, e, &mask)?;
    let product = reduced.mul_term(g, &ideal.field().one())?.reduce_mod_bracket(q, &mask);
    Ok(product.least().map(|(m, _)| m.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub inverted_var: usize,
    pub e: u32,
    pub multiplier: Monomial,
    pub witness: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRecord {
    pub factor: usize,
    pub unit_monomial: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegCertificate {
    pub stages: Vec<Stage>,
    pub base: Vec<BaseRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateCheck {
    Valid,
    /// `stage` is `None` when the base case fails.
    Invalid {
        stage: Option<usize>,
        reason: String,
    },
}

impl CertificateCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, CertificateCheck::Valid)
    }
}

fn uninverted_degree(m: &Monomial, inverted: &[bool]) -> u32 {
    m.exps()
        .iter()
        .zip(inverted)
        .filter(|(_, &inv)| !inv)
        .map(|(&e, _)| e as u32)
        .sum()
}

/// Least support monomial of `f` with the given un-inverted degree.
fn monomial_of_uninverted_degree(f: &Poly, inverted: &[bool], degree: u32) -> Option<Monomial> {
    f.terms()
        .iter()
        .map(|(m, _)| m)
        .find(|m| uninverted_degree(m, inverted) == degree)
        .cloned()
}

/// The stage condition with inverted set `inverted`: the least monomial of
/// `x_v · f^(q-1)` modulo `(x_i^q : i ∉ inverted)`.
fn stage_witness(ideal: &CIdeal, reduced: &Poly, inverted: &[usize], v: usize, q: u32) -> Result<Option<Monomial>> {
    let mask = truncation_mask(ideal.nvars(), inverted);
    let xv = Monomial::var(ideal.nvars(), v);
    let product = reduced
        .mul_term(&xv, &ideal.field().one())?
        .reduce_mod_bracket(q, &mask);
    Ok(product.least().map(|(m, _)| m.clone()))
}

/// Builds a certificate following the localization induction: invert a
/// variable of the first factor whose support has no monomial of
/// un-inverted degree at most one, until every remaining factor exposes a
/// degree-one monomial.
pub fn build_regularity_certificate(ideal: &CIdeal, e_max: u32) -> Result<RegCertificate> {
    Ok(build_regularity_certificate_traced(ideal, e_max)?.0)
}

/// As [`build_regularity_certificate`], also returning notes on fallback
/// stages and discharged factors.
pub fn build_regularity_certificate_traced(ideal: &CIdeal, e_max: u32) -> Result<(RegCertificate, Vec<String>)> {
    if e_max == 0 {
        return Err(Error::InvalidParameter("e_max must be positive".into()));
    }
    if ideal.factors().iter().any(|f| f.is_zero() || f.is_constant()) {
        return Err(Error::ZeroOrConstant);
    }
    let n = ideal.nvars();
    let p = ideal.field().characteristic();
    let generator_vars: Vec<usize> = ideal.variable_generators().into_iter().flatten().collect();
    let mut notes = Vec::new();
    let mut inverted: Vec<usize> = Vec::new();
    let mut stages = Vec::new();
    // kernels depend on the inverted set, so they are recomputed per stage
    loop {
        let mut inv_mask = vec![false; n];
        for &v in &inverted {
            inv_mask[v] = true;
        }
        let mut offending = None;
        for (i, f) in ideal.factors().iter().enumerate() {
            let min = f
                .terms()
                .iter()
                .map(|(m, _)| uninverted_degree(m, &inv_mask))
                .min()
                .unwrap_or(0);
            if min == 0 {
                notes.push(format!("factor {i} is a unit after inverting {inverted:?}"));
            } else if min >= 2 && offending.is_none() {
                offending = Some(i);
            }
        }
        notes.dedup();
        let Some(target) = offending else {
            let base = ideal
                .factors()
                .iter()
                .enumerate()
                .filter_map(|(i, f)| {
                    monomial_of_uninverted_degree(f, &inv_mask, 1).map(|m| BaseRecord {
                        factor: i,
                        unit_monomial: m,
                    })
                })
                .filter(|r| monomial_of_uninverted_degree(&ideal.factors()[r.factor], &inv_mask, 0).is_none())
                .collect();
            return Ok((RegCertificate { stages, base }, notes));
        };

        let preferred = ideal.varsets()[target].iter().copied().find(|v| !inv_mask[*v]);
        let mut found = None;
        let mut kernels: Vec<Option<(u32, Poly)>> = vec![None; e_max as usize];
        let mut kernel_at = |e: u32| -> Result<(u32, Poly)> {
            if let Some(k) = &kernels[e as usize - 1] {
                return Ok(k.clone());
            }
            let q = frobenius_modulus(p, e)?;
            let k = (q, kernel(ideal, e, &truncation_mask(n, &inverted))?);
            kernels[e as usize - 1] = Some(k.clone());
            Ok(k)
        };
        if let Some(v) = preferred {
            for e in 1..=e_max {
                let (q, reduced) = kernel_at(e)?;
                if let Some(w) = stage_witness(ideal, &reduced, &inverted, v, q)? {
                    found = Some((v, e, w));
                    break;
                }
            }
        }
        if found.is_none() {
            'search: for v in (0..n).filter(|v| !inv_mask[*v] && !generator_vars.contains(v)) {
                for e in 1..=e_max {
                    let (q, reduced) = kernel_at(e)?;
                    if let Some(w) = stage_witness(ideal, &reduced, &inverted, v, q)? {
                        notes.push(format!(
                            "stage {} used the exhaustive (variable, e) search",
                            stages.len()
                        ));
                        found = Some((v, e, w));
                        break 'search;
                    }
                }
            }
        }
        let Some((v, e, witness)) = found else {
            return Err(Error::CertificateSearchExhausted {
                stage: stages.len(),
                e_max,
            });
        };
        stages.push(Stage {
            inverted_var: v,
            e,
            multiplier: Monomial::var(n, v),
            witness,
        });
        inverted.push(v);
    }
}

/// Rechecks every stage condition and the base case.
pub fn verify_regularity_certificate(ideal: &CIdeal, cert: &RegCertificate) -> CertificateCheck {
    match verify_inner(ideal, cert) {
        Ok(check) => check,
        Err(e) => CertificateCheck::Invalid {
            stage: None,
            reason: e.to_string(),
        },
    }
}

fn verify_inner(ideal: &CIdeal, cert: &RegCertificate) -> Result<CertificateCheck> {
    let n = ideal.nvars();
    let p = ideal.field().characteristic();
    let generator_vars: Vec<usize> = ideal.variable_generators().into_iter().flatten().collect();
    let invalid = |stage: Option<usize>, reason: String| Ok(CertificateCheck::Invalid { stage, reason });
    let mut inverted: Vec<usize> = Vec::new();
    for (k, st) in cert.stages.iter().enumerate() {
        let v = st.inverted_var;
        if v >= n || inverted.contains(&v) {
            return invalid(Some(k), format!("variable {v} is out of range or already inverted"));
        }
        if generator_vars.contains(&v) {
            return invalid(Some(k), "multiplier lies in a minimal prime".into());
        }
        if st.multiplier != Monomial::var(n, v) {
            return invalid(Some(k), "multiplier is not the inverted variable".into());
        }
        if st.witness.len() != n || st.e == 0 {
            return invalid(Some(k), "malformed stage".into());
        }
        let q = match frobenius_modulus(p, st.e) {
            Ok(q) => q,
            Err(e) => return invalid(Some(k), e.to_string()),
        };
        let mask = truncation_mask(n, &inverted);
        if !within_bracket(&st.witness, q, &mask) {
            return invalid(Some(k), "witness exceeds the bracket bound".into());
        }
        let reduced = kernel(ideal, st.e, &mask)?;
        let product = reduced
            .mul_term(&st.multiplier, &ideal.field().one())?
            .reduce_mod_bracket(q, &mask);
        if product.coefficient(&st.witness).is_zero() {
            return invalid(
                Some(k),
                format!("witness {} does not appear", st.witness.format(ideal.vars())),
            );
        }
        inverted.push(v);
    }

    let mut inv_mask = vec![false; n];
    for &v in &inverted {
        inv_mask[v] = true;
    }
    let mut covered = vec![false; ideal.len()];
    let mut unit_vars: Vec<usize> = Vec::new();
    for r in &cert.base {
        let Some(f) = ideal.factors().get(r.factor) else {
            return invalid(None, format!("factor index {} out of range", r.factor));
        };
        if covered[r.factor] {
            return invalid(None, format!("factor {} listed twice", r.factor));
        }
        if r.unit_monomial.len() != n || f.coefficient(&r.unit_monomial).is_zero() {
            return invalid(
                None,
                format!("unit monomial of factor {} is not in its support", r.factor),
            );
        }
        if uninverted_degree(&r.unit_monomial, &inv_mask) != 1 {
            return invalid(
                None,
                format!(
                    "unit monomial of factor {} has un-inverted degree other than one",
                    r.factor
                ),
            );
        }
        let var = r.unit_monomial.support().find(|v| !inv_mask[*v]).expect("degree one");
        if unit_vars.contains(&var) {
            return invalid(None, "unit variables are not distinct".into());
        }
        unit_vars.push(var);
        covered[r.factor] = true;
    }
    for (i, f) in ideal.factors().iter().enumerate() {
        let discharged = monomial_of_uninverted_degree(f, &inv_mask, 0).is_some();
        if !covered[i] && !discharged {
            return invalid(None, format!("factor {i} has no base record"));
        }
    }
    Ok(CertificateCheck::Valid)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptSample {
    pub e: u32,
    pub q: u32,
    /// `None` when `f^(q-1) ∈ m^[q]`.
    pub b: Option<u64>,
    pub lambda: Option<Ratio<i64>>,
}

/// `b(q)`: the largest total slack `Σ (q-1-w_i)` over surviving monomials
/// `w` of `f^(q-1) mod m^[q]`, and `λ = b/(q-1)`.
pub fn fpt_oracle(ideal: &CIdeal, e: u32) -> Result<FptSample> {
    let q = frobenius_modulus(ideal.field().characteristic(), e)?;
    let reduced = kernel(ideal, e, &all_truncated(ideal.nvars()))?;
    let b = reduced
        .terms()
        .iter()
        .map(|(m, _)| m.exps().iter().map(|&w| (q - 1 - w as u32) as u64).sum::<u64>())
        .max();
    let lambda = b.map(|b| Ratio::new(b as i64, (q - 1) as i64));
    Ok(FptSample { e, q, b, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::test_support::{poly, ring};
    use crate::structure::disjoint_factorization;

    fn mono(v: &crate::poly::VarCtx, text: &str) -> Monomial {
        let mut exps = vec![0u16; v.len()];
        for name in text.split('*') {
            exps[v.index_of(name).unwrap()] += 1;
        }
        Monomial::from_exps(exps)
    }

    #[test]
    fn fedder_examples() {
        let (f, v) = ring(2, "x y z w a b c d");
        let q = disjoint_factorization(&poly(&f, &v, "x*y + z*w")).unwrap();
        let out = fedder_fsplit(&q, 1).unwrap();
        assert_eq!(out.witness().unwrap().witness, mono(&v, "x*y"));
        assert!(verify_split_witness(&q, out.witness().unwrap()).unwrap());

        let sq = CIdeal::from_generators(vec![poly(&f, &v, "x^2")]).unwrap();
        assert_eq!(fedder_fsplit(&sq, 1).unwrap(), FedderOutcome::NotSplit { e: 1, q: 2 });

        let two = disjoint_factorization(&poly(&f, &v, "x*y + z*w").mul(&poly(&f, &v, "a*b + c*d")).unwrap()).unwrap();
        assert_eq!(
            fedder_fsplit(&two, 1).unwrap().witness().unwrap().witness,
            mono(&v, "x*y*a*b")
        );
    }

    #[test]
    fn fedder_rejects_large_e() {
        let (f, v) = ring(2, "x y");
        let q = disjoint_factorization(&poly(&f, &v, "x + y")).unwrap();
        assert_eq!(fedder_fsplit(&q, 17), Err(Error::ExponentOverflow));
    }

    #[test]
    fn glassbrenner_examples() {
        let (f, v) = ring(2, "x y z w");
        let q = disjoint_factorization(&poly(&f, &v, "x*y + z*w")).unwrap();
        assert_eq!(
            glassbrenner_condition(&q, &mono(&v, "x"), 1).unwrap(),
            Some(mono(&v, "x*z*w"))
        );
        assert_eq!(glassbrenner_condition(&q, &mono(&v, "x*y*z*w"), 1).unwrap(), None);
        let smooth = disjoint_factorization(&poly(&f, &v, "x + y*z")).unwrap();
        assert_eq!(
            glassbrenner_condition(&smooth, &Monomial::one(4), 1).unwrap(),
            Some(mono(&v, "x"))
        );
        let lin = disjoint_factorization(&poly(&f, &v, "x")).unwrap();
        assert_eq!(
            glassbrenner_condition(&lin, &mono(&v, "x*y"), 1),
            Err(Error::MultiplierInMinimalPrime)
        );
    }

    #[test]
    fn certificate_examples() {
        let (f, v) = ring(2, "x y z w a b c d");
        let smooth = disjoint_factorization(&poly(&f, &v, "x + y*z")).unwrap();
        let cert = build_regularity_certificate(&smooth, 3).unwrap();
        assert!(cert.stages.is_empty());
        assert_eq!(
            cert.base,
            vec![BaseRecord {
                factor: 0,
                unit_monomial: mono(&v, "x")
            }]
        );
        assert!(verify_regularity_certificate(&smooth, &cert).is_valid());

        let q = disjoint_factorization(&poly(&f, &v, "x*y + z*w")).unwrap();
        let cert = build_regularity_certificate(&q, 3).unwrap();
        assert_eq!(
            cert.stages,
            vec![Stage {
                inverted_var: 0,
                e: 1,
                multiplier: mono(&v, "x"),
                witness: mono(&v, "x*z*w")
            }]
        );
        assert_eq!(
            cert.base,
            vec![BaseRecord {
                factor: 0,
                unit_monomial: mono(&v, "x*y")
            }]
        );
        assert!(verify_regularity_certificate(&q, &cert).is_valid());

        let mut bad = cert.clone();
        bad.stages[0].witness = mono(&v, "x*y");
        assert_eq!(
            verify_regularity_certificate(&q, &bad),
            CertificateCheck::Invalid {
                stage: Some(0),
                reason: "witness x*y does not appear".into()
            }
        );

        let two = disjoint_factorization(&poly(&f, &v, "x*y + z*w").mul(&poly(&f, &v, "a*b + c*d")).unwrap()).unwrap();
        let cert = build_regularity_certificate(&two, 3).unwrap();
        let inverted: Vec<usize> = cert.stages.iter().map(|s| s.inverted_var).collect();
        assert_eq!(inverted, vec![0, 4]);
        let units: Vec<Monomial> = cert.base.iter().map(|r| r.unit_monomial.clone()).collect();
        assert_eq!(units, vec![mono(&v, "x*y"), mono(&v, "a*b")]);
        assert!(verify_regularity_certificate(&two, &cert).is_valid());
    }

    #[test]
    fn verifier_rejects_missing_base() {
        let (f, v) = ring(2, "x y z w");
        let q = disjoint_factorization(&poly(&f, &v, "x*y + z*w")).unwrap();
        let mut cert = build_regularity_certificate(&q, 3).unwrap();
        cert.base.clear();
        assert!(matches!(
            verify_regularity_certificate(&q, &cert),
            CertificateCheck::Invalid { stage: None, .. }
        ));
        cert = RegCertificate {
            stages: vec![],
            base: vec![],
        };
        assert!(!verify_regularity_certificate(&q, &cert).is_valid());
    }

    #[test]
    fn fpt_examples() {
        let (f2, v) = ring(2, "x y z w");
        let q = disjoint_factorization(&poly(&f2, &v, "x*y + z*w")).unwrap();
        let s = fpt_oracle(&q, 1).unwrap();
        assert_eq!((s.b, s.lambda), (Some(2), Some(Ratio::from_integer(2))));
        let s = fpt_oracle(&q, 2).unwrap();
        assert_eq!((s.b, s.lambda), (Some(6), Some(Ratio::from_integer(2))));

        let (f3, v3) = ring(3, "x y z w");
        let q = disjoint_factorization(&poly(&f3, &v3, "x*y + z*w")).unwrap();
        assert_eq!(fpt_oracle(&q, 1).unwrap().b, Some(4));

        let (f, v) = ring(2, "x y");
        let q = disjoint_factorization(&poly(&f, &v, "x")).unwrap();
        let s = fpt_oracle(&q, 2).unwrap();
        assert_eq!((s.q, s.b, s.lambda), (4, Some(3), Some(Ratio::from_integer(1))));

        let sq = CIdeal::from_generators(vec![poly(&f, &v, "x^2")]).unwrap();
        assert_eq!(fpt_oracle(&sq, 1).unwrap().b, None);
    }
}
