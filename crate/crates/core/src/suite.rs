//! Seeded random square-free supported inputs and the batch run of every
//! check on them.

use std::sync::Arc;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::frobenius::{
    build_regularity_certificate, fedder_fsplit, fpt_oracle, verify_regularity_certificate, verify_split_witness,
    CertificateCheck, FedderOutcome, FptSample, RegCertificate,
};
use crate::invariants::{dfpt_at, InvariantReport};
use crate::poly::{Monomial, Point, Poly, VarCtx};
use crate::structure::{
    disjoint_factorization_with, is_irreducible_sqfree, squarefree_violation, FactorOptions, Factorization,
};

/// Rejection-sampling cap per factor.
pub const SAMPLE_BUDGET: usize = 10_000;

/// `t` irreducible square-free supported factors without constant term on
/// disjoint variable blocks covering all `n` variables. The product has at
/// most `max_terms` terms unless a block needs two terms to be irreducible.
pub fn random_sqfree_factors(
    field: &Arc<FieldCtx>,
    vars: &Arc<VarCtx>,
    max_terms: usize,
    t: usize,
    seed: u64,
) -> Result<Vec<Poly>> {
    let n = vars.len();
    if t == 0 || t > n {
        return Err(Error::InvalidParameter(format!(
            "cannot place {t} nonempty blocks in {n} variables"
        )));
    }
    if max_terms == 0 {
        return Err(Error::InvalidParameter("max_terms must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(&mut rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(t - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(t);
    let mut start = 0;
    for end in cuts.into_iter().chain([n]) {
        let mut b = order[start..end].to_vec();
        b.sort_unstable();
        blocks.push(b);
        start = end;
    }

    // a block of two or more variables needs two terms to be irreducible
    let min_terms: Vec<usize> = blocks.iter().map(|b| if b.len() == 1 { 1 } else { 2 }).collect();
    let mut budget = max_terms;
    let mut factors = Vec::with_capacity(t);
    for (i, block) in blocks.iter().enumerate() {
        let reserve: usize = min_terms[i + 1..].iter().product();
        let most = (budget / reserve)
            .min((1usize << block.len().min(20)) - 1)
            .max(min_terms[i]);
        let k = rng.gen_range(min_terms[i]..=most);
        budget = (budget / k).max(1);
        factors.push(random_factor(field, vars, block, k, &mut rng)?);
    }
    Ok(factors)
}

fn random_factor(
    field: &Arc<FieldCtx>,
    vars: &Arc<VarCtx>,
    block: &[usize],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Poly> {
    let n = vars.len();
    let order = field.order();
    for _ in 0..SAMPLE_BUDGET {
        let mut terms: Vec<(Monomial, crate::field::Scalar)> = Vec::with_capacity(k);
        let mut attempts = 0;
        while terms.len() < k && attempts < 64 * k {
            attempts += 1;
            let chosen: Vec<usize> = block.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if chosen.is_empty() {
                continue;
            }
            let m = Monomial::from_vars(n, chosen);
            if terms.iter().any(|(x, _)| *x == m) {
                continue;
            }
            let c = field.element(rng.gen_range(1..order));
            terms.push((m, c));
        }
        let f = Poly::from_terms(field.clone(), vars.clone(), terms)?;
        if !f.is_constant() && is_irreducible_sqfree(&f)? {
            return Ok(f);
        }
    }
    Err(Error::BudgetExceeded)
}

pub fn random_sqfree(field: &Arc<FieldCtx>, vars: &Arc<VarCtx>, max_terms: usize, t: usize, seed: u64) -> Result<Poly> {
    let mut acc = Poly::one(field.clone(), vars.clone());
    for f in random_sqfree_factors(field, vars, max_terms, t, seed)? {
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub primes: Vec<u64>,
    /// Largest number of variables.
    pub n: usize,
    pub max_terms: usize,
    pub max_factors: usize,
    pub count: usize,
    pub seed: u64,
    pub e_max: u32,
    pub e_list: Vec<u32>,
    /// Extra inputs run after the random samples.
    pub extra: Vec<Poly>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            primes: vec![2, 3, 5],
            n: 8,
            max_terms: 8,
            max_factors: 3,
            count: 200,
            seed: 0,
            e_max: 2,
            e_list: vec![1, 2],
            extra: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleDetails {
    pub factorization: Factorization,
    pub fedder: FedderOutcome,
    pub certificate: Option<RegCertificate>,
    pub certificate_check: CertificateCheck,
    pub dfpt: InvariantReport,
    pub crosscheck: Vec<(FptSample, Option<Ratio<i64>>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleStatus {
    Pass,
    Counterexample { failures: Vec<String>, minimized: Poly },
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct SampleResult {
    pub index: usize,
    pub poly: Poly,
    pub planted_factors: Option<usize>,
    pub status: SampleStatus,
    pub details: Option<SampleDetails>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub samples: Vec<SampleResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.samples.iter().filter(|s| s.status == SampleStatus::Pass).count()
    }

    pub fn skipped(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| matches!(s.status, SampleStatus::Skipped { .. }))
            .count()
    }

    pub fn counterexamples(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| matches!(s.status, SampleStatus::Counterexample { .. }))
            .count()
    }
}

/// Runs every check on `f`; an empty failure list means all passed.
pub fn check_sample(
    f: &Poly,
    planted: Option<usize>,
    e_max: u32,
    e_list: &[u32],
) -> (Option<SampleDetails>, Vec<String>) {
    let mut failures = Vec::new();
    let factorization = match disjoint_factorization_with(f, &FactorOptions::default()) {
        Ok(x) => x,
        Err(e) => return (None, vec![format!("factorization: {e}")]),
    };
    let ideal = &factorization.ideal;
    if let Some(t) = planted {
        if ideal.len() != t {
            failures.push(format!("recovered {} factors, planted {t}", ideal.len()));
        }
    }
    let fedder = match fedder_fsplit(ideal, 1) {
        Ok(out) => out,
        Err(e) => return (None, vec![format!("fedder: {e}")]),
    };
    match &fedder {
        FedderOutcome::Split(w) => {
            if !verify_split_witness(ideal, w).unwrap_or(false) {
                failures.push("split witness does not re-verify".into());
            }
        }
        FedderOutcome::NotSplit { .. } => failures.push("not F-split at e = 1".into()),
    }
    let (certificate, certificate_check) = match build_regularity_certificate(ideal, e_max) {
        Ok(cert) => {
            let check = verify_regularity_certificate(ideal, &cert);
            (Some(cert), check)
        }
        Err(e) => (
            None,
            CertificateCheck::Invalid {
                stage: None,
                reason: e.to_string(),
            },
        ),
    };
    if let CertificateCheck::Invalid { reason, .. } = &certificate_check {
        failures.push(format!("certificate: {reason}"));
    }
    let dfpt = match dfpt_at(ideal, &Point::origin(f.nvars())) {
        Ok(r) => r,
        Err(e) => return (None, vec![format!("dfpt: {e}")]),
    };
    if dfpt.dfpt != dfpt.mult as i64 - dfpt.t as i64
        || dfpt.fpt + Ratio::from_integer(dfpt.dfpt) != Ratio::from_integer(dfpt.dim as i64)
    {
        failures.push("dfpt report is inconsistent".into());
    }
    let closed_form = Ratio::from_integer(f.nvars() as i64 - dfpt.mult as i64);
    let mut crosscheck = Vec::with_capacity(e_list.len());
    for &e in e_list {
        match fpt_oracle(ideal, e) {
            Ok(sample) => {
                let d = sample.lambda.map(|l| closed_form - l);
                if d != Some(Ratio::from_integer(0)) {
                    failures.push(format!("fpt discrepancy at e = {e}: {d:?}"));
                }
                crosscheck.push((sample, d));
            }
            Err(err) => failures.push(format!("fpt oracle at e = {e}: {err}")),
        }
    }
    let details = SampleDetails {
        factorization,
        fedder,
        certificate,
        certificate_check,
        dfpt,
        crosscheck,
    };
    (Some(details), failures)
}

/// Greedy single-step shrinking: drop a term, or set a variable to one,
/// while the failure persists.
pub fn minimize(f: &Poly, e_max: u32, e_list: &[u32]) -> Poly {
    let fails = |g: &Poly| !g.is_zero() && !g.is_constant() && !check_sample(g, None, e_max, e_list).1.is_empty();
    let mut current = f.clone();
    loop {
        let mut changed = false;
        for i in 0..current.num_terms() {
            let terms: Vec<_> = current
                .terms()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, t)| t.clone())
                .collect();
            if let Ok(g) = Poly::from_terms(current.field().clone(), current.vars().clone(), terms) {
                if fails(&g) {
                    current = g;
                    changed = true;
                    break;
                }
            }
        }
        if changed {
            continue;
        }
        for v in current.used_vars() {
            let g = current.specialize(&[(v, current.field().one())]);
            if fails(&g) {
                current = g;
                changed = true;
                break;
            }
        }
        if !changed {
            return current;
        }
    }
}

fn run_one(index: usize, f: Poly, planted: Option<usize>, config: &SuiteConfig) -> SampleResult {
    if let Some(m) = squarefree_violation(&f) {
        let reason = format!("not square-free supported (offending monomial {})", m.format(f.vars()));
        return SampleResult {
            index,
            poly: f,
            planted_factors: planted,
            status: SampleStatus::Skipped { reason },
            details: None,
        };
    }
    if f.is_constant() {
        let reason = "constant input".to_string();
        return SampleResult {
            index,
            poly: f,
            planted_factors: planted,
            status: SampleStatus::Skipped { reason },
            details: None,
        };
    }
    let (details, failures) = check_sample(&f, planted, config.e_max, &config.e_list);
    let status = if failures.is_empty() {
        SampleStatus::Pass
    } else {
        SampleStatus::Counterexample {
            minimized: minimize(&f, config.e_max, &config.e_list),
            failures,
        }
    };
    SampleResult {
        index,
        poly: f,
        planted_factors: planted,
        status,
        details,
    }
}

/// Draws `(p, n, t, seed)` for sample `index` from its own ChaCha stream.
fn draw_sample(config: &SuiteConfig, index: usize) -> Result<(Poly, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let p = *config
        .primes
        .choose(&mut rng)
        .ok_or_else(|| Error::InvalidParameter("no primes".into()))?;
    let t = rng.gen_range(1..=config.max_factors.min(config.n).max(1));
    let n = rng.gen_range(t.max(2).min(config.n)..=config.n);
    let seed: u64 = rng.gen();
    let field = Arc::new(FieldCtx::prime(p)?);
    let vars = Arc::new(VarCtx::numbered("x", n)?);
    Ok((random_sqfree(&field, &vars, config.max_terms, t, seed)?, t))
}

pub fn theorem_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.n == 0 || config.max_factors == 0 || config.e_max == 0 {
        return Err(Error::InvalidParameter("n, factors and e_max must be positive".into()));
    }
    let drawn = (0..config.count)
        .into_par_iter()
        .map(|i| draw_sample(config, i))
        .collect::<Result<Vec<_>>>()?;
    let inputs: Vec<(Poly, Option<usize>)> = drawn
        .into_iter()
        .map(|(f, t)| (f, Some(t)))
        .chain(config.extra.iter().cloned().map(|f| (f, None)))
        .collect();
    let samples = inputs
        .into_par_iter()
        .enumerate()
        .map(|(i, (f, t))| run_one(i, f, t, config))
        .collect();
    Ok(SuiteReport { samples })
}
