//! JSON reports. Objects use sorted keys and terms follow the canonical
//! order, so a report is a deterministic function of its inputs.

use num_rational::Ratio;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::frobenius::{BaseRecord, CertificateCheck, FedderOutcome, FptSample, RegCertificate, SplitWitness, Stage};
use crate::invariants::InvariantReport;
use crate::modification::{ModificationReport, PointCheck};
use crate::poly::{Monomial, Point, Poly, VarCtx};
use crate::structure::Factorization;
use crate::suite::{SampleResult, SampleStatus, SuiteConfig, SuiteReport};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Counterexample,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Counterexample => "counterexample",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Counterexample => 1,
            Status::Error => 2,
        }
    }
}

/// Top-level report: `version, field{p,s}, vars, input, results, status`.
pub fn envelope(field: &FieldCtx, vars: &VarCtx, input: Value, results: Value, status: Status) -> Value {
    json!({
        "version": REPORT_VERSION,
        "field": { "p": field.characteristic(), "s": field.degree() },
        "vars": vars.names(),
        "input": input,
        "results": results,
        "status": status.as_str(),
    })
}

pub fn rational(r: &Ratio<i64>) -> Value {
    json!({ "num": r.numer(), "den": r.denom() })
}

pub fn monomial(m: &Monomial, vars: &VarCtx) -> Value {
    Value::String(m.format(vars))
}

pub fn poly(f: &Poly) -> Value {
    Value::String(f.to_string())
}

pub fn point(a: &Point, field: &FieldCtx) -> Value {
    Value::Array(
        a.coords()
            .iter()
            .map(|c| Value::String(field.format_scalar(c)))
            .collect(),
    )
}

pub fn split_witness(w: &SplitWitness, vars: &VarCtx) -> Value {
    json!({ "e": w.e, "q": w.q, "witness": monomial(&w.witness, vars) })
}

pub fn fedder(out: &FedderOutcome, vars: &VarCtx) -> Value {
    match out {
        FedderOutcome::Split(w) => json!({ "split": true, "witness": split_witness(w, vars) }),
        FedderOutcome::NotSplit { e, q } => json!({ "split": false, "e": e, "q": q }),
    }
}

pub fn certificate(cert: &RegCertificate, vars: &VarCtx) -> Value {
    let stages: Vec<Value> = cert
        .stages
        .iter()
        .map(|s| {
            json!({
                "inverted_var": vars.name(s.inverted_var),
                "e": s.e,
                "multiplier": monomial(&s.multiplier, vars),
                "witness": monomial(&s.witness, vars),
            })
        })
        .collect();
    let base: Vec<Value> = cert
        .base
        .iter()
        .map(|b| json!({ "factor": b.factor, "unit_monomial": monomial(&b.unit_monomial, vars) }))
        .collect();
    json!({ "stages": stages, "base": base })
}

pub fn certificate_check(check: &CertificateCheck) -> Value {
    match check {
        CertificateCheck::Valid => json!({ "valid": true }),
        CertificateCheck::Invalid { stage, reason } => json!({ "valid": false, "stage": stage, "reason": reason }),
    }
}

pub fn fpt_sample(s: &FptSample) -> Value {
    json!({ "e": s.e, "q": s.q, "b": s.b, "lambda": s.lambda.as_ref().map(rational) })
}

pub fn crosscheck(rows: &[(FptSample, Option<Ratio<i64>>)]) -> Value {
    Value::Array(
        rows.iter()
            .map(|(s, d)| json!({ "sample": fpt_sample(s), "discrepancy": d.as_ref().map(rational) }))
            .collect(),
    )
}

/// `field` is the field the point lives in, which may extend the coefficient field.
pub fn invariants(r: &InvariantReport, field: &FieldCtx) -> Value {
    json!({
        "point": point(&r.point, field),
        "point_field_degree": r.point_field_degree,
        "orders": r.orders,
        "ord": r.ord,
        "mult": r.mult,
        "dim": r.dim,
        "dfpt": r.dfpt,
        "fpt": rational(&r.fpt),
        "t": r.t,
        "exact": r.exact,
        "budget_exceeded": r.budget_exceeded,
    })
}

pub fn factorization(f: &Factorization) -> Value {
    let ideal = &f.ideal;
    let vars = ideal.vars();
    json!({
        "factors": ideal.factors().iter().map(poly).collect::<Vec<_>>(),
        "varsets": ideal
            .varsets()
            .iter()
            .map(|s| s.iter().map(|&i| vars.name(i).to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "scalar": ideal.field().format_scalar(&ideal.scalar()),
        "fallback_used": f.fallback_used,
        "notes": f.notes,
    })
}

fn point_check(c: &PointCheck, base: &FieldCtx) -> Value {
    let field = FieldCtx::new(base.characteristic() as u64, c.field_degree).expect("degree validated during search");
    json!({
        "point": point(&c.point, &field),
        "field_degree": c.field_degree,
        "mult": c.mult,
        "dfpt": c.dfpt,
        "oracle_dfpt": c.oracle_dfpt
            .iter()
            .map(|(e, d)| json!({ "e": e, "dfpt": d.as_ref().map(rational) }))
            .collect::<Vec<_>>(),
        "consistent": c.consistent,
    })
}

pub fn modification(r: &ModificationReport) -> Value {
    let tvars = r.build.transformed.vars();
    json!({
        "f": poly(&r.build.f),
        "ftilde": poly(&r.build.ftilde),
        "ftilde_vars": r.build.ftilde.vars().names(),
        "transformed": poly(&r.build.transformed),
        "transformed_vars": tvars.names(),
        "squarefree_supported": r.squarefree,
        "irreducible": r.irreducible,
        "fedder": r.fedder.as_ref().map(|f| fedder(f, tvars)),
        "certificate": r.certificate.as_ref().map(|c| certificate(c, tvars)),
        "certificate_check": r.certificate_check.as_ref().map(certificate_check),
        "points": r.points.iter().map(|c| point_check(c, r.build.f.field())).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

fn sample(s: &SampleResult) -> Value {
    let f = &s.poly;
    let vars = f.vars();
    let mut out = Map::new();
    out.insert("index".into(), json!(s.index));
    out.insert("p".into(), json!(f.field().characteristic()));
    out.insert("vars".into(), json!(vars.names()));
    out.insert("poly".into(), poly(f));
    out.insert("planted_factors".into(), json!(s.planted_factors));
    match &s.status {
        SampleStatus::Pass => {
            out.insert("status".into(), json!("pass"));
        }
        SampleStatus::Counterexample { failures, minimized } => {
            out.insert("status".into(), json!("counterexample"));
            out.insert("failures".into(), json!(failures));
            out.insert("minimized".into(), poly(minimized));
        }
        SampleStatus::Skipped { reason } => {
            out.insert("status".into(), json!("skipped"));
            out.insert("reason".into(), json!(reason));
        }
    }
    if let Some(d) = &s.details {
        out.insert("factorization".into(), factorization(&d.factorization));
        out.insert("fedder".into(), fedder(&d.fedder, vars));
        out.insert(
            "certificate".into(),
            d.certificate.as_ref().map_or(Value::Null, |c| certificate(c, vars)),
        );
        out.insert("certificate_check".into(), certificate_check(&d.certificate_check));
        out.insert("dfpt".into(), invariants(&d.dfpt, f.field()));
        out.insert("fpt_crosscheck".into(), crosscheck(&d.crosscheck));
    }
    Value::Object(out)
}

pub fn suite_status(r: &SuiteReport) -> Status {
    if r.counterexamples() > 0 {
        Status::Counterexample
    } else {
        Status::Pass
    }
}

/// Suite report. Samples may use different primes, so the top-level field
/// records the first configured prime and each sample carries its own `p`.
pub fn suite(r: &SuiteReport, config: &SuiteConfig) -> Value {
    json!({
        "version": REPORT_VERSION,
        "field": { "p": config.primes.first(), "s": 1 },
        "vars": Vec::<String>::new(),
        "input": {
            "primes": config.primes,
            "n": config.n,
            "terms": config.max_terms,
            "factors": config.max_factors,
            "count": config.count,
            "seed": config.seed,
            "e_max": config.e_max,
            "e_list": config.e_list,
        },
        "results": {
            "samples": r.samples.iter().map(sample).collect::<Vec<_>>(),
            "passed": r.passed(),
            "skipped": r.skipped(),
            "counterexamples": r.counterexamples(),
        },
        "status": suite_status(r).as_str(),
    })
}

fn decode(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}

/// Reads a monomial written as `x^2*y` or `1`.
pub fn parse_monomial(text: &str, vars: &VarCtx) -> Result<Monomial> {
    let mut exps = vec![0u16; vars.len()];
    let text = text.trim();
    if text == "1" {
        return Ok(Monomial::from_exps(exps));
    }
    for part in text.split('*') {
        let (name, e) = match part.split_once('^') {
            Some((name, e)) => (
                name.trim(),
                e.trim()
                    .parse::<u16>()
                    .map_err(|_| decode(format!("bad exponent in `{part}`")))?,
            ),
            None => (part.trim(), 1),
        };
        let i = vars
            .index_of(name)
            .ok_or_else(|| decode(format!("unknown variable `{name}`")))?;
        exps[i] = exps[i].checked_add(e).ok_or(Error::ExponentOverflow)?;
    }
    Ok(Monomial::from_exps(exps))
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| decode(format!("missing `{key}`")))
}

fn str_of<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field_of(v, key)?
        .as_str()
        .ok_or_else(|| decode(format!("`{key}` is not a string")))
}

fn uint_of(v: &Value, key: &str) -> Result<u64> {
    field_of(v, key)?
        .as_u64()
        .ok_or_else(|| decode(format!("`{key}` is not a non-negative integer")))
}

/// Inverse of [`certificate`].
pub fn certificate_from_json(v: &Value, vars: &VarCtx) -> Result<RegCertificate> {
    let stages = field_of(v, "stages")?
        .as_array()
        .ok_or_else(|| decode("`stages` is not an array"))?
        .iter()
        .map(|s| {
            let name = str_of(s, "inverted_var")?;
            let inverted_var = vars
                .index_of(name)
                .ok_or_else(|| decode(format!("unknown variable `{name}`")))?;
            let e = u32::try_from(uint_of(s, "e")?).map_err(|_| decode("`e` out of range"))?;
            Ok(Stage {
                inverted_var,
                e,
                multiplier: parse_monomial(str_of(s, "multiplier")?, vars)?,
                witness: parse_monomial(str_of(s, "witness")?, vars)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let base = field_of(v, "base")?
        .as_array()
        .ok_or_else(|| decode("`base` is not an array"))?
        .iter()
        .map(|b| {
            let factor = usize::try_from(uint_of(b, "factor")?).map_err(|_| decode("`factor` out of range"))?;
            Ok(BaseRecord {
                factor,
                unit_monomial: parse_monomial(str_of(b, "unit_monomial")?, vars)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegCertificate { stages, base })
}

/// Inverse of [`split_witness`].
pub fn split_witness_from_json(v: &Value, vars: &VarCtx) -> Result<SplitWitness> {
    let e = u32::try_from(uint_of(v, "e")?).map_err(|_| decode("`e` out of range"))?;
    let q = u32::try_from(uint_of(v, "q")?).map_err(|_| decode("`q` out of range"))?;
    Ok(SplitWitness {
        e,
        q,
        witness: parse_monomial(str_of(v, "witness")?, vars)?,
    })
}

/// Plain-text rendering: one `path: value` line per leaf.
pub fn to_text(v: &Value) -> String {
    fn walk(v: &Value, path: &str, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    };
                    walk(x, &p, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = a.iter().map(scalar_text).collect();
                out.push_str(&format!("{path}: [{}]\n", items.join(", ")));
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, &format!("{path}[{i}]"), out);
                }
            }
            _ => out.push_str(&format!("{path}: {}\n", scalar_text(v))),
        }
    }
    fn scalar_text(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk(v, "", &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{build_regularity_certificate, verify_regularity_certificate};
    use crate::poly::test_support::{poly as p, ring};
    use crate::structure::disjoint_factorization;

    #[test]
    fn certificate_round_trip() {
        let (f, v) = ring(2, "x y z w a b c d");
        let q = disjoint_factorization(&p(&f, &v, "x*y + z*w").mul(&p(&f, &v, "a*b + c*d")).unwrap()).unwrap();
        let cert = build_regularity_certificate(&q, 3).unwrap();
        let value = certificate(&cert, &v);
        let text = serde_json::to_string(&value).unwrap();
        let back = certificate_from_json(&serde_json::from_str(&text).unwrap(), &v).unwrap();
        assert_eq!(back, cert);
        assert!(verify_regularity_certificate(&q, &back).is_valid());
    }

    #[test]
    fn serialization_shapes() {
        let (f, v) = ring(2, "x y");
        assert_eq!(rational(&Ratio::new(6, 4)), json!({ "num": 3, "den": 2 }));
        assert_eq!(monomial(&Monomial::from_exps(vec![2, 1]), &v), json!("x^2*y"));
        assert_eq!(parse_monomial("x^2*y", &v).unwrap(), Monomial::from_exps(vec![2, 1]));
        assert_eq!(parse_monomial("1", &v).unwrap(), Monomial::one(2));
        assert!(parse_monomial("q", &v).is_err());
        let env = envelope(&f, &v, json!({}), json!({}), Status::Pass);
        let keys: Vec<&String> = env.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["field", "input", "results", "status", "vars", "version"]);
    }

    #[test]
    fn decode_rejects_malformed() {
        let (_, v) = ring(2, "x y");
        assert!(certificate_from_json(&json!({ "stages": 3, "base": [] }), &v).is_err());
        assert!(certificate_from_json(&json!({ "stages": [{ "inverted_var": "x" }], "base": [] }), &v).is_err());
    }

    #[test]
    fn text_rendering() {
        let v = json!({ "a": { "b": [1, 2] }, "c": "x" });
        assert_eq!(to_text(&v), "a.b: [1, 2]\nc: x\n");
    }
}
