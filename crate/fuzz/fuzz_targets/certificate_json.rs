#![no_main]

use std::sync::Arc;

use fsing_core::field::FieldCtx;
use fsing_core::frobenius::verify_regularity_certificate;
use fsing_core::poly::{Poly, VarCtx};
use fsing_core::report::{certificate, certificate_from_json, split_witness_from_json};
use fsing_core::structure::disjoint_factorization;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else {
        return;
    };
    let vars = Arc::new(VarCtx::new(["x", "y", "z", "w"]).unwrap());
    let _ = split_witness_from_json(&value, &vars);
    let Ok(cert) = certificate_from_json(&value, &vars) else {
        return;
    };
    assert_eq!(
        certificate_from_json(&certificate(&cert, &vars), &vars).as_ref(),
        Ok(&cert)
    );
    let field = Arc::new(FieldCtx::prime(3).unwrap());
    let xy = Poly::var(field.clone(), vars.clone(), 0)
        .unwrap()
        .mul(&Poly::var(field.clone(), vars.clone(), 1).unwrap())
        .unwrap();
    let zw = Poly::var(field.clone(), vars.clone(), 2)
        .unwrap()
        .mul(&Poly::var(field, vars.clone(), 3).unwrap())
        .unwrap();
    let ideal = disjoint_factorization(&xy.add(&zw).unwrap()).unwrap();
    let _ = verify_regularity_certificate(&ideal, &cert);
});
