#![no_main]

use std::sync::Arc;

use fsing_core::field::FieldCtx;
use fsing_core::input::{matroid_basis_polynomial, matroid_vars, parse_matroid, verify_matroid};
use fsing_core::structure::is_squarefree_supported;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_matroid(text) else { return };
    let _ = verify_matroid(&m);
    let Ok(vars) = matroid_vars(m.n) else { return };
    let field = Arc::new(FieldCtx::prime(m.p.unwrap_or(2)).unwrap());
    if let Ok(f) = matroid_basis_polynomial(&m, field, vars) {
        assert!(is_squarefree_supported(&f));
    }
});
