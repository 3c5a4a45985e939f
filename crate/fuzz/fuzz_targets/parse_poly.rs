#![no_main]

use fsing_core::input::parse_input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(parsed) = parse_input(text) else { return };
    // printed polynomials must parse back to the same value
    let names: Vec<&str> = parsed.vars.names().iter().map(String::as_str).collect();
    for (name, f) in &parsed.polys {
        let mut again = format!("p {}\n", parsed.field.characteristic());
        if parsed.field.degree() > 1 {
            again.push_str(&format!("ext {}\n", parsed.field.degree()));
        }
        again.push_str(&format!("vars {}\npoly {name}: {f}\n", names.join(" ")));
        if let Ok(back) = parse_input(&again) {
            assert_eq!(&back.polys[0].1, f);
        }
    }
});
