//! Named functions with exact moduli, shared by the acceptance suite and the CLI.

use std::f64::consts::PI;

use crate::expr::{parse, to_function_spec};
use crate::operators::{ComplexFunctionSpec, Domain, FunctionSpec};

/// Derivatives supplied for every builtin (fewer where differentiation stops).
pub const BUILTIN_ORDER: usize = 4;

struct Builtin {
    name: &'static str,
    expr: &'static str,
    domain: Domain,
    window: Option<(f64, f64)>,
}

const UNIT: Domain = Domain::Interval { a: 0.0, b: 1.0 };

const BUILTINS: &[Builtin] = &[
    Builtin { name: "linear", expr: "x", domain: UNIT, window: None },
    Builtin { name: "square", expr: "x^2", domain: UNIT, window: None },
    Builtin { name: "cube", expr: "x^3", domain: UNIT, window: None },
    Builtin { name: "sin", expr: "sin(x)", domain: Domain::WholeLine, window: Some((-PI, PI)) },
    Builtin { name: "cos", expr: "cos(x)", domain: Domain::WholeLine, window: Some((-PI, PI)) },
    Builtin { name: "abs", expr: "abs(x)", domain: Domain::Interval { a: -1.0, b: 1.0 }, window: None },
    Builtin { name: "exp", expr: "exp(x)", domain: UNIT, window: None },
    Builtin { name: "zero", expr: "0", domain: Domain::WholeLine, window: Some((-PI, PI)) },
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.name).collect()
}

/// Expression text of a builtin.
pub fn builtin_expr(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|b| b.name == name).map(|b| b.expr)
}

pub fn builtin(name: &str) -> Option<FunctionSpec> {
    let b = BUILTINS.iter().find(|b| b.name == name)?;
    let e = parse(b.expr).expect("builtin expressions parse");
    let f = to_function_spec(b.name, &e, b.domain, BUILTIN_ORDER);
    Some(match b.window {
        Some((lo, hi)) => f.with_window(lo, hi),
        None => f,
    })
}

fn named(names: &[&str]) -> Vec<FunctionSpec> {
    names.iter().map(|n| builtin(n).expect("known builtin")).collect()
}

/// Functions with closed-form moduli for the first-order estimates.
pub fn jackson_corpus() -> Vec<FunctionSpec> {
    named(&["linear", "sin", "cos", "abs", "exp"])
}

/// Smooth functions for the fractional estimates.
pub fn fractional_corpus() -> Vec<FunctionSpec> {
    named(&["square", "cube", "sin"])
}

pub fn complex_pair(re: &str, im: &str) -> Option<ComplexFunctionSpec> {
    ComplexFunctionSpec::new(builtin(re)?, builtin(im)?).ok()
}

pub fn complex_corpus() -> Vec<ComplexFunctionSpec> {
    vec![complex_pair("cos", "sin").expect("same domain"), complex_pair("linear", "square").expect("same domain")]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_builds() {
        for name in builtin_names() {
            let f = builtin(name).unwrap();
            assert!(f.reference_interval().is_some(), "{name}");
        }
        assert!(builtin("nope").is_none());
        assert_eq!(builtin("abs").unwrap().derivative_order(), 0);
        assert_eq!(builtin("sin").unwrap().derivative_order(), BUILTIN_ORDER);
    }

    #[test]
    fn jackson_corpus_has_exact_moduli() {
        for f in jackson_corpus() {
            let (a, b) = f.reference_interval().unwrap();
            assert!(f.exact_modulus(0.1, a, b).is_some(), "{}", f.id());
        }
    }
}
