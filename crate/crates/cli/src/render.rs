//! Plain-text rendering of decomposition reports with the user's variable
//! names.

use std::fmt::Write;

use apolar::decompose::{DecompositionFailure, DecompositionReport, Value};
use num_traits::{Signed, Zero};

fn value_is_zero(v: &Value) -> bool {
    match v {
        Value::Exact(q) => q.is_zero(),
        Value::Real(x) => *x == 0.0,
        Value::Complex(c) => c.re == 0.0 && c.im == 0.0,
    }
}

/// Split a coefficient into a sign and an unsigned rendering. Complex values
/// have no usable sign; they come back positive and parenthesized.
fn signed_parts(v: &Value) -> (bool, String) {
    match v {
        Value::Exact(q) => (q.is_negative(), q.abs().to_string()),
        Value::Real(x) => (*x < 0.0, format!("{:?}", x.abs())),
        Value::Complex(_) => (false, format!("({v})")),
    }
}

fn monomial_text(exps: &[u32], vars: &[String]) -> String {
    let mut out = String::new();
    for (name, &e) in vars.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('*');
        }
        out.push_str(name);
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
    out
}

/// Render a term list as a signed sum, e.g. `x - 2*y + 1/3*z`.
fn sum_text<'a>(terms: impl Iterator<Item = (&'a [u32], &'a Value)>, vars: &[String]) -> String {
    let mut out = String::new();
    for (exps, v) in terms {
        if value_is_zero(v) {
            continue;
        }
        let mono = monomial_text(exps, vars);
        let (neg, mag) = signed_parts(v);
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(&mono);
        } else {
            let _ = write!(out, "{mag}*{mono}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn linear_form_text(coeffs: &[Value], vars: &[String]) -> String {
    let units: Vec<Vec<u32>> = (0..vars.len())
        .map(|j| {
            let mut e = vec![0u32; vars.len()];
            e[j] = 1;
            e
        })
        .collect();
    sum_text(
        units.iter().map(|e| e.as_slice()).zip(coeffs.iter()),
        vars,
    )
}

fn point_text(point: &[Value]) -> String {
    let inner: Vec<String> = point.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(", "))
}

fn term_line(term: &apolar::decompose::Term, vars: &[String]) -> String {
    let mut line = String::new();
    let (neg, mag) = signed_parts(&term.weight);
    if neg {
        line.push('-');
    }
    if mag != "1" {
        let _ = write!(line, "{mag} * ");
    }
    let _ = write!(line, "({})", linear_form_text(&term.form, vars));
    if term.exponent != 1 {
        let _ = write!(line, "^{}", term.exponent);
    }
    if let Some(cof) = &term.cofactor {
        let _ = write!(
            line,
            " * ({})",
            sum_text(cof.iter().map(|(e, v)| (e.as_slice(), v)), vars)
        );
    }
    line
}

/// Multi-line text form of a successful decomposition.
pub fn report_text(report: &DecompositionReport, vars: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", report.mode);
    let _ = writeln!(
        out,
        "degree {} in {} variables ({})",
        report.degree,
        report.nvars,
        vars.join(", ")
    );
    let _ = writeln!(out, "essential variables: {}", report.essential);
    let _ = writeln!(out, "rank: {}", report.rank);
    let _ = writeln!(
        out,
        "arithmetic: {}",
        if report.exact { "exact" } else { "floating point" }
    );
    let _ = writeln!(out, "residual: {:e}", report.residual);
    let _ = writeln!(out, "decomposition:");
    for term in &report.terms {
        let _ = writeln!(out, "  {}", term_line(term, vars));
    }
    if !report.points.is_empty() {
        let _ = writeln!(out, "support points:");
        for (i, point) in report.points.iter().enumerate() {
            let mut line = format!("  {}", point_text(point));
            if let Some(m) = report.multiplicities.get(i) {
                let _ = write!(line, "  multiplicity {m}");
            }
            if let Some(k) = report.scheme_exponents.get(i) {
                let _ = write!(line, ", k = {k}");
            }
            let _ = writeln!(out, "{line}");
        }
    }
    let _ = writeln!(out, "seed: {}", report.seed);
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "warnings:");
        for w in &report.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

/// Multi-line text form of a failed search.
pub fn failure_text(failure: &DecompositionFailure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "no {} decomposition found", failure.mode);
    let _ = writeln!(out, "reason: {}", failure.reason);
    let _ = writeln!(
        out,
        "ranks tried: {}",
        failure
            .ranks_tried
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "attempts per basis: {}", failure.attempts);
    if let Some(res) = failure.best_residual {
        let _ = writeln!(out, "best residual seen: {res:e}");
    }
    if !failure.warnings.is_empty() {
        let _ = writeln!(out, "warnings:");
        for w in &failure.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}
