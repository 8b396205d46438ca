//! Text renderings shared by the command-line tool: `%g`-style numbers,
//! trace CSV and plan files.
//!
//! Plan file:
//!
//! ```text
//! INVLOC-PLAN 1 <n> <cost>
//! <w_hat> <p_plus> <q_minus>    (n lines)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{plan_cost, Instance, ModificationPlan};
use crate::rowgen::RunTrace;

/// Significant digits of human-readable output.
pub const HUMAN_DIGITS: usize = 7;
/// Significant digits of machine-readable files.
pub const MACHINE_DIGITS: usize = 15;

/// Formats `x` like C's `%.{digits}g`: at most `digits` significant digits,
/// trailing zeros removed, scientific notation for very large or small
/// magnitudes.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn human(x: f64) -> String {
    fmt_sig(x, HUMAN_DIGITS)
}

pub fn machine(x: f64) -> String {
    fmt_sig(x, MACHINE_DIGITS)
}

/// One row per iteration record under the header `k,x,y,cost,delta_w`.
pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out = String::from("k,x,y,cost,delta_w\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            machine(r.x_k.x),
            machine(r.x_k.y),
            machine(r.cost),
            machine(r.delta_w)
        );
    }
    out
}

pub fn write_plan(plan: &ModificationPlan) -> String {
    let mut out = format!("INVLOC-PLAN 1 {} {}\n", plan.w_hat.len(), machine(plan.cost));
    for i in 0..plan.w_hat.len() {
        let _ = writeln!(
            out,
            "{} {} {}",
            machine(plan.w_hat[i]),
            machine(plan.p_plus[i]),
            machine(plan.q_minus[i])
        );
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("plan has {got} sites, instance has {expected}")]
    Length { expected: usize, got: usize },
    #[error("site {site}: w_hat must be finite and nonnegative, got {value}")]
    Weight { site: usize, value: f64 },
}

/// Parses a plan file and checks it against `inst`. The stored cost is
/// informational; the returned plan carries the cost recomputed from the
/// amounts.
pub fn parse_plan(text: &str, inst: &Instance) -> Result<ModificationPlan, PlanError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let syntax = |line: usize, message: String| PlanError::Syntax { line, message };
    let (hl, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "expected header `INVLOC-PLAN 1 <n> <cost>`".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "INVLOC-PLAN" || h[1] != "1" {
        return Err(syntax(hl, format!("expected header `INVLOC-PLAN 1 <n> <cost>`, found `{header}`")));
    }
    let n: usize = h[2]
        .parse()
        .map_err(|_| syntax(hl, format!("expected a site count, found `{}`", h[2])))?;
    h[3].parse::<f64>()
        .map_err(|_| syntax(hl, format!("expected a cost, found `{}`", h[3])))?;

    let (mut w, mut p, mut q) = (Vec::new(), Vec::new(), Vec::new());
    for (ln, line) in lines {
        let v = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| syntax(ln, format!("expected a number, found `{t}`"))))
            .collect::<Result<Vec<f64>, _>>()?;
        if v.len() != 3 {
            return Err(syntax(ln, format!("expected 3 fields, found {}", v.len())));
        }
        w.push(v[0]);
        p.push(v[1]);
        q.push(v[2]);
    }
    if w.len() != n {
        return Err(syntax(hl, format!("header declares {n} sites but found {} lines", w.len())));
    }
    if n != inst.len() {
        return Err(PlanError::Length {
            expected: inst.len(),
            got: n,
        });
    }
    if let Some((i, &value)) = w.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(PlanError::Weight { site: i + 1, value });
    }
    let cost = plan_cost(inst, &p, &q);
    Ok(ModificationPlan {
        w_hat: w,
        p_plus: p,
        q_minus: q,
        cost,
    })
}
