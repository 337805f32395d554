//! CSV output: header row, fixed column order, 12 significant digits, LF.

use std::fmt::Write as _;

use crate::observables::OrientationTrace;
use crate::scan::{GridRow, LineRow};

/// Like C's `%.12g`. NaN prints as `nan`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt_err(e: &Option<String>) -> String {
    e.as_deref()
        .map(|s| s.replace([',', '"', '\n'], " "))
        .unwrap_or_default()
}

pub const GRID_HEADER: &str = "a_l,a_hcp,max_abs,signed_value,s_at_max,duration,j_max,error";
pub const LINE_HEADER: &str =
    "a_hcp,a_l,max_abs,signed_value,s_at_max,max_abs_hcp_only,duration,best_n,best_sign,p_n,j_max,error";
pub const TRACE_HEADER: &str = "s,cos_expectation";

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_sig(r.a_l),
            fmt_sig(r.a_hcp),
            fmt_sig(r.max_abs),
            fmt_sig(r.signed_value),
            fmt_sig(r.s_at_max),
            fmt_sig(r.duration),
            r.j_max,
            opt_err(&r.error)
        );
    }
    out
}

pub fn line_csv(rows: &[LineRow]) -> String {
    let mut out = String::from(LINE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(r.a_hcp),
            fmt_sig(r.a_l),
            fmt_sig(r.max_abs),
            fmt_sig(r.signed_value),
            fmt_sig(r.s_at_max),
            fmt_sig(r.max_abs_hcp_only),
            fmt_sig(r.duration),
            r.best_n.map(|n| n.to_string()).unwrap_or_default(),
            r.best_sign.map(|d| d.label()).unwrap_or_default(),
            fmt_sig(r.p_n),
            r.j_max,
            opt_err(&r.error)
        );
    }
    out
}

pub fn trace_csv(trace: &OrientationTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (s, v) in trace.samples() {
        let _ = writeln!(out, "{},{}", fmt_sig(s), fmt_sig(v));
    }
    out
}
