//! Text formats for the output files.

use std::io::{self, Write};

use kaon_core::{EventRecord, Observable};

/// Significant digits of every number written to CSV or summary files.
pub const SIG_DIGITS: usize = 12;

/// Decimal notation with [`SIG_DIGITS`] significant digits; `inf`, `-inf` and
/// `nan` for non-finite values. Independent of locale.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    // exponent after rounding to the target precision
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn observable(o: Observable) -> String {
    match o {
        Observable::Value(v) => num(v),
        Observable::Infinite => "inf".into(),
        Observable::Undefined => "nan".into(),
    }
}

pub const EVENTS_HEADER: &str = "run_index,outcome,retained,b_result,d_result,t_m";

pub fn write_event<W: Write>(w: &mut W, e: &EventRecord) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{}",
        e.run_index,
        e.outcome.name(),
        e.retained,
        e.b_result.map_or("", |d| d.name()),
        e.d_result.map_or("", |d| d.name()),
        num(e.t_m)
    )
}

pub fn observables_header(teleport: bool) -> String {
    let exact = if teleport { "xi_exact" } else { "asym_exact" };
    format!("t_m,subensemble,{exact},paper_approx,mc_value,mc_stderr,n_used")
}
