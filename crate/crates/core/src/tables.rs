//! Parameter tables for the 2-designs implied by STS(13;2) and STS(7;q).

use crate::error::Result;
use crate::qcount::{corollary_sts_params, CorollaryParams};

/// One row per parameter set: `2-(n,k,λ;q)`.
fn rows(c: &CorollaryParams) -> Vec<String> {
    c.sets.iter().map(|p| p.to_string()).collect()
}

/// Parameters of the designs arising from an STS(13;2).
pub fn table1() -> Result<Vec<String>> {
    Ok(rows(&corollary_sts_params(13, 2)?))
}

/// Parameters of the designs arising from a putative STS(7;q), q = 2..5.
pub fn table2() -> Result<Vec<(u64, Vec<String>)>> {
    (2..=5).map(|q| Ok((q, rows(&corollary_sts_params(7, q)?)))).collect()
}

/// Both tables as plain text.
pub fn render() -> Result<String> {
    let mut out = String::from("2-designs implied by an STS(13;2)\n");
    for r in table1()? {
        out.push_str(&format!("  {r}\n"));
    }
    out.push_str("2-designs implied by a putative STS(7;q)\n");
    for (q, rs) in table2()? {
        out.push_str(&format!("  q={q}: {}\n", rs.join("  ")));
    }
    Ok(out)
}

/// Both tables as `key=value` lines.
pub fn render_machine() -> Result<String> {
    let mut out = String::new();
    for (i, r) in table1()?.iter().enumerate() {
        out.push_str(&format!("table1.{}={r}\n", i + 1));
    }
    for (q, rs) in table2()? {
        for (i, r) in rs.iter().enumerate() {
            out.push_str(&format!("table2.q{q}.{}={r}\n", i + 1));
        }
    }
    Ok(out)
}
