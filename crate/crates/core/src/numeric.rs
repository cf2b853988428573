//! Small numeric helpers shared across the crate.

use crate::error::{Error, Result};

/// Compensated (Kahan) summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Index of the maximum; ties go to the lowest index. Returns 0 on empty input.
pub fn argmax<T: PartialOrd, I: IntoIterator<Item = T>>(values: I) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((i, v));
        }
    }
    best.map_or(0, |(i, _)| i)
}

/// Parse a whitespace-separated line of decimals, requiring `expected` values.
pub(crate) fn parse_row(line: &str, lineno: usize, expected: usize) -> Result<Vec<f64>> {
    let row = line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::parse(lineno, format!("{t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if row.len() != expected {
        return Err(Error::parse(
            lineno,
            format!("expected {expected} values, found {}", row.len()),
        ));
    }
    Ok(row)
}

pub(crate) fn parse_dims(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let dims = line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::parse(lineno, format!("{t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    match dims.as_slice() {
        [r, c] if *r > 0 && *c > 0 => Ok((*r, *c)),
        _ => Err(Error::parse(lineno, "expected two positive dimensions")),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn format_row(row: &[f64]) -> String {
    row.iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_many_small_terms() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 1_000_000));
        let k = kahan_sum(xs);
        assert!((k - (1.0 + 1e-10)).abs() < 1e-15);
    }

    #[test]
    fn argmax_ties_lowest() {
        assert_eq!(argmax([0.5, 0.5]), 0);
        assert_eq!(argmax([0.1, 0.9, 0.9]), 1);
    }
}
