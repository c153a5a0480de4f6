//! CSV writers. Every file has a header row, `,` separators and LF endings.

use std::fmt::Write;

use crate::dynamics::{OrbitRecord, Termination};
use crate::lab::{BumpPoint, ConvergenceProbe, SampledFunction, SinSquarePoint};

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// `n,value` rows for `n = 0..`, plus `# overflow at n=<k>` when the orbit
/// was cut short.
pub fn orbit_csv(record: &OrbitRecord) -> String {
    let mut out = String::from("n,value\n");
    for (n, v) in record.values.iter().enumerate() {
        row(&mut out, &[n.to_string(), format_float(*v)]);
    }
    if let Termination::Overflow { at } = record.terminated_by {
        writeln!(out, "# overflow at n={at}").unwrap();
    }
    out
}

/// `n,value` rows for `n = first, first+1, …`, with the optional overflow
/// comment.
pub fn indexed_csv(first: usize, values: &[f64], overflow_at: Option<usize>) -> String {
    let mut out = String::from("n,value\n");
    for (k, v) in values.iter().enumerate() {
        row(&mut out, &[(first + k).to_string(), format_float(*v)]);
    }
    if let Some(at) = overflow_at {
        writeln!(out, "# overflow at n={at}").unwrap();
    }
    out
}

/// `x,d0,d1,…,dm`.
pub fn sampled_csv(s: &SampledFunction) -> String {
    let mut header = vec!["x".to_string()];
    header.extend((0..=s.order()).map(|i| format!("d{i}")));
    let mut out = String::new();
    row(&mut out, &header);
    for (x, j) in s.grid.iter().zip(&s.jets) {
        let mut cells = vec![format_float(*x)];
        cells.extend(j.coeffs.iter().map(|c| format_float(*c)));
        row(&mut out, &cells);
    }
    out
}

/// `n,sup_deviation`.
pub fn probe_csv(p: &ConvergenceProbe) -> String {
    let mut out = String::from("n,sup_deviation\n");
    for (k, d) in p.sup_deviations.iter().enumerate() {
        row(&mut out, &[(k + 1).to_string(), format_float(*d)]);
    }
    out
}

/// `x,i,magnitude,weighted_magnitude` for the samples behind a seminorm or
/// growth fit.
pub fn growth_csv(samples: &[(f64, usize, f64, f64)]) -> String {
    let mut out = String::from("x,i,magnitude,weighted_magnitude\n");
    for &(x, i, m, w) in samples {
        row(&mut out, &[format_float(x), i.to_string(), format_float(m), format_float(w)]);
    }
    out
}

/// `n,value,witness_x,ratio,claimed`.
pub fn bump_csv(points: &[BumpPoint]) -> String {
    let mut out = String::from("n,value,witness_x,ratio,claimed\n");
    for b in points {
        row(
            &mut out,
            &[
                b.n.to_string(),
                format_float(b.estimate.value),
                format_float(b.estimate.witness_x),
                format_float(b.ratio),
                b.claimed.to_string(),
            ],
        );
    }
    out
}

/// `k,x,x_squared,value,ratio`.
pub fn sin_square_csv(points: &[SinSquarePoint]) -> String {
    let mut out = String::from("k,x,x_squared,value,ratio\n");
    for p in points {
        row(&mut out, &[p.k.to_string(), format_float(p.x), format_float(p.x_squared), format_float(p.value), format_float(p.ratio)]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::iterate_point;
    use crate::symbol::SymbolExpr;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(677.0), "677");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1e-7), "1e-7");
        assert_eq!(format_float(2f64.powi(60)), "1.152921504606847e18");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        for v in [1.0 / 3.0, -2.5e-300, 123456.789] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn orbit_rows_and_overflow_comment() {
        let phi = SymbolExpr::parse("x^2+1").unwrap();
        let csv = orbit_csv(&iterate_point(&phi, 0.0, 5).unwrap());
        assert_eq!(csv, "n,value\n0,0\n1,1\n2,2\n3,5\n4,26\n5,677\n");
        let dbl = SymbolExpr::parse("2*x").unwrap();
        let csv = orbit_csv(&iterate_point(&dbl, 1.0, 600).unwrap());
        assert!(csv.ends_with("# overflow at n=499\n"));
    }

    #[test]
    fn sampled_and_probe_layouts() {
        let phi = SymbolExpr::parse("0.5*x+1").unwrap();
        let f = SymbolExpr::parse("x^2").unwrap();
        let s = crate::lab::apply_iterated(&f, &phi, 1, (0.0, 2.0), 2, 3).unwrap();
        assert_eq!(sampled_csv(&s), "x,d0,d1,d2\n0,1,1,0.5\n1,2.25,1.5,0.5\n2,4,2,0.5\n");
        let p = crate::lab::convergence_probe(&SymbolExpr::parse("x").unwrap(), &phi, (2.0, 2.0 + 1e-9), 0, 6);
        assert!(p.is_ok());
        let csv = probe_csv(&p.unwrap());
        assert!(csv.starts_with("n,sup_deviation\n1,"));
        assert_eq!(csv.lines().count(), 7);
    }
}
