//! CSV writers. Floats carry 12 significant digits in scientific notation;
//! lines end with `\n`.

use std::io::{self, Write};

use super::{Fig4Record, SweepRecord};

pub const SWEEP_HEADER: &str =
    "sweep_param,avg_oma,avg_hybrid,avg_optimal,stderr_oma,stderr_hybrid,stderr_optimal,trials,seed";

pub const FIG4_HEADER: &str =
    "realization,h1,h2,x_opt,y_opt,objective,x_oma,objective_oma,grid_step,flagged";

pub const TRACE_HEADER: &str = "realization,x,objective";

/// `v` with 12 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_sweep<W: Write>(mut out: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            format_float(r.sweep_param),
            format_float(r.avg_oma),
            format_float(r.avg_hybrid),
            format_float(r.avg_optimal),
            format_float(r.stderr_oma),
            format_float(r.stderr_hybrid),
            format_float(r.stderr_optimal),
            r.trials,
            r.seed
        )?;
    }
    Ok(())
}

pub fn write_fig4<W: Write>(mut out: W, records: &[Fig4Record]) -> io::Result<()> {
    writeln!(out, "{FIG4_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.realization,
            format_float(r.h1),
            format_float(r.h2),
            format_float(r.x_opt),
            format_float(r.y_opt),
            format_float(r.objective),
            format_float(r.x_oma),
            format_float(r.objective_oma),
            format_float(r.grid_step),
            r.flagged
        )?;
    }
    Ok(())
}

/// `(realization, x, objective)` rows of user 1's objective along the search grid.
pub fn write_trace<W: Write>(mut out: W, rows: &[(usize, f64, f64)]) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for (k, x, objective) in rows {
        writeln!(out, "{k},{},{}", format_float(*x), format_float(*objective))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(2.4960733818276797), "2.49607338183e0");
        assert_eq!(format_float(0.0), "0.00000000000e0");
        assert_eq!(format_float(-1.5e-7), "-1.50000000000e-7");
    }

    #[test]
    fn sweep_layout() {
        let rec = SweepRecord {
            sweep_param: 1.0,
            avg_oma: 3.0,
            avg_hybrid: 2.5,
            avg_optimal: 2.5,
            stderr_oma: 0.1,
            stderr_hybrid: 0.05,
            stderr_optimal: 0.05,
            trials: 10,
            seed: 7,
            max_rel_gap: 0.0,
            order_violations: 0,
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.split('\n');
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        assert_eq!(
            lines.next(),
            Some("1.00000000000e0,3.00000000000e0,2.50000000000e0,2.50000000000e0,1.00000000000e-1,5.00000000000e-2,5.00000000000e-2,10,7")
        );
        assert_eq!(lines.next(), Some(""));
        assert!(!text.contains('\r'));
    }
}
