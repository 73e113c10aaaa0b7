//! Plain CSV writers: LF line endings, `.` decimal separator, shortest
//! round-trip float formatting.

use super::{ConvergenceRow, ErrorReport};
use crate::scheme::{SchemeKind, Trajectory};
use std::io::{self, Write};

/// One line of the frame-comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRow {
    pub scheme: SchemeKind,
    pub n: usize,
    pub eps3: f64,
    pub discrepancy: f64,
}

/// `t,x,u` for every kept snapshot, positions wrapped into the domain.
pub fn write_trajectory_csv<W: Write>(mut out: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,x,u")?;
    for field in &traj.snapshots {
        let t = field.t();
        for (x, u) in field.grid().wrapped_positions().into_iter().zip(field.u()) {
            writeln!(out, "{t},{x},{u}")?;
        }
    }
    Ok(())
}

pub fn write_error_csv<W: Write>(mut out: W, reports: &[ErrorReport]) -> io::Result<()> {
    writeln!(out, "scheme,N,h,linf,rms")?;
    for r in reports {
        writeln!(out, "{},{},{},{},{}", r.scheme, r.n, r.h, r.linf, r.rms)?;
    }
    Ok(())
}

/// The order column is empty on the first row of each scheme.
pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[(SchemeKind, Vec<ConvergenceRow>)]) -> io::Result<()> {
    writeln!(out, "scheme,N,h,linf,order")?;
    for (scheme, table) in rows {
        for r in table {
            let order = r.order.map(|p| p.to_string()).unwrap_or_default();
            writeln!(out, "{scheme},{},{},{},{order}", r.n, r.h, r.linf)?;
        }
    }
    Ok(())
}

pub fn write_spacing_csv<W: Write>(mut out: W, profile: &[(f64, f64)]) -> io::Result<()> {
    writeln!(out, "x,dx")?;
    for (x, dx) in profile {
        writeln!(out, "{x},{dx}")?;
    }
    Ok(())
}

pub fn write_frames_csv<W: Write>(mut out: W, rows: &[FrameRow]) -> io::Result<()> {
    writeln!(out, "scheme,N,eps3,discrepancy")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.scheme, r.n, r.eps3, r.discrepancy)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergence_csv_layout() {
        let rows = vec![(
            SchemeKind::Lagrangian,
            vec![
                ConvergenceRow { n: 8, h: 0.5, linf: 0.25, order: None },
                ConvergenceRow { n: 16, h: 0.25, linf: 0.0625, order: Some(2.0) },
            ],
        )];
        let mut buf = Vec::new();
        write_convergence_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "scheme,N,h,linf,order\nlagrangian,8,0.5,0.25,\nlagrangian,16,0.25,0.0625,2\n");
    }

    #[test]
    fn spacing_csv_has_no_carriage_returns() {
        let mut buf = Vec::new();
        write_spacing_csv(&mut buf, &[(0.0, 0.1), (0.1, 0.2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 3);
    }
}
