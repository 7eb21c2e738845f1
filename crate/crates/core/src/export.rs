//! CSV emission. Floats are written with 17 significant digits so every value
//! round-trips exactly through a double-precision parser.

use std::io::Write;

use crate::error::Result;
use crate::heisenberg::FieldSample;
use crate::oscillator::Trajectory;
use crate::skyrme::ProfileRow;

/// `d.dddddddddddddddde±x`: 17 significant digits, `.` as decimal separator.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows<W, const N: usize>(out: W, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()>
where
    W: Write,
{
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.iter().map(|v| format_float(*v)))?;
    }
    writer.flush()?;
    Ok(())
}

/// Header `t,x,xdot`.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory) -> Result<()> {
    write_rows(
        out,
        ["t", "x", "xdot"],
        trajectory.samples.iter().map(|s| [s.t, s.x, s.xdot]),
    )
}

/// Header `x,y,U,V,energy_density`.
pub fn write_field_grid_csv<W: Write>(out: W, grid: &[FieldSample]) -> Result<()> {
    write_rows(
        out,
        ["x", "y", "U", "V", "energy_density"],
        grid.iter().map(|s| [s.x, s.y, s.u, s.v, s.energy_density]),
    )
}

/// Header `r,f,x1,ode_residual,energy_density`.
pub fn write_profile_csv<W: Write>(out: W, rows: &[ProfileRow]) -> Result<()> {
    write_rows(
        out,
        ["r", "f", "x1", "ode_residual", "energy_density"],
        rows.iter().map(|r| [r.r, r.f, r.x1, r.ode_residual, r.energy_density]),
    )
}
