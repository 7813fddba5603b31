//! Debug export of a [`LinearProgram`] in the fixed-layout LP text format,
//! for cross-checking instances against third-party solvers.

use std::io::Write;

use crate::scalar::Real;

use super::{LinearProgram, LpError, RowSense};

fn term<T: Real>(first: bool, coeff: T, var: usize) -> String {
    let sign = if coeff < T::zero() {
        "- "
    } else if first {
        ""
    } else {
        "+ "
    };
    format!("{}{:.17e} x{}", sign, coeff.abs(), var)
}

/// Writes the LP in CPLEX-style text form. Zero coefficients are omitted;
/// every value is printed with 17 significant digits.
pub fn write_lp_text<T: Real, W: Write>(lp: &LinearProgram<T>, out: &mut W) -> Result<(), LpError> {
    lp.validate()?;
    writeln!(out, "Minimize")?;
    let mut obj = String::from(" obj:");
    let mut first = true;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != T::zero() {
            obj.push(' ');
            obj.push_str(&term(first, c, j));
            first = false;
        }
    }
    if first {
        obj.push_str(" 0 x0");
    }
    writeln!(out, "{obj}")?;

    writeln!(out, "Subject To")?;
    for i in 0..lp.n_rows() {
        let mut line = format!(" r{i}:");
        let mut first = true;
        for (j, &a) in lp.a.row(i).iter().enumerate() {
            if a != T::zero() {
                line.push(' ');
                line.push_str(&term(first, a, j));
                first = false;
            }
        }
        if first {
            line.push_str(" 0 x0");
        }
        let op = match lp.senses[i] {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        writeln!(out, "{line} {op} {:.17e}", lp.rhs[i])?;
    }

    writeln!(out, "Bounds")?;
    for (j, b) in lp.bounds.iter().enumerate() {
        match (b.lower.is_finite(), b.upper.is_finite()) {
            (false, false) => writeln!(out, " x{j} free")?,
            (true, false) => writeln!(out, " x{j} >= {:.17e}", b.lower)?,
            (false, true) => writeln!(out, " x{j} <= {:.17e}", b.upper)?,
            (true, true) => writeln!(out, " {:.17e} <= x{j} <= {:.17e}", b.lower, b.upper)?,
        }
    }
    writeln!(out, "End")?;
    Ok(())
}
