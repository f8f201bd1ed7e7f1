//! Free-format MPS export of a commitment model.
//!
//! Column and row names are deterministic: variables are `x_g_t`, `y_g_t`,
//! `u_g_t`, `v_g_t`, `f_g_t` (1-based generator and period), rows carry
//! their constraint class and index. Binaries are wrapped in integrality
//! markers, two-sided rows use RANGES, and the objective sense is written
//! explicitly.

use std::fmt::Write as _;

use uc_core::formulation::MilpModel;

/// Renders the model as a free-format MPS document.
pub fn write_mps(model: &MilpModel, name: &str) -> String {
    // Transpose rows once so each column's entries stream out in order.
    let mut per_var: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, row) in model.rows.iter().enumerate() {
        for &(j, coef) in &row.coeffs {
            if coef != 0.0 {
                per_var[j].push((i, coef));
            }
        }
    }
    let row_names: Vec<String> = model
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{}_{}", r.tag.label(), i + 1))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    let _ = writeln!(out, "OBJSENSE");
    let _ = writeln!(out, " MIN");
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N COST");
    for (row, name) in model.rows.iter().zip(&row_names) {
        let sense = match (row.lb.is_finite(), row.ub.is_finite()) {
            (true, true) if row.lb == row.ub => 'E',
            (false, false) => 'N',
            (true, false) => 'G',
            // One-sided upper rows and two-sided rows (via RANGES).
            _ => 'L',
        };
        let _ = writeln!(out, " {sense} {name}");
    }
    let _ = writeln!(out, "COLUMNS");
    let mut marker = 0usize;
    let mut in_integer = false;
    for (j, var) in model.vars.iter().enumerate() {
        if var.integer != in_integer {
            marker += 1;
            let kind = if var.integer { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, " MARKER{marker} 'MARKER' {kind}");
            in_integer = var.integer;
        }
        let col = model.var_name(j);
        if var.obj != 0.0 {
            let _ = writeln!(out, " {col} COST {}", var.obj);
        }
        for &(i, coef) in &per_var[j] {
            let _ = writeln!(out, " {col} {} {}", row_names[i], coef);
        }
    }
    if in_integer {
        marker += 1;
        let _ = writeln!(out, " MARKER{marker} 'MARKER' 'INTEND'");
    }
    let _ = writeln!(out, "RHS");
    for (row, name) in model.rows.iter().zip(&row_names) {
        let rhs = if row.ub.is_finite() {
            row.ub
        } else if row.lb.is_finite() {
            row.lb
        } else {
            continue;
        };
        if rhs != 0.0 {
            let _ = writeln!(out, " RHS {name} {rhs}");
        }
    }
    let _ = writeln!(out, "RANGES");
    for (row, name) in model.rows.iter().zip(&row_names) {
        if row.lb.is_finite() && row.ub.is_finite() && row.lb != row.ub {
            let _ = writeln!(out, " RNG {name} {}", row.ub - row.lb);
        }
    }
    let _ = writeln!(out, "BOUNDS");
    for (j, var) in model.vars.iter().enumerate() {
        let col = model.var_name(j);
        if var.integer && var.lb == 0.0 && var.ub == 1.0 {
            let _ = writeln!(out, " BV BND {col}");
            continue;
        }
        if var.lb != 0.0 {
            let _ = writeln!(out, " LO BND {col} {}", var.lb);
        }
        if var.ub.is_finite() {
            let _ = writeln!(out, " UP BND {col} {}", var.ub);
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}
