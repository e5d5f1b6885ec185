use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Map};
use urb_core::nbody::{bounds_table, BoundsError, BoundsRecord, ConjectureStatus};
use urb_core::PotentialSpec;

use super::{
    bounds_error_kind, is_input_error, parse_mass, parse_potential, parse_range, solver_config,
};
use crate::args::{BoundsArgs, Format};
use crate::error::{CliError, EXIT_OK, EXIT_SOLVER};
use crate::output::{emit, Cell, Document, Table};

pub const COLUMNS: [&str; 9] = [
    "N",
    "m",
    "potential",
    "q",
    "c",
    "lower",
    "lower_status",
    "upper",
    "ratio",
];

pub fn run(args: &BoundsArgs) -> Result<u8, CliError> {
    let potential = parse_potential(&args.potential)?;
    let range = parse_range(&args.particles, "--N")?;
    let mass = parse_mass(args.mass, "--mass")?;
    let config = solver_config(&args.solver)?;

    let rows = bounds_table(range.clone(), &potential, mass, &config).map_err(|e| match e {
        BoundsError::Solver(ref s) if !is_input_error(s) => CliError::Solver(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;

    let mut table = Table::new(COLUMNS.to_vec());
    let mut failures = 0;
    for (n, row) in range.clone().zip(&rows) {
        let (cells, notes, ok) = row_cells(n, mass, &potential, row);
        failures += usize::from(!ok);
        table.push(cells, notes);
    }

    let doc = Document {
        command: "bounds",
        input: vec![
            ("potential", potential.to_string()),
            ("N", format!("{}..{}", range.start(), range.end())),
            ("mass", mass.to_string()),
            ("basis", config.basis_size.to_string()),
            ("tol", config.tolerance.to_string()),
        ],
        table,
    };
    let format = args.output.format.unwrap_or(Format::Csv);
    emit(args.output.out.as_deref(), &doc.render(format)?)?;
    if let Some(prefix) = &args.plot {
        write_plots(prefix, &rows)?;
    }

    let summary = summary(&potential, mass, &range, &rows, failures);
    if args.output.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(if failures > 0 { EXIT_SOLVER } else { EXIT_OK })
}

fn row_cells(
    n: usize,
    mass: f64,
    potential: &PotentialSpec,
    row: &Result<BoundsRecord, BoundsError>,
) -> (Vec<Cell>, Map<String, serde_json::Value>, bool) {
    let mut cells = vec![
        Cell::Int(n as u64),
        Cell::num(mass),
        Cell::Text(potential.to_string()),
        Cell::num(potential.exponent()),
        Cell::num(potential.coupling()),
    ];
    let mut notes = Map::new();
    match row {
        Ok(rec) => {
            let status = if rec.solver.converged {
                rec.lower_status.label().to_string()
            } else {
                "ERROR:Unconverged".to_string()
            };
            cells.extend([
                Cell::num(rec.lower),
                Cell::Text(status),
                Cell::Num(rec.upper),
                Cell::Num(rec.ratio),
            ]);
            notes.insert("lower_method".into(), json!(rec.lower_method));
            notes.insert("upper_method".into(), json!(rec.upper_method));
            notes.insert("proof".into(), json!(rec.proof.map(|p| p.note())));
            notes.insert("caveat".into(), json!(rec.caveat));
            notes.insert("basis_size".into(), json!(rec.solver.basis_size));
            notes.insert("convergence".into(), json!(rec.solver.convergence));
            (cells, notes, rec.solver.converged)
        }
        Err(e) => {
            cells.extend([
                Cell::Num(None),
                Cell::Text(format!("ERROR:{}", bounds_error_kind(e))),
                Cell::Num(None),
                Cell::Num(None),
            ]);
            notes.insert("error".into(), json!(e.to_string()));
            (cells, notes, false)
        }
    }
}

fn write_plots(
    prefix: &std::path::Path,
    rows: &[Result<BoundsRecord, BoundsError>],
) -> Result<(), CliError> {
    let mut lower = String::from("# N lower\n");
    let mut upper = String::from("# N upper\n");
    for rec in rows.iter().flatten() {
        let _ = writeln!(
            lower,
            "{} {}",
            rec.particles,
            crate::output::round12(rec.lower)
        );
        if let Some(u) = rec.upper {
            let _ = writeln!(upper, "{} {}", rec.particles, crate::output::round12(u));
        }
    }
    let path = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    emit(Some(&path("_lower.dat")), &lower)?;
    emit(Some(&path("_upper.dat")), &upper)
}

fn summary(
    potential: &PotentialSpec,
    mass: f64,
    range: &std::ops::RangeInclusive<usize>,
    rows: &[Result<BoundsRecord, BoundsError>],
    failures: usize,
) -> String {
    let mut s = format!(
        "bounds for V = {potential}, m = {mass}, N = {}..{}: {} rows, {failures} with errors\n",
        range.start(),
        range.end(),
        rows.len()
    );
    let records: Vec<&BoundsRecord> = rows.iter().flatten().collect();
    let worst_ratio = records
        .iter()
        .filter_map(|r| r.ratio.map(|x| (x, r.particles)))
        .fold(None, |best: Option<(f64, usize)>, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        });
    match worst_ratio {
        Some((ratio, n)) => {
            let midpoint = (ratio - 1.0) / (ratio + 1.0);
            let _ = writeln!(s, "max ratio upper/lower: {ratio:.6} (N = {n})");
            let _ = writeln!(
                s,
                "max midpoint error (upper - lower)/(upper + lower): {:.3}%",
                100.0 * midpoint
            );
        }
        None => s.push_str("max ratio upper/lower: n/a (no upper bounds)\n"),
    }
    let conjectured = records
        .iter()
        .filter(|r| r.lower_status == ConjectureStatus::Conjectured)
        .count();
    if conjectured > 0 {
        let _ = writeln!(
            s,
            "lower bound CONJECTURED for {conjectured} rows: {}",
            urb_core::nbody::CONJECTURE_CAVEAT
        );
    } else if !records.is_empty() {
        s.push_str("lower bound PROVEN for every row\n");
    }
    for (n, row) in range.clone().zip(rows) {
        match row {
            Err(e) => {
                let _ = writeln!(s, "N = {n}: error: {e}");
            }
            Ok(r) if !r.solver.converged => {
                let _ = writeln!(
                    s,
                    "N = {n}: not converged (estimate {:.2e} at basis {})",
                    r.solver.convergence, r.solver.basis_size
                );
            }
            Ok(_) => {}
        }
    }
    s
}
