use serde_json::Map;
use urb_core::onebody::{solve, GroundStateResult, OneBodyProblem};

use super::{is_input_error, parse_potential, solver_config, solver_error_kind};
use crate::args::{Format, SolveArgs};
use crate::error::{CliError, EXIT_OK, EXIT_SOLVER};
use crate::output::{emit, round12, Cell, Document, Table};

pub fn run(args: &SolveArgs) -> Result<u8, CliError> {
    let potential = parse_potential(&args.potential)?;
    let config = solver_config(&args.solver)?;
    let problem = OneBodyProblem::new(args.a, args.mu, args.b, potential)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let result = solve(&problem, &config).map_err(|e| {
        if is_input_error(&e) {
            CliError::Input(e.to_string())
        } else {
            CliError::Solver(format!("{}: {e}", solver_error_kind(&e)))
        }
    })?;

    let format = args.output.format.unwrap_or(Format::Text);
    let content = match format {
        Format::Text => text(&result, config.tolerance),
        other => {
            let mut table = Table::new(vec![
                "a",
                "mu",
                "b",
                "potential",
                "q",
                "c",
                "energy",
                "optimal_scale",
                "basis_size",
                "quadrature_order",
                "convergence",
                "converged",
                "bound",
            ]);
            table.push(
                vec![
                    Cell::num(args.a),
                    Cell::num(args.mu),
                    Cell::num(args.b),
                    Cell::Text(potential.to_string()),
                    Cell::num(potential.exponent()),
                    Cell::num(potential.coupling()),
                    Cell::num(result.energy),
                    Cell::num(result.optimal_scale),
                    Cell::Int(result.basis_size as u64),
                    Cell::Int(result.quadrature_order as u64),
                    Cell::num(result.convergence),
                    Cell::Bool(result.converged),
                    Cell::Text("variational-upper".into()),
                ],
                Map::new(),
            );
            let doc = Document {
                command: "solve",
                input: vec![
                    ("a", args.a.to_string()),
                    ("mu", args.mu.to_string()),
                    ("b", args.b.to_string()),
                    ("potential", potential.to_string()),
                    ("basis", config.basis_size.to_string()),
                    ("tol", config.tolerance.to_string()),
                ],
                table,
            };
            doc.render(other)?
        }
    };
    emit(args.output.out.as_deref(), &content)?;

    if result.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "not converged: estimate {:.3e} exceeds tolerance {:.1e} at basis size {}",
            result.convergence, config.tolerance, result.basis_size
        );
        Ok(EXIT_SOLVER)
    }
}

fn text(r: &GroundStateResult, tol: f64) -> String {
    format!(
        "energy         {}\n\
         optimal scale  {}\n\
         basis size     {} (quadrature {})\n\
         convergence    {:.3e} ({}, tolerance {:.1e})\n\
         bound          variational upper bound on the ground energy\n",
        round12(r.energy),
        round12(r.optimal_scale),
        r.basis_size,
        r.quadrature_order,
        r.convergence,
        if r.converged {
            "converged"
        } else {
            "NOT converged"
        },
        tol,
    )
}
