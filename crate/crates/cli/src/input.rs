use multiword_cg::problemgen::{generate, GeneratedProblem};
use multiword_cg::sparse::{expand_symmetric, read_matrix_market_file, CsrMatrix, Symmetry};

use crate::{input_err, Failure, InputArgs};

pub struct Problem {
    pub name: String,
    pub generated: GeneratedProblem,
}

pub fn matrix(args: &InputArgs) -> Result<Option<(String, CsrMatrix)>, Failure> {
    if let Some(spec) = &args.synthetic {
        return Ok(Some((spec.to_string(), spec.build())));
    }
    let Some(path) = &args.matrix else {
        return Ok(None);
    };
    let mm = read_matrix_market_file(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let m = match mm.symmetry {
        Symmetry::Symmetric => {
            expand_symmetric(&mm.matrix).map_err(|e| input_err(format!("{}: {e}", path.display())))?
        }
        Symmetry::General => mm.matrix,
    };
    Ok(Some((path.display().to_string(), m)))
}

/// Loads the matrix and builds the exactly solvable system around it.
pub fn load(args: &InputArgs) -> Result<Problem, Failure> {
    let (name, m) = matrix(args)?.ok_or_else(|| Failure::Usage("one of --matrix or --synthetic is required".into()))?;
    let generated = generate(&m).map_err(|e| input_err(format!("{name}: {e}")))?;
    Ok(Problem { name, generated })
}
