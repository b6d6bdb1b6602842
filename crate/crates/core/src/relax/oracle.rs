use super::{objective_value, Assignment, RelaxError, WeightedInstance};

pub const MAX_BRUTE_FORCE_VARS: usize = 20;

/// Exact optimum by enumerating all assignments in lexicographic order
/// (`false < true`, variable 0 most significant); the first optimum wins.
pub fn brute_force_opt(inst: &WeightedInstance) -> Result<Assignment, RelaxError> {
    let n = inst.num_vars;
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(RelaxError::TooLarge(n));
    }
    let mut values = vec![false; n];
    let mut best = Assignment {
        values: values.clone(),
        objective: objective_value(inst, &values)?,
    };
    for mask in 1u64..(1u64 << n) {
        for (i, v) in values.iter_mut().enumerate() {
            *v = (mask >> (n - 1 - i)) & 1 == 1;
        }
        let obj = objective_value(inst, &values)?;
        if obj > best.objective + 1e-12 {
            best = Assignment {
                values: values.clone(),
                objective: obj,
            };
        }
    }
    Ok(best)
}
