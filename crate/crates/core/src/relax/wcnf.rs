//! Extended DIMACS `wcnf` text for weighted instances.
//!
//! ```text
//! c torinfer weighted max2sat
//! c alpha 0.5
//! c c1 1.25
//! c c2 0.25
//! c deg 1 3 8
//! p wcnf 2 3
//! 0.125 1 -2 0
//! 0.375 1 0
//! ```
//!
//! Weights are decimals; literals are 1-based, negative when negated; a clause
//! with a single literal is a 1-link clause. `c alpha`, `c c1`, `c c2` and
//! `c deg <var> <d-> <d+>` comments are optional metadata.

use std::fmt::Write as _;

use crate::tor2sat::{Clause, Literal};

use super::{RelaxError, WeightedClause, WeightedInstance};

pub fn write_wcnf(inst: &WeightedInstance) -> String {
    let mut out = String::from("c torinfer weighted max2sat\n");
    for (name, value) in [("alpha", inst.alpha), ("c1", inst.c1), ("c2", inst.c2)] {
        if value.is_finite() {
            writeln!(out, "c {name} {value}").unwrap();
        }
    }
    for (i, (lo, hi)) in inst.degree_pairs.iter().enumerate() {
        writeln!(out, "c deg {} {} {}", i + 1, lo, hi).unwrap();
    }
    writeln!(out, "p wcnf {} {}", inst.num_vars, inst.clauses.len()).unwrap();
    for c in &inst.clauses {
        if c.is_unit() {
            writeln!(out, "{} {} 0", c.weight, c.a.to_dimacs()).unwrap();
        } else {
            writeln!(out, "{} {} {} 0", c.weight, c.a.to_dimacs(), c.b.to_dimacs()).unwrap();
        }
    }
    out
}

pub fn parse_wcnf(text: &str) -> Result<WeightedInstance, RelaxError> {
    let err = |line: usize, msg: &str| RelaxError::Wcnf {
        line,
        msg: msg.to_string(),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut meta = [f64::NAN; 3];
    let mut degrees: Vec<(usize, u32, u32)> = Vec::new();
    let mut clauses = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "c" => match toks.get(1).copied() {
                Some(key @ ("alpha" | "c1" | "c2")) if toks.len() == 3 => {
                    let v: f64 = toks[2].parse().map_err(|_| err(lineno, "bad metadata value"))?;
                    let slot = ["alpha", "c1", "c2"].iter().position(|k| *k == key).unwrap();
                    meta[slot] = v;
                }
                Some("deg") if toks.len() == 5 => {
                    let parse = |s: &str| s.parse::<u32>().map_err(|_| err(lineno, "bad degree line"));
                    let var = parse(toks[2])? as usize;
                    if var == 0 {
                        return Err(err(lineno, "variables are 1-based"));
                    }
                    degrees.push((var - 1, parse(toks[3])?, parse(toks[4])?));
                }
                _ => {}
            },
            "p" => {
                if header.is_some() {
                    return Err(err(lineno, "duplicate header"));
                }
                if toks.len() != 4 || toks[1] != "wcnf" {
                    return Err(err(lineno, "expected `p wcnf <vars> <clauses>`"));
                }
                let n = toks[2].parse().map_err(|_| err(lineno, "bad variable count"))?;
                let m = toks[3].parse().map_err(|_| err(lineno, "bad clause count"))?;
                header = Some((n, m));
            }
            _ => {
                let (n, _) = header.ok_or_else(|| err(lineno, "clause before header"))?;
                if toks.last() != Some(&"0") || !(3..=4).contains(&toks.len()) {
                    return Err(err(lineno, "expected `<weight> <lit> [<lit>] 0`"));
                }
                let weight: f64 = toks[0].parse().map_err(|_| err(lineno, "bad weight"))?;
                if !(weight >= 0.0 && weight.is_finite()) {
                    return Err(err(lineno, "weight must be a nonnegative number"));
                }
                let mut lits = Vec::new();
                for t in &toks[1..toks.len() - 1] {
                    let x: i64 = t.parse().map_err(|_| err(lineno, "bad literal"))?;
                    if x == 0 || x.unsigned_abs() as usize > n {
                        return Err(err(lineno, "literal out of range"));
                    }
                    lits.push(Literal::new(x.unsigned_abs() as usize - 1, x > 0));
                }
                let clause = match lits.as_slice() {
                    [a] => Clause::unit(*a),
                    [a, b] => Clause::new(*a, *b),
                    _ => unreachable!(),
                };
                clauses.push(WeightedClause::new(clause, weight));
            }
        }
    }

    let (n, m) = header.ok_or_else(|| err(0, "missing `p wcnf` header"))?;
    if clauses.len() != m {
        return Err(err(0, &format!("header promised {m} clauses, found {}", clauses.len())));
    }
    let mut inst = WeightedInstance::from_clauses(n, clauses);
    [inst.alpha, inst.c1, inst.c2] = meta;
    if !degrees.is_empty() {
        if degrees.len() != n || degrees.iter().enumerate().any(|(i, d)| d.0 != i) {
            return Err(err(0, "degree metadata must list every variable in order"));
        }
        inst.degree_pairs = degrees.into_iter().map(|(_, lo, hi)| (lo, hi)).collect();
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::weighted_from_gradients;
    use crate::tor2sat::ClauseSet;

    #[test]
    fn round_trip() {
        let cs = ClauseSet::new(
            2,
            vec![Clause::new(Literal::pos(0), Literal::neg(1)), Clause::new(Literal::neg(0), Literal::neg(1))],
        );
        let mut inst = weighted_from_gradients(&cs, &[0.7, 0.2], 0.4).unwrap();
        inst.degree_pairs = vec![(1, 5), (2, 3)];
        inst.warnings.clear();
        let text = write_wcnf(&inst);
        assert!(text.contains("p wcnf 2 4\n"));
        assert_eq!(parse_wcnf(&text).unwrap(), inst);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_wcnf("1 1 0\n").is_err());
        assert!(parse_wcnf("p wcnf 1 1\n0.5 2 0\n").is_err());
        assert!(parse_wcnf("p wcnf 1 2\n0.5 1 0\n").is_err());
        assert!(parse_wcnf("p wcnf 1 1\n-1 1 0\n").is_err());
        assert!(parse_wcnf("p wcnf 2 1\n1 1 2 3 0\n").is_err());
    }
}
