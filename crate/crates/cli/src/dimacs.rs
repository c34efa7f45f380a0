//! DIMACS CNF input restricted to clauses of exactly three distinct
//! literals.

use pushmean_core::reductions::CnfFormula;

use crate::{input_err, CliError};

pub fn parse(text: &str, origin: &str) -> Result<CnfFormula, CliError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<[i64; 3]> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        let err = |msg: String| input_err(format!("{origin}:{no}: {msg}"));
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        // Some benchmark files end with `%` followed by a lone `0`.
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(err("second problem line".into()));
            }
            let f: Vec<&str> = rest.split_whitespace().collect();
            let (vars, count) = match f[..] {
                ["cnf", v, c] => (v.parse().ok(), c.parse().ok()),
                _ => (None, None),
            };
            match (vars, count) {
                (Some(v), Some(c)) => header = Some((v, c)),
                _ => return Err(err("expected `p cnf <variables> <clauses>`".into())),
            }
            continue;
        }
        let (vars, _) = header.ok_or_else(|| err("clause before the `p cnf` line".into()))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| err(format!("`{tok}` is not a literal")))?;
            if lit == 0 {
                let c: [i64; 3] = current
                    .as_slice()
                    .try_into()
                    .map_err(|_| err(format!("clause {} has {} literals, expected 3", clauses.len() + 1, current.len())))?;
                clauses.push(c);
                current.clear();
            } else if lit.unsigned_abs() as usize > vars {
                return Err(err(format!("literal {lit} exceeds the {vars} declared variables")));
            } else {
                current.push(lit);
            }
        }
        last_line = no;
    }
    let (vars, count) = header.ok_or_else(|| input_err(format!("{origin}: missing `p cnf` line")))?;
    if !current.is_empty() {
        return Err(input_err(format!("{origin}:{last_line}: last clause is not terminated by 0")));
    }
    if clauses.len() != count {
        return Err(input_err(format!("{origin}: header declares {count} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(vars, clauses).map_err(|e| input_err(format!("{origin}: {e}")))
}

pub fn render(phi: &CnfFormula) -> String {
    let mut s = format!("p cnf {} {}\n", phi.num_vars, phi.clauses.len());
    for c in &phi.clauses {
        s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_wrapped_clauses() {
        let phi = parse("c example\np cnf 3 2\n1 -2\n 3 0 -1 2 3\n0\n", "t").unwrap();
        assert_eq!(phi.clauses, vec![[1, -2, 3], [-1, 2, 3]]);
        assert_eq!(parse(&render(&phi), "t").unwrap(), phi);
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse("p cnf 3 1\n1 2 0\n", "t").unwrap_err();
        assert_eq!(e.to_string(), "t:2: clause 1 has 2 literals, expected 3");
        let e = parse("p cnf 2 1\n1 2 3 0\n", "t").unwrap_err();
        assert!(e.to_string().starts_with("t:2: literal 3"));
        assert!(parse("p cnf 3 2\n1 2 3 0\n", "t").is_err());
        assert!(parse("1 2 3 0\n", "t").is_err());
        assert!(parse("p cnf 3 1\n1 1 2 0\n", "t").is_err());
    }
}
