//! Tableau text format:
//!
//! ```text
//! # GHZ on three qubits
//! n=3
//! +XXX
//! +ZZI
//! -IZZ
//! ```
//!
//! Blank lines and `#` comments are ignored. The sign is optional and
//! defaults to `+`.

use crate::error::{Error, Result};

use super::tableau::{Pauli, StabilizerTableau};

pub fn parse_tableau(text: &str) -> Result<StabilizerTableau> {
    let mut n: Option<usize> = None;
    let mut gens: Vec<(usize, Pauli)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match n {
            None => {
                let rest = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .ok_or_else(|| Error::parse(line_no, "expected header `n=<qubits>`"))?;
                let v: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad qubit count `{rest}`")))?;
                if v == 0 {
                    return Err(Error::parse(line_no, "qubit count must be positive"));
                }
                n = Some(v);
            }
            Some(nq) => {
                let p = Pauli::parse(line)
                    .ok_or_else(|| Error::parse(line_no, format!("bad Pauli string `{line}`")))?;
                let len = line.trim_start_matches(['+', '-']).chars().count();
                if len != nq {
                    return Err(Error::parse(
                        line_no,
                        format!("generator has {len} letters, expected {nq}"),
                    ));
                }
                if let Some((j, _)) = gens.iter().find(|(_, q)| q.anticommutes(&p)) {
                    return Err(Error::parse(
                        line_no,
                        format!("generator anticommutes with line {j}"),
                    ));
                }
                gens.push((line_no, p));
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(last_line.max(1), "missing header `n=<qubits>`"))?;
    if gens.len() != n {
        return Err(Error::parse(
            last_line.max(1),
            format!("expected {n} generators, found {}", gens.len()),
        ));
    }
    StabilizerTableau::new(n, gens.into_iter().map(|(_, p)| p).collect())
        .map_err(|e| Error::parse(last_line, e.to_string()))
}

pub fn format_tableau(tab: &StabilizerTableau) -> String {
    let n = tab.n_qubits();
    let mut s = format!("n={n}\n");
    for g in tab.generators() {
        s.push_str(&g.to_string_n(n));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = super::super::random_stabilizer(7, 2).unwrap();
        assert_eq!(parse_tableau(&format_tableau(&t)).unwrap(), t);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_tableau("n=2\n+XX\n+ZQ\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_tableau("# c\nn=3\n+XXX\n+ZZI\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_tableau("n=2\n+XI\n+ZI\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_tableau("").is_err());
    }

    #[test]
    fn comments_and_unsigned() {
        let t = parse_tableau("# ghz\nn=3\nXXX # all X\nZZI\n-IZZ\n").unwrap();
        assert!(t.generators()[2].negative);
    }
}
