//! SDPA sparse format (`.dat-s`).
//!
//! SDPA solves `min cᵀx  s.t.  Σ x_i F_i − F_0 ⪰ 0`. Our dual
//! `max bᵀy  s.t.  C − Σ y_i A_i ⪰ 0` maps onto it with `x = y`, `c = −b`,
//! `F_0 = −C` and `F_i = −A_i`, so the optimum an external solver reports
//! is the negative of ours. Values are written with 17 significant digits,
//! which makes export followed by import exact.

use std::fmt::Write as _;

use super::{Block, Entry, SdpError, SdpProblem, Sense, SparseBlockMatrix};

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialises `p` in SDPA sparse format.
pub fn export_sdpa(p: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\"{} problem, external optimum is the negative of ours\"", match p.sense() {
        Sense::Maximize => "maximization",
        Sense::Minimize => "minimization",
    });
    let _ = writeln!(out, "{}", p.m());
    let _ = writeln!(out, "{}", p.blocks().len());
    let sizes: Vec<String> = p.blocks().iter().map(|b| b.sdpa_size().to_string()).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.rhs().iter().map(|&b| fmt_value(-b)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    let mut write_matrix = |matno: usize, mat: &SparseBlockMatrix| {
        for e in mat.entries() {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                matno,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                fmt_value(-e.value)
            );
        }
    };
    write_matrix(0, p.objective());
    for (i, a) in p.constraints().iter().enumerate() {
        write_matrix(i + 1, a);
    }
    out
}

/// Parses an SDPA sparse file. Comment lines (starting with `"` or `*`) are
/// skipped, and separators `,(){}` count as whitespace. The sense is not
/// part of the format, so the result is a maximisation.
pub fn import_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));

    let err = |line: usize, message: String| SdpError::Parse { line, message };
    let tokens = |l: &str| -> Vec<String> {
        l.split(|c: char| c.is_whitespace() || ",(){}".contains(c))
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect()
    };
    let mut header = |what: &str| -> Result<(usize, Vec<String>), SdpError> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))?;
        Ok((n, tokens(l)))
    };

    let (ln, t) = header("the number of constraints")?;
    let m: usize = t
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(ln, "expected the number of constraints".into()))?;
    let (ln, t) = header("the number of blocks")?;
    let nblocks: usize = t
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(ln, "expected the number of blocks".into()))?;
    let (ln, t) = header("the block sizes")?;
    if t.len() < nblocks {
        return Err(err(ln, format!("expected {nblocks} block sizes, found {}", t.len())));
    }
    let blocks = t[..nblocks]
        .iter()
        .map(|s| {
            let v: i64 = s.parse().map_err(|_| err(ln, format!("bad block size {s:?}")))?;
            match v {
                0 => Err(err(ln, "block size 0".into())),
                v if v > 0 => Ok(Block::Psd(v as usize)),
                v => Ok(Block::Diagonal(v.unsigned_abs() as usize)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (ln, t) = header("the objective vector")?;
    if t.len() < m {
        return Err(err(ln, format!("expected {m} objective coefficients, found {}", t.len())));
    }
    let rhs = t[..m]
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map(|v| -v)
                .map_err(|_| err(ln, format!("bad number {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut per_matrix: Vec<Vec<Entry>> = vec![Vec::new(); m + 1];
    for (ln, l) in lines {
        let t = tokens(l);
        if t.len() != 5 {
            return Err(err(ln, format!("expected 5 fields, found {}", t.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(ln, format!("bad index {s:?}")));
        let (matno, blk, i, j) = (int(&t[0])?, int(&t[1])?, int(&t[2])?, int(&t[3])?);
        let value: f64 = t[4].parse().map_err(|_| err(ln, format!("bad number {:?}", t[4])))?;
        if matno > m {
            return Err(err(ln, format!("matrix number {matno} exceeds {m}")));
        }
        if blk == 0 || blk > nblocks {
            return Err(err(ln, format!("block number {blk} out of range")));
        }
        let dim = blocks[blk - 1].dim();
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(err(ln, format!("entry ({i}, {j}) outside block of size {dim}")));
        }
        if matches!(blocks[blk - 1], Block::Diagonal(_)) && i != j {
            return Err(err(ln, "off-diagonal entry in a diagonal block".into()));
        }
        per_matrix[matno].push(Entry {
            block: blk - 1,
            row: i - 1,
            col: j - 1,
            value: -value,
        });
    }

    let mut p = SdpProblem::new(blocks, Sense::Maximize);
    let mut mats = per_matrix.into_iter();
    p.set_objective(SparseBlockMatrix::from_entries(mats.next().unwrap_or_default()));
    for (a, b) in mats.zip(rhs) {
        p.add_constraint(SparseBlockMatrix::from_entries(a), b);
    }
    p.validate()?;
    Ok(p)
}
