//! Flat text snapshots: a header line `kind dims...` followed by
//! whitespace-separated entries (matrices row-major).

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::{BilinearGame, BilinearQuadraticGame, MinimaxProblem, ScalarGame, ScalarGameId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SerializedProblem {
    Bilinear(BilinearGame),
    BilinearQuadratic(BilinearQuadraticGame),
    Scalar(ScalarGame),
}

impl SerializedProblem {
    pub fn as_problem(&self) -> &dyn MinimaxProblem {
        match self {
            SerializedProblem::Bilinear(g) => g,
            SerializedProblem::BilinearQuadratic(g) => g,
            SerializedProblem::Scalar(g) => g,
        }
    }
}

fn push_matrix(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn push_vector(out: &mut String, v: &DVector<f64>) {
    let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

pub fn write_problem(problem: &SerializedProblem) -> String {
    let mut out = String::new();
    match problem {
        SerializedProblem::Bilinear(g) => {
            let (n, m) = g.a().shape();
            writeln!(out, "bilinear {n} {m}").unwrap();
            push_matrix(&mut out, g.a());
            push_vector(&mut out, g.b());
            push_vector(&mut out, g.c());
        }
        SerializedProblem::BilinearQuadratic(g) => {
            let (n, m) = g.a().shape();
            writeln!(out, "bilinear_quadratic {n} {m}").unwrap();
            push_matrix(&mut out, g.a());
            push_matrix(&mut out, g.b_mat());
            push_matrix(&mut out, g.c_mat());
            push_vector(&mut out, g.b());
            push_vector(&mut out, g.c());
        }
        SerializedProblem::Scalar(g) => {
            writeln!(out, "scalar {}", g.id).unwrap();
        }
    }
    out
}

struct Tokens<'a> {
    inner: std::str::SplitWhitespace<'a>,
}

impl Tokens<'_> {
    fn word(&mut self, what: &str) -> Result<&str> {
        self.inner.next().ok_or_else(|| Error::Parse(format!("unexpected end of input reading {what}")))
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let w = self.word(what)?;
        w.parse().map_err(|_| Error::Parse(format!("bad {what} `{w}`")))
    }

    fn reals(&mut self, len: usize, what: &str) -> Result<Vec<f64>> {
        (0..len)
            .map(|_| {
                let w = self.word(what)?;
                let v: f64 = w.parse().map_err(|_| Error::Parse(format!("bad number `{w}` in {what}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Parse(format!("non-finite entry in {what}")))
                }
            })
            .collect()
    }

    fn matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_row_slice(rows, cols, &self.reals(rows * cols, what)?))
    }

    fn vector(&mut self, len: usize, what: &str) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(self.reals(len, what)?))
    }
}

pub fn read_problem(text: &str) -> Result<SerializedProblem> {
    let mut t = Tokens {
        inner: text.split_whitespace(),
    };
    let kind = t.word("header")?.to_string();
    let problem = match kind.as_str() {
        "bilinear" => {
            let (n, m) = (t.count("rows")?, t.count("cols")?);
            let a = t.matrix(n, m, "A")?;
            let b = t.vector(n, "b")?;
            let c = t.vector(m, "c")?;
            SerializedProblem::Bilinear(BilinearGame::new(a, b, c)?)
        }
        "bilinear_quadratic" => {
            let (n, m) = (t.count("rows")?, t.count("cols")?);
            let a = t.matrix(n, m, "A")?;
            let bm = t.matrix(n, n, "B")?;
            let cm = t.matrix(m, m, "C")?;
            let b = t.vector(n, "b")?;
            let c = t.vector(m, "c")?;
            SerializedProblem::BilinearQuadratic(BilinearQuadraticGame::new(a, bm, cm, b, c)?)
        }
        "scalar" => SerializedProblem::Scalar(ScalarGame::new(t.word("game id")?.parse::<ScalarGameId>()?)),
        other => return Err(Error::Parse(format!("unknown problem kind `{other}`"))),
    };
    if let Some(extra) = t.inner.next() {
        return Err(Error::Parse(format!("trailing data starting at `{extra}`")));
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_random_bilinear, make_random_bilinear_quadratic};

    #[test]
    fn round_trips_are_exact() {
        let cases = [
            SerializedProblem::Bilinear(make_random_bilinear(5, 1, Some(30.0))),
            SerializedProblem::BilinearQuadratic(make_random_bilinear_quadratic(4, 2, 0.3)),
            SerializedProblem::Scalar(ScalarGame::new(ScalarGameId::QuarticExp)),
        ];
        for p in cases {
            let text = write_problem(&p);
            assert_eq!(read_problem(&text).unwrap(), p);
        }
    }

    #[test]
    fn malformed_input() {
        assert!(read_problem("").is_err());
        assert!(read_problem("bilinear 1 1\n1\n2\n").is_err());
        assert!(read_problem("bilinear 1 1\n1 2 3 4\n").is_err());
        assert!(read_problem("bilinear 1 1\nx 2 3\n").is_err());
        assert!(read_problem("triangle 2").is_err());
    }
}
