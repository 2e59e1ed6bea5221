//! JSON chart files:
//! `{ "dim": n, "gamma": {"k;i,j": expr}, "metric": {"i,j": expr}, "alpha": [expr], "density": expr }`
//! with one-based indices. Omitted Christoffel and metric entries are zero;
//! an entry given for `(i,j)` also fills `(j,i)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Chart, Christoffel, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{parse_expr, RationalExpr};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartFile {
    pub dim: usize,
    #[serde(default)]
    pub gamma: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub metric: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub alpha: Option<Vec<String>>,
    #[serde(default)]
    pub density: Option<String>,
}

fn index(s: &str, n: usize) -> Result<usize> {
    let k: usize = s
        .trim()
        .parse()
        .map_err(|_| Error::Chart(format!("bad index '{s}'")))?;
    if k == 0 || k > n {
        return Err(Error::Chart(format!("index {k} outside 1..={n}")));
    }
    Ok(k - 1)
}

fn pair(s: &str, n: usize) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Chart(format!("expected 'i,j' but got '{s}'")))?;
    Ok((index(a, n)?, index(b, n)?))
}

fn set_sym(slot: &mut [Vec<Option<RationalExpr>>], i: usize, j: usize, v: RationalExpr, what: &str) -> Result<()> {
    for (a, b) in [(i, j), (j, i)] {
        match &slot[a][b] {
            Some(old) if old != &v => {
                return Err(Error::Chart(format!(
                    "{what} entries ({},{}) and ({},{}) disagree",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )))
            }
            _ => slot[a][b] = Some(v.clone()),
        }
    }
    Ok(())
}

fn fill(slot: Vec<Vec<Option<RationalExpr>>>) -> Matrix {
    slot.into_iter()
        .map(|row| row.into_iter().map(|x| x.unwrap_or_default()).collect())
        .collect()
}

impl ChartFile {
    pub fn build(&self) -> Result<Chart> {
        let n = self.dim;
        if n == 0 || n > crate::scalar::vars::MAX_DIM {
            return Err(Error::Chart(format!("unsupported dimension {n}")));
        }
        let gamma: Option<Christoffel> = match &self.gamma {
            None => None,
            Some(entries) => {
                let mut g: Vec<Vec<Vec<Option<RationalExpr>>>> = vec![vec![vec![None; n]; n]; n];
                for (key, expr) in entries {
                    let (k, ij) = key
                        .split_once(';')
                        .ok_or_else(|| Error::Chart(format!("expected 'k;i,j' but got '{key}'")))?;
                    let k = index(k, n)?;
                    let (i, j) = pair(ij, n)?;
                    set_sym(&mut g[k], i, j, parse_expr(expr)?, "gamma")?;
                }
                Some(g.into_iter().map(fill).collect())
            }
        };
        let metric = match &self.metric {
            None => None,
            Some(entries) => {
                let mut m = vec![vec![None; n]; n];
                for (key, expr) in entries {
                    let (i, j) = pair(key, n)?;
                    set_sym(&mut m, i, j, parse_expr(expr)?, "metric")?;
                }
                Some(fill(m))
            }
        };
        let alpha = match &self.alpha {
            None => None,
            Some(a) => Some(a.iter().map(|s| parse_expr(s)).collect::<Result<Vec<_>>>()?),
        };
        let density = self.density.as_deref().map(parse_expr).transpose()?;
        Chart::new(n, gamma, metric, alpha, density)
    }
}

pub fn chart_from_json(src: &str) -> Result<Chart> {
    let file: ChartFile =
        serde_json::from_str(src).map_err(|e| Error::Chart(format!("malformed chart file: {e}")))?;
    file.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_plane_from_metric_and_from_gamma() {
        let a = chart_from_json(r#"{"dim": 2, "metric": {"1,1": "1/q2^2", "2,2": "1/q2^2"}}"#).unwrap();
        let b = chart_from_json(
            r#"{"dim": 2, "gamma": {"1;1,2": "-1/q2", "2;1,1": "1/q2", "2;2,2": "-1/q2"}, "density": "q2^-2"}"#,
        )
        .unwrap();
        assert_eq!(a.christoffel(), b.christoffel());
        assert_eq!(a.alpha(), b.alpha());
        assert!(chart_from_json(r#"{"dim": 2, "gamma": {"1;1,2": "q1", "1;2,1": "q2"}}"#).is_err());
        assert!(chart_from_json(r#"{"dim": 2, "alpha": ["q2", "0"]}"#).is_err());
    }
}
