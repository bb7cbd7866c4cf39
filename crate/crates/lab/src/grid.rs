//! One-dimensional grids written as `geom:a:b:n` or `lin:a:b:n`.

use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// `n` points from `a` to `b` with constant ratio, `0 < a < b`.
    Geometric { a: f64, b: f64, n: usize },
    /// `n` evenly spaced points from `a` to `b`.
    Linear { a: f64, b: f64, n: usize },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            GridSpec::Geometric { a, b, n } | GridSpec::Linear { a, b, n } if n == 1 => vec![a.min(b)],
            GridSpec::Geometric { a, b, n } => {
                let step = (b / a).ln() / (n - 1) as f64;
                (0..n).map(|i| if i + 1 == n { b } else { a * (step * i as f64).exp() }).collect()
            }
            GridSpec::Linear { a, b, n } => {
                let step = (b - a) / (n - 1) as f64;
                (0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect()
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |why: &str| Error::Usage(format!("grid {s:?}: {why}; expected geom:a:b:n or lin:a:b:n"));
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, a, b, n] = parts[..] else {
            return Err(bad("wrong number of fields"));
        };
        let a: f64 = a.parse().map_err(|_| bad("a is not a number"))?;
        let b: f64 = b.parse().map_err(|_| bad("b is not a number"))?;
        let n: usize = n.parse().map_err(|_| bad("n is not a count"))?;
        if n == 0 || !a.is_finite() || !b.is_finite() {
            return Err(bad("need finite endpoints and n >= 1"));
        }
        if n > 1 && !(a < b) {
            return Err(bad("need a < b"));
        }
        match kind {
            "geom" if a > 0.0 => Ok(GridSpec::Geometric { a, b, n }),
            "geom" => Err(bad("geometric grids need a > 0")),
            "lin" => Ok(GridSpec::Linear { a, b, n }),
            _ => Err(bad("unknown kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let g: GridSpec = "geom:1:1000:4".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 4);
        assert_eq!((p[0], p[3]), (1.0, 1000.0));
        assert!((p[1] - 10.0).abs() < 1e-12 && (p[2] - 100.0).abs() < 1e-10);
        let l: GridSpec = "lin:-1:1:5".parse().unwrap();
        assert_eq!(l.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["geom:0:1:3", "lin:1:0:3", "lin:0:1", "log:1:2:3", "lin:0:1:0", "lin:a:1:2"] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
    }
}
