//! Machine-free 3x+1 arithmetic used as ground truth.
//!
//! All arithmetic is checked; an overflow is an error, never a wrapped value.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not a positive integer")]
    NotPositive(i128),
    #[error("arithmetic overflow while iterating from {0}")]
    Overflow(i128),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(i64),
    #[error("expected {expected} coefficient pairs, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("residue {residue}: {a}*{residue} + {b} is not divisible by {d}")]
    NotIntegral { residue: i64, a: i64, b: i64, d: i64 },
}

/// The 3x+1 function: `x/2` for even `x`, `(3x+1)/2` for odd `x`.
pub fn t_step(x: u64) -> Result<u64, OracleError> {
    if x == 0 {
        return Err(OracleError::NotPositive(0));
    }
    let n = x / 2;
    if x.is_multiple_of(2) {
        Ok(n)
    } else {
        // T(2n+1) = 3n+2
        n.checked_mul(3)
            .and_then(|v| v.checked_add(2))
            .ok_or(OracleError::Overflow(x as i128))
    }
}

/// `x, T(x), T²(x), …` with `len` terms, continuing through the 1 ↦ 2 loop.
pub fn orbit(x: u64, len: usize) -> Result<Vec<u64>, OracleError> {
    let mut out = Vec::with_capacity(len);
    let mut v = x;
    for i in 0..len {
        if i > 0 {
            v = t_step(v)?;
        } else if v == 0 {
            return Err(OracleError::NotPositive(0));
        }
        out.push(v);
    }
    Ok(out)
}

/// A function `f(x) = (a_i x + b_i) / d` for `x ≡ i (mod d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollatzLikeSpec {
    modulus: i64,
    coefficients: Vec<(i64, i64)>,
}

impl CollatzLikeSpec {
    /// Rejects coefficient pairs that would make some residue class produce a
    /// non-integer.
    pub fn new(modulus: i64, coefficients: Vec<(i64, i64)>) -> Result<Self, OracleError> {
        if modulus < 2 {
            return Err(OracleError::BadModulus(modulus));
        }
        if coefficients.len() as i64 != modulus {
            return Err(OracleError::CoefficientCount {
                expected: modulus as usize,
                got: coefficients.len(),
            });
        }
        for (i, &(a, b)) in coefficients.iter().enumerate() {
            let residue = i as i64;
            let num = (a as i128) * (residue as i128) + b as i128;
            if num.rem_euclid(modulus as i128) != 0 {
                return Err(OracleError::NotIntegral {
                    residue,
                    a,
                    b,
                    d: modulus,
                });
            }
        }
        Ok(CollatzLikeSpec {
            modulus,
            coefficients,
        })
    }

    /// `T` written as a Collatz-like function: `d = 2`, `(1, 0)`, `(3, 1)`.
    pub fn three_x_plus_one() -> Self {
        CollatzLikeSpec::new(2, vec![(1, 0), (3, 1)]).expect("integral by construction")
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn coefficients(&self) -> &[(i64, i64)] {
        &self.coefficients
    }

    /// Exact value of the function at any integer `x`.
    pub fn step(&self, x: i64) -> Result<i64, OracleError> {
        let residue = x.rem_euclid(self.modulus);
        let (a, b) = self.coefficients[residue as usize];
        let num = a
            .checked_mul(x)
            .and_then(|v| v.checked_add(b))
            .ok_or(OracleError::Overflow(x as i128))?;
        debug_assert_eq!(num.rem_euclid(self.modulus), 0);
        Ok(num.div_euclid(self.modulus))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedOne,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub start: u64,
    pub values: Vec<u64>,
    pub terminated_by: Termination,
}

impl Trajectory {
    /// Iterations applied (one less than the number of values).
    pub fn iterations(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(self.start)
    }
}

/// Iterates `T` from `x` until the first 1 or until `max_iters` iterations.
pub fn trajectory(x: u64, max_iters: usize) -> Result<Trajectory, OracleError> {
    if x == 0 {
        return Err(OracleError::NotPositive(0));
    }
    let mut values = vec![x];
    let mut v = x;
    while v != 1 {
        if values.len() > max_iters {
            return Ok(Trajectory {
                start: x,
                values,
                terminated_by: Termination::Budget,
            });
        }
        v = t_step(v)?;
        values.push(v);
    }
    Ok(Trajectory {
        start: x,
        values,
        terminated_by: Termination::ReachedOne,
    })
}

/// True when `x` lies on the 1 ↦ 2 ↦ 1 loop.
pub fn on_final_loop(x: u64) -> bool {
    x == 1 || x == 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_step_values() {
        assert_eq!(t_step(2), Ok(1));
        assert_eq!(t_step(1), Ok(2));
        assert_eq!(t_step(7), Ok(11));
        assert_eq!(t_step(0), Err(OracleError::NotPositive(0)));
    }

    #[test]
    fn t_step_detects_overflow() {
        assert!(matches!(t_step(u64::MAX), Err(OracleError::Overflow(_))));
        // largest odd value that still fits
        let x = (u64::MAX - 2) / 3 * 2 + 1;
        assert!(t_step(x).is_ok());
        assert!(t_step(1 << 62).is_ok());
    }

    #[test]
    fn collatz_like_examples() {
        let half_up = CollatzLikeSpec::new(2, vec![(1, 0), (1, 1)]).unwrap();
        assert_eq!(half_up.step(5), Ok(3));
        let third = CollatzLikeSpec::new(3, vec![(1, 0), (1, 2), (1, 1)]).unwrap();
        assert_eq!(third.step(4), Ok(2));
        assert_eq!(third.step(-4), Ok(-1));
    }

    #[test]
    fn collatz_like_rejects_non_integral() {
        let err = CollatzLikeSpec::new(2, vec![(1, 0), (3, 0)]).unwrap_err();
        assert!(matches!(err, OracleError::NotIntegral { residue: 1, .. }));
        assert!(matches!(
            CollatzLikeSpec::new(1, vec![(1, 0)]),
            Err(OracleError::BadModulus(1))
        ));
        assert!(matches!(
            CollatzLikeSpec::new(3, vec![(1, 0)]),
            Err(OracleError::CoefficientCount { .. })
        ));
    }

    #[test]
    fn collatz_like_overflow_is_reported() {
        let spec = CollatzLikeSpec::three_x_plus_one();
        assert!(matches!(spec.step(i64::MAX), Err(OracleError::Overflow(_))));
    }

    #[test]
    fn trajectories() {
        assert_eq!(trajectory(2, 100).unwrap().values, [2, 1]);
        assert_eq!(trajectory(1, 100).unwrap().values, [1]);
        let t7 = trajectory(7, 100).unwrap();
        assert_eq!(t7.values, [7, 11, 17, 26, 13, 20, 10, 5, 8, 4, 2, 1]);
        assert_eq!(t7.terminated_by, Termination::ReachedOne);
        let cut = trajectory(7, 3).unwrap();
        assert_eq!(cut.values, [7, 11, 17, 26]);
        assert_eq!(cut.terminated_by, Termination::Budget);
    }

    #[test]
    fn orbit_continues_through_loop() {
        assert_eq!(orbit(1, 4).unwrap(), [1, 2, 1, 2]);
        assert_eq!(orbit(3, 0).unwrap(), Vec::<u64>::new());
    }
}
