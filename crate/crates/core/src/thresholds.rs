//! Exact critical exponents.

use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::{Error, Result};

/// Exact reduced rational with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentValue(pub Ratio<i64>);

impl ExponentValue {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::OutOfRange("zero denominator"));
        }
        Ok(ExponentValue(Ratio::new(num, den)))
    }

    pub fn int(v: i64) -> Self {
        ExponentValue(Ratio::from_integer(v))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.num() as f64 / self.den() as f64
    }
}

impl fmt::Display for ExponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

/// An exponent that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(ExponentValue),
    Infinite,
}

fn check_dim(n: u32) -> Result<i64> {
    if n < 3 {
        return Err(Error::OutOfRange("dimension must be at least 3"));
    }
    Ok(n as i64)
}

/// Integrability threshold of `K_f` for degree-`k` homology of ball
/// preimages. `k = n - 1` uses the same branch as `k > n/2`.
pub fn critical_p(n: u32, k: u32) -> Result<ExponentValue> {
    let nn = check_dim(n)?;
    if k < 1 || k > n - 1 {
        return Err(Error::OutOfRange("degree must be in 1..=n-1"));
    }
    let k = k as i64;
    Ok(if 2 * k < nn {
        ExponentValue(Ratio::new(nn - (k + 1), k + 1))
    } else if 2 * k == nn {
        ExponentValue::int(1)
    } else {
        ExponentValue(Ratio::new(k - 1, nn - (k - 1)))
    })
}

/// `n / (p + 1)`: fibers have vanishing Hausdorff measure in this dimension
/// when `K_f ∈ L^p`.
pub fn hausdorff_exponent(n: u32, p: ExponentValue) -> Result<ExponentValue> {
    let nn = check_dim(n)?;
    if p.0 < Ratio::new(1, nn - 1) {
        return Err(Error::OutOfRange("need p >= 1/(n-1)"));
    }
    Ok(ExponentValue(Ratio::from_integer(nn) / (p.0 + 1)))
}

/// `(n - 2) / 2`.
pub fn cellularity_p(n: u32) -> Result<ExponentValue> {
    let nn = check_dim(n)?;
    Ok(ExponentValue(Ratio::new(nn - 2, 2)))
}

/// The degree `n - 1` exponent stated directly, `(n - 2)/2`.
pub fn codim_one_exponent(n: u32) -> Result<ExponentValue> {
    cellularity_p(n)
}

/// `r` with `n/p + 1/q = 1/r`. `p = ∞` gives `r = q`.
pub fn neo_r(n: u32, p: Exponent, q: ExponentValue) -> Result<ExponentValue> {
    let nn = check_dim(n)?;
    if q.0 <= Ratio::from_integer(0) {
        return Err(Error::OutOfRange("need q > 0"));
    }
    match p {
        Exponent::Infinite => Ok(q),
        Exponent::Finite(p) => {
            if p.0 < Ratio::from_integer(nn) {
                return Err(Error::OutOfRange("need p >= n"));
            }
            Ok(ExponentValue((Ratio::from_integer(nn) / p.0 + q.0.recip()).recip()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdRow {
    pub n: u32,
    /// Entries for `k = 1..=n-1`; the last one is parenthetical.
    pub values: Vec<ExponentValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdTable {
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdTable {
    pub fn row(&self, n: u32) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Whether column `k` is the parenthetical `k = n - 1` entry.
    pub fn is_parenthetical(n: u32, k: u32) -> bool {
        k + 1 == n
    }
}

pub fn fig1_table(n_max: u32) -> Result<ThresholdTable> {
    check_dim(n_max)?;
    let rows = (3..=n_max)
        .map(|n| {
            let values = (1..n).map(|k| critical_p(n, k)).collect::<Result<Vec<_>>>()?;
            Ok(ThresholdRow { n, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn q(n: i64, d: i64) -> ExponentValue {
        ExponentValue::new(n, d).unwrap()
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_p(3, 1).unwrap(), q(1, 2));
        assert_eq!(critical_p(6, 3).unwrap(), q(1, 1));
        assert_eq!(critical_p(8, 2).unwrap(), q(5, 3));
        assert!(critical_p(3, 3).is_err());
        assert!(critical_p(2, 1).is_err());
    }

    #[test]
    fn other_formulas() {
        assert_eq!(hausdorff_exponent(3, q(2, 1)).unwrap(), q(1, 1));
        assert_eq!(hausdorff_exponent(3, q(1, 2)).unwrap(), q(2, 1));
        assert!(hausdorff_exponent(3, q(1, 3)).is_err());
        assert_eq!(cellularity_p(3).unwrap(), q(1, 2));
        assert_eq!(cellularity_p(4).unwrap(), q(1, 1));
        assert_eq!(cellularity_p(6).unwrap(), q(2, 1));
        assert_eq!(neo_r(3, Exponent::Finite(q(3, 1)), q(1, 1)).unwrap(), q(1, 2));
        assert_eq!(neo_r(3, Exponent::Finite(q(6, 1)), q(2, 1)).unwrap(), q(1, 1));
        assert_eq!(neo_r(3, Exponent::Infinite, q(7, 3)).unwrap(), q(7, 3));
    }

    #[test]
    fn reduced_and_displayed() {
        let v = q(4, -6);
        assert_eq!((v.num(), v.den()), (-2, 3));
        assert_eq!(v.to_string(), "-2/3");
        assert_eq!(q(3, 1).to_string(), "3");
    }

    #[test]
    fn last_column_is_the_codim_one_exponent() {
        for n in 3..=64 {
            assert_eq!(critical_p(n, n - 1).unwrap(), codim_one_exponent(n).unwrap());
        }
    }
}
