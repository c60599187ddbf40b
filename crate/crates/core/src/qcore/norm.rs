use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent of an L_p norm. `+∞` is its own variant rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    /// Accepts any `p > 0` (finite) or `+∞`.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(NormOrder::Infinity)
        } else if p > 0.0 && p.is_finite() {
            Ok(NormOrder::Finite(p))
        } else {
            Err(Error::param(format!(
                "norm order must satisfy p > 0 or p = inf, got {p}"
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormOrder::Infinity => Ok(()),
            NormOrder::Finite(p) => NormOrder::new(p).map(|_| ()),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            NormOrder::Finite(p) => p,
            NormOrder::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, NormOrder::Infinity)
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Finite(p) => write!(f, "{p}"),
            NormOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(NormOrder::Infinity),
            _ => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::param(format!("cannot parse norm order {s:?}")))?;
                NormOrder::new(p)
            }
        }
    }
}

/// `(Σ a_i^p)^(1/p)` over already-nonnegative magnitudes; max for `p = ∞`.
pub(crate) fn pnorm_of_magnitudes(mags: impl Iterator<Item = f64>, p: NormOrder) -> f64 {
    match p {
        NormOrder::Infinity => mags.fold(0.0, f64::max),
        NormOrder::Finite(1.0) => mags.sum(),
        NormOrder::Finite(2.0) => mags.map(|a| a * a).sum::<f64>().sqrt(),
        NormOrder::Finite(p) => mags.map(|a| a.powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_orders() {
        assert_eq!("inf".parse::<NormOrder>().unwrap(), NormOrder::Infinity);
        assert_eq!("Infinity".parse::<NormOrder>().unwrap(), NormOrder::Infinity);
        assert_eq!("1.5".parse::<NormOrder>().unwrap(), NormOrder::Finite(1.5));
        assert!("0".parse::<NormOrder>().is_err());
        assert!("-2".parse::<NormOrder>().is_err());
        assert!("nan".parse::<NormOrder>().is_err());
        assert!("two".parse::<NormOrder>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for p in [NormOrder::Finite(0.5), NormOrder::Finite(3.0), NormOrder::Infinity] {
            assert_eq!(p.to_string().parse::<NormOrder>().unwrap(), p);
        }
    }
}
