//! Forbidden-subposet problems in the Boolean lattice: poset parameters,
//! copy detection and counting, chain-partition statistics, the two-phase
//! container algorithm for induced fan-free families, exact extremal
//! search at small ground sizes, and reproducible random-family
//! experiments.
//!
//! Every asymptotic quantity handled here is paired with an exhaustive
//! desk-scale oracle in the test suite; the library itself only computes
//! exact values. The `parallel` feature (default) runs the big scans on
//! rayon; without it the same code paths run sequentially.

pub mod arith;
pub mod chains;
pub mod container;
pub mod embed;
pub mod error;
pub mod extremal;
pub mod family;
pub mod par;
pub mod poset;
pub mod random;
pub mod rng;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Parses "a/b" or "a" into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::BadParam(format!("bad integer '{s}'")))
    };
    match text.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den == BigInt::from(0) {
                return Err(Error::BadParam("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(a)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(text)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(5.into()));
        assert_eq!(parse_rational("-1/8").unwrap(), BigRational::new((-1).into(), 8.into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
