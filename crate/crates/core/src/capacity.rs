//! AWGN capacity in bits per channel use and its inverse.

use crate::error::{Error, Result};

/// `C(x) = ½·log₂(1 + x)` for a non-negative SNR.
pub fn capacity(snr: f64) -> Result<f64> {
    if !snr.is_finite() || snr < 0.0 {
        return Err(Error::Domain(snr));
    }
    Ok(cap(snr))
}

/// Inverse of [`capacity`]: the SNR `2^{2r} − 1` needed to support rate `r`.
pub fn inverse_capacity(rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::Domain(rate));
    }
    Ok(inv_cap(rate))
}

// Unchecked versions used on solver hot paths. Negative round-off is clamped.
#[inline]
pub(crate) fn cap(snr: f64) -> f64 {
    0.5 * snr.max(0.0).ln_1p() / std::f64::consts::LN_2
}

#[inline]
pub(crate) fn inv_cap(rate: f64) -> f64 {
    (2.0 * rate.max(0.0) * std::f64::consts::LN_2).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(capacity(0.0).unwrap(), 0.0);
        assert!((capacity(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((capacity(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(inverse_capacity(0.0).unwrap(), 0.0);
        assert!((inverse_capacity(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(capacity(-1.0), Err(Error::Domain(-1.0)));
        assert!(capacity(f64::NAN).is_err());
        assert!(capacity(f64::INFINITY).is_err());
        assert!(inverse_capacity(-0.25).is_err());
    }

    #[test]
    fn round_trip_fixed_points() {
        for x in [0.1, 7.3, 100.0] {
            let back = inverse_capacity(capacity(x).unwrap()).unwrap();
            assert!((back - x).abs() <= 1e-12 * x);
        }
    }

    proptest! {
        #[test]
        fn mutually_inverse(x in 0.0f64..1e6) {
            let back = inverse_capacity(capacity(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-10 * x.max(1e-300) + 1e-300);
        }

        #[test]
        fn concave(x in 0.0f64..1e4, y in 0.0f64..1e4, lambda in 0.0f64..=1.0) {
            let mid = capacity(lambda * x + (1.0 - lambda) * y).unwrap();
            let chord = lambda * capacity(x).unwrap() + (1.0 - lambda) * capacity(y).unwrap();
            prop_assert!(mid >= chord - 1e-12);
        }

        #[test]
        fn monotone(x in 0.0f64..1e6, dx in 0.0f64..1e3) {
            prop_assert!(capacity(x + dx).unwrap() >= capacity(x).unwrap());
        }
    }
}
