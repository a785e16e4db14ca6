use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use qcollide::ensemble::{haar_unitary, sample_rng};
use qcollide::linalg::UnitaryMatrix;
use qcollide::model::{partial_swap, NoncorrelatingOp, SwapAngle};

/// Bath unitary named on the command line: `identity`, `swap(φ)`, a label
/// `I`..`VIII`, or `haar(seed)`.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySpec {
    Identity,
    Swap(f64),
    Op(NoncorrelatingOp),
    Haar(u64),
}

impl UnitarySpec {
    pub fn unitary(&self) -> UnitaryMatrix {
        match self {
            UnitarySpec::Identity => UnitaryMatrix::identity(4),
            UnitarySpec::Swap(phi) => partial_swap(SwapAngle(*phi)),
            UnitarySpec::Op(op) => op.unitary(),
            UnitarySpec::Haar(seed) => haar_unitary(&mut sample_rng(*seed, 0)),
        }
    }
}

impl fmt::Display for UnitarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitarySpec::Identity => write!(f, "identity"),
            UnitarySpec::Swap(phi) => write!(f, "swap({phi})"),
            UnitarySpec::Op(op) => write!(f, "{op}"),
            UnitarySpec::Haar(seed) => write!(f, "haar({seed})"),
        }
    }
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

/// A real number, or a multiple of pi written `pi`, `pi/4`, `3pi/4` or
/// `3*pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(format!("angle must be finite, got `{s}`")) };
    }
    let bad = || format!("cannot read `{s}` as an angle");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim().trim_end_matches('*').trim();
    let coeff = match coeff {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let x = coeff * PI / den;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

impl FromStr for UnitarySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("identity") {
            return Ok(UnitarySpec::Identity);
        }
        if let Some(arg) = call(s, "swap") {
            return parse_angle(arg).map(UnitarySpec::Swap);
        }
        if let Some(arg) = call(s, "haar") {
            return arg.parse().map(UnitarySpec::Haar).map_err(|_| format!("haar seed must be an unsigned integer, got `{arg}`"));
        }
        s.parse::<NoncorrelatingOp>()
            .map(UnitarySpec::Op)
            .map_err(|_| format!("unknown unitary `{s}` (expected identity, swap(phi), I..VIII or haar(seed))"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!("identity".parse(), Ok(UnitarySpec::Identity));
        assert_eq!("swap(0.3)".parse(), Ok(UnitarySpec::Swap(0.3)));
        assert_eq!("swap(pi/2)".parse(), Ok(UnitarySpec::Swap(PI / 2.0)));
        assert_eq!("VII".parse(), Ok(UnitarySpec::Op(NoncorrelatingOp::VII)));
        assert_eq!("haar(42)".parse(), Ok(UnitarySpec::Haar(42)));
        for bad in ["swap()", "haar(-1)", "IX", "swap(pie)", ""] {
            assert!(bad.parse::<UnitarySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn full_swap_label_is_swap_of_half_pi() {
        let a = UnitarySpec::Op(NoncorrelatingOp::II).unitary();
        let b = "swap(pi/2)".parse::<UnitarySpec>().unwrap().unitary();
        assert!((a.matrix() - b.matrix()).max_abs() < 1e-15);
    }
}
