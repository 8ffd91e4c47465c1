//! Serialization helpers shared by every report: exact rationals as strings,
//! complex numbers as `[re, im]` pairs.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serializer;

pub fn rational_string(r: &Rational64) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ser_rational<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn ser_rationals<S: Serializer>(rs: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(rational_string))
}

pub fn ser_opt_rational<S: Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&rational_string(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq([z.re, z.im])
}
