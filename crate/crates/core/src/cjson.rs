//! Serializers writing complex numbers as `{"re": .., "im": ..}` objects.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

#[derive(Serialize)]
struct Pair {
    re: f64,
    im: f64,
}

impl From<&Complex64> for Pair {
    fn from(z: &Complex64) -> Self {
        Pair { re: z.re, im: z.im }
    }
}

pub fn one<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Pair::from(z).serialize(s)
}

pub fn many<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(Pair::from))
}
