use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^n with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

/// A linear functional on R^n acting by the standard pairing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Functional(Vec<f64>);

fn validate(coords: &[f64]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::Empty);
    }
    match coords.iter().position(|c| !c.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

macro_rules! coordinate_type {
    ($t:ident) => {
        impl $t {
            pub fn new(coords: Vec<f64>) -> Result<Self> {
                validate(&coords)?;
                Ok(Self(coords))
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn unit(dim: usize, i: usize) -> Self {
                let mut c = vec![0.0; dim];
                c[i] = 1.0;
                Self(c)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.0
            }

            pub fn euclid(&self) -> f64 {
                euclid(&self.0)
            }

            pub fn scaled(&self, t: f64) -> Self {
                Self(self.0.iter().map(|c| c * t).collect())
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&c| c == 0.0)
            }
        }

        impl TryFrom<Vec<f64>> for $t {
            type Error = Error;
            fn try_from(v: Vec<f64>) -> Result<Self> {
                Self::new(v)
            }
        }

        impl From<$t> for Vec<f64> {
            fn from(v: $t) -> Vec<f64> {
                v.0
            }
        }

        impl AsRef<[f64]> for $t {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

coordinate_type!(Vector);
coordinate_type!(Functional);

impl Functional {
    pub fn apply(&self, v: &[f64]) -> f64 {
        dot(&self.0, v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclid(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert_eq!(Vector::new(vec![]), Err(Error::Empty));
    }

    #[test]
    fn serde_roundtrip_validates() {
        let v: Vector = serde_json::from_str("[3.0, 4.0]").unwrap();
        assert_eq!(v.euclid(), 5.0);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
        assert_eq!(serde_json::to_string(&v).unwrap(), "[3.0,4.0]");
    }

    #[test]
    fn pairing_is_dot_product() {
        let f = Functional::new(vec![1.0, -2.0]).unwrap();
        assert_eq!(f.apply(&[3.0, 1.0]), 1.0);
    }
}
