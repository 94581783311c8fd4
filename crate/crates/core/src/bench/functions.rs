//! The seven benchmark functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point;

/// One of `f₀ … f₆`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct TestFunctionId(u8);

impl TestFunctionId {
    pub const COUNT: u8 = 7;

    pub fn new(id: u8) -> Result<Self> {
        if id < Self::COUNT {
            Ok(Self(id))
        } else {
            Err(Error::Parameter(format!("test function id must be 0..=6, got {id}")))
        }
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..Self::COUNT).map(Self)
    }

    /// Human-readable formula.
    pub fn formula(self) -> &'static str {
        match self.0 {
            0 => "1",
            1 => "sin(xy)",
            2 => "exp(-xy)",
            3 => "exp(-(x^2+y^2))",
            4 => "1/(x^2+y^2+1)",
            5 => "cos(x)sin(y)",
            _ => "ln(x^2+y^2+1)",
        }
    }

    pub fn eval(self, pt: Point) -> f64 {
        test_function(self, pt)
    }
}

impl TryFrom<u8> for TestFunctionId {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        Self::new(id)
    }
}

impl From<TestFunctionId> for u8 {
    fn from(id: TestFunctionId) -> u8 {
        id.0
    }
}

impl fmt::Display for TestFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

pub fn test_function(id: TestFunctionId, pt: Point) -> f64 {
    let (x, y) = (pt.x, pt.y);
    let r2 = x * x + y * y;
    match id.0 {
        0 => 1.0,
        1 => (x * y).sin(),
        2 => (-x * y).exp(),
        3 => (-r2).exp(),
        4 => 1.0 / (r2 + 1.0),
        5 => x.cos() * y.sin(),
        _ => r2.ln_1p(),
    }
}
