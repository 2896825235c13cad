//! Exact rates, rate tables and the stochastic semantics of systems.

mod measure;
mod shape;
mod theta;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::syntax::{ActionKind, Name};

pub use measure::{
    dirac_prefix, mem_par, pointwise, sos_mem, sos_sys, sys_comp, sys_loc, Measure, MemBehaviour,
    PointwiseEntry, SysBehaviour,
};
pub use shape::{instantiation_template, sos_query};
pub use theta::{meta_theta, theta_sys, Label};

/// A nonnegative exact rational rate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rate(BigRational);

impl Rate {
    pub fn zero() -> Rate {
        Rate(BigRational::zero())
    }

    pub fn integer(n: i64) -> Rate {
        Rate(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Rate {
        Rate(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0 > BigRational::zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rate {
    type Err = String;

    /// Accepts `p` or `p/q` with decimal digits.
    fn from_str(s: &str) -> Result<Rate, String> {
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        if !digits(p) || !digits(q) {
            return Err(s.to_string());
        }
        let p: BigInt = p.parse().map_err(|_| s.to_string())?;
        let q: BigInt = q.parse().map_err(|_| s.to_string())?;
        if q.is_zero() {
            return Err(s.to_string());
        }
        Ok(Rate(BigRational::new(p, q)))
    }
}

impl Add for Rate {
    type Output = Rate;
    fn add(self, rhs: Rate) -> Rate {
        Rate(self.0 + rhs.0)
    }
}

impl Add<&Rate> for &Rate {
    type Output = Rate;
    fn add(self, rhs: &Rate) -> Rate {
        Rate(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Rate> for Rate {
    fn add_assign(&mut self, rhs: &Rate) {
        self.0 += &rhs.0;
    }
}

impl Mul<&Rate> for &Rate {
    type Output = Rate;
    fn mul(self, rhs: &Rate) -> Rate {
        Rate(&self.0 * &rhs.0)
    }
}

impl Div<&Rate> for &Rate {
    type Output = Rate;
    fn div(self, rhs: &Rate) -> Rate {
        Rate(&self.0 / &rhs.0)
    }
}

impl std::iter::Sum for Rate {
    fn sum<I: Iterator<Item = Rate>>(iter: I) -> Rate {
        iter.fold(Rate::zero(), |a, b| a + b)
    }
}

/// Rate families: complementary actions share one entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RateKind {
    Phago,
    Exo,
    Pino,
}

impl RateKind {
    pub fn of(kind: ActionKind) -> RateKind {
        match kind {
            ActionKind::Phago | ActionKind::CoPhago => RateKind::Phago,
            ActionKind::Exo | ActionKind::CoExo => RateKind::Exo,
            ActionKind::Pino => RateKind::Pino,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            RateKind::Phago => "phago",
            RateKind::Exo => "exo",
            RateKind::Pino => "pino",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RateError {
    #[error("line {line}: rate must be positive")]
    NonPositiveRate { line: usize },
    #[error("line {line}: duplicate entry for `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: malformed rational `{text}`")]
    MalformedRational { line: usize, text: String },
    #[error("line {line}: expected `phago|exo|pino <name> = <rate>` or `default = <rate>`")]
    Syntax { line: usize },
    #[error("no rate for `{action}` and no default")]
    MissingRate { action: String },
}

/// Assignment of rates to actions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RateTable {
    entries: BTreeMap<(RateKind, Name), Rate>,
    default: Option<Rate>,
}

impl RateTable {
    pub fn new() -> RateTable {
        RateTable::default()
    }

    /// A table that assigns `rate` to every action.
    pub fn uniform(rate: Rate) -> RateTable {
        RateTable {
            entries: BTreeMap::new(),
            default: Some(rate),
        }
    }

    pub fn set(&mut self, kind: RateKind, name: Name, rate: Rate) -> &mut Self {
        assert!(rate.is_positive(), "rates must be positive");
        self.entries.insert((kind, name), rate);
        self
    }

    pub fn set_default(&mut self, rate: Rate) -> &mut Self {
        assert!(rate.is_positive(), "rates must be positive");
        self.default = Some(rate);
        self
    }

    pub fn lookup(&self, kind: ActionKind, name: &Name) -> Result<Rate, RateError> {
        let key = (RateKind::of(kind), name.clone());
        self.entries
            .get(&key)
            .or(self.default.as_ref())
            .cloned()
            .ok_or_else(|| RateError::MissingRate {
                action: format!("{} {}", kind.keyword(), name),
            })
    }

    pub fn parse(text: &str) -> Result<RateTable, RateError> {
        let mut table = RateTable::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((lhs, rhs)) = content.split_once('=') else {
                return Err(RateError::Syntax { line });
            };
            let rhs = rhs.trim();
            let rate: Rate = rhs.parse().map_err(|_| RateError::MalformedRational {
                line,
                text: rhs.to_string(),
            })?;
            if !rate.is_positive() {
                return Err(RateError::NonPositiveRate { line });
            }
            let words: Vec<_> = lhs.split_whitespace().collect();
            match words.as_slice() {
                ["default"] => {
                    if table.default.is_some() {
                        return Err(RateError::DuplicateKey {
                            line,
                            key: "default".into(),
                        });
                    }
                    table.default = Some(rate);
                }
                [kind, name] => {
                    let kind = match *kind {
                        "phago" => RateKind::Phago,
                        "exo" => RateKind::Exo,
                        "pino" => RateKind::Pino,
                        _ => return Err(RateError::Syntax { line }),
                    };
                    let name = Name::new(name).map_err(|_| RateError::Syntax { line })?;
                    let key = format!("{} {}", kind.keyword(), name);
                    if table.entries.insert((kind, name), rate).is_some() {
                        return Err(RateError::DuplicateKey { line, key });
                    }
                }
                _ => return Err(RateError::Syntax { line }),
            }
        }
        Ok(table)
    }
}
