use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{NumCast, PrimInt, Unsigned};

use crate::error::{Error, Result};

/// Unsigned integer type usable as a clause weight.
///
/// Implemented for every primitive unsigned integer. Arithmetic that could
/// overflow goes through the checked helpers, which surface
/// [`Error::WeightOverflow`] instead of wrapping.
pub trait WeightValue: PrimInt + Unsigned + FromStr + Display + Debug + Hash + Default + Send + Sync + 'static {
    fn add_checked(self, other: Self) -> Result<Self> {
        self.checked_add(&other).ok_or(Error::WeightOverflow)
    }

    fn sub_checked(self, other: Self) -> Result<Self> {
        self.checked_sub(&other).ok_or(Error::WeightOverflow)
    }

    fn to_i128_checked(self) -> Result<i128> {
        self.to_i128().ok_or(Error::WeightOverflow)
    }

    fn from_i128_checked(v: i128) -> Result<Self> {
        <Self as NumCast>::from(v).ok_or(Error::WeightOverflow)
    }

    fn sum_checked<I: IntoIterator<Item = Self>>(items: I) -> Result<Self> {
        items.into_iter().try_fold(Self::zero(), |acc, w| acc.add_checked(w))
    }
}

impl<T> WeightValue for T where
    T: PrimInt + Unsigned + FromStr + Display + Debug + Hash + Default + Send + Sync + 'static
{
}

/// A clause weight: finite, or the hard-clause marker `Top`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weight<W> {
    Finite(W),
    Top,
}

impl<W: WeightValue> Weight<W> {
    pub fn is_top(&self) -> bool {
        matches!(self, Weight::Top)
    }

    pub fn finite(&self) -> Option<W> {
        match *self {
            Weight::Finite(w) => Some(w),
            Weight::Top => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Weight::Finite(w) if w.is_zero())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl<W: WeightValue> PartialOrd for Weight<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: WeightValue> Ord for Weight<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::Top, Weight::Top) => Ordering::Equal,
            (Weight::Top, _) => Ordering::Greater,
            (_, Weight::Top) => Ordering::Less,
            (Weight::Finite(a), Weight::Finite(b)) => a.cmp(b),
        }
    }
}

impl<W: WeightValue> Display for Weight<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Top => f.write_str("top"),
        }
    }
}

/// Cost of an assignment: the falsified soft weight, or `Infeasible` when a
/// hard clause is falsified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cost<W> {
    Feasible(W),
    Infeasible,
}

impl<W: WeightValue> Cost<W> {
    pub fn value(&self) -> Option<W> {
        match *self {
            Cost::Feasible(w) => Some(w),
            Cost::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Cost::Feasible(_))
    }
}

impl<W: WeightValue> PartialOrd for Cost<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Infeasible sorts after every finite cost.
impl<W: WeightValue> Ord for Cost<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Infeasible, Cost::Infeasible) => Ordering::Equal,
            (Cost::Infeasible, _) => Ordering::Greater,
            (_, Cost::Infeasible) => Ordering::Less,
            (Cost::Feasible(a), Cost::Feasible(b)) => a.cmp(b),
        }
    }
}

impl<W: WeightValue> Display for Cost<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Feasible(w) => write!(f, "{w}"),
            Cost::Infeasible => f.write_str("infeasible"),
        }
    }
}
