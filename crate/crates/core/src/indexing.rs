//! Explicit index conventions, so callers never hardcode whether the first element is 0 or 1.

use std::fmt;

use crate::error::BoundsError;
use crate::layout::{ArrayNode, Element};

/// Index base: 0 (C, Python) or 1 (Julia, Fortran).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Convention {
    base: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("index base must be 0 or 1, got {0}")]
pub struct InvalidBase(pub i64);

impl Convention {
    pub const ZERO_BASED: Convention = Convention { base: 0 };
    pub const ONE_BASED: Convention = Convention { base: 1 };

    pub fn new(base: i64) -> Result<Self, InvalidBase> {
        match base {
            0 => Ok(Self::ZERO_BASED),
            1 => Ok(Self::ONE_BASED),
            other => Err(InvalidBase(other)),
        }
    }

    pub fn base(self) -> u8 {
        self.base
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-based indexing", self.base)
    }
}

pub fn first_index(_node: &ArrayNode, c: Convention) -> i64 {
    c.base as i64
}

/// Last valid index; `first_index - 1` for an empty node.
pub fn last_index(node: &ArrayNode, c: Convention) -> i64 {
    first_index(node, c) + node.len() as i64 - 1
}

/// Element `i` under convention `c`, equal to zero-based access at `i - base`.
/// Negative indices never wrap.
pub fn get(node: &ArrayNode, i: i64, c: Convention) -> Result<Element<'_>, BoundsError> {
    let err = || BoundsError {
        index: i,
        length: node.len(),
        convention: c,
    };
    let zero_based = i.checked_sub(c.base as i64).ok_or_else(err)?;
    if zero_based < 0 || zero_based as u64 >= node.len() as u64 {
        return Err(err());
    }
    node.get(zero_based as usize).map_err(|_| err())
}

/// Every valid index under `c`, in order.
pub fn each_index(node: &ArrayNode, c: Convention) -> std::ops::RangeInclusive<i64> {
    first_index(node, c)..=last_index(node, c)
}
