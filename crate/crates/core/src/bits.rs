//! Conversions between basis indices, bit vectors and bitstrings.
//!
//! Internally bit `i` of a basis index is variable (qubit) `i`. Text renderings
//! default to device order, where the rightmost character is qubit 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitOrder {
    /// Rightmost character is qubit 0.
    #[default]
    Device,
    /// Leftmost character is qubit 0.
    Variable,
}

impl fmt::Display for BitOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitOrder::Device => f.write_str("device"),
            BitOrder::Variable => f.write_str("variable"),
        }
    }
}

impl FromStr for BitOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "device" => Ok(BitOrder::Device),
            "variable" => Ok(BitOrder::Variable),
            other => Err(format!("unknown bit order '{other}' (expected device or variable)")),
        }
    }
}

pub fn index_to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((b as usize & 1) << i))
}

pub fn bits_to_string(bits: &[u8], order: BitOrder) -> String {
    let chars = bits.iter().map(|&b| if b == 0 { '0' } else { '1' });
    match order {
        BitOrder::Variable => chars.collect(),
        BitOrder::Device => chars.rev().collect(),
    }
}

pub fn index_to_string(index: usize, n: usize, order: BitOrder) -> String {
    bits_to_string(&index_to_bits(index, n), order)
}

pub fn string_to_bits(s: &str, order: BitOrder) -> Result<Vec<u8>> {
    let mut bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(Error::InvalidBitstring(s.to_string())),
        })
        .collect::<Result<Vec<u8>>>()?;
    if order == BitOrder::Device {
        bits.reverse();
    }
    Ok(bits)
}

pub fn string_to_index(s: &str, order: BitOrder) -> Result<usize> {
    if s.len() >= usize::BITS as usize {
        return Err(Error::InvalidBitstring(s.to_string()));
    }
    string_to_bits(s, order).map(|b| bits_to_index(&b))
}

/// Re-renders a bitstring from one order into the other.
pub fn convert_order(s: &str, from: BitOrder, to: BitOrder) -> String {
    if from == to {
        s.to_string()
    } else {
        s.chars().rev().collect()
    }
}

pub(crate) fn check_binary(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(index) => Err(Error::NotBinary { index }),
        None => Ok(()),
    }
}
