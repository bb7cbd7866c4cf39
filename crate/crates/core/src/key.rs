//! Exact coordinate keys for point lookup.

use alloc::vec::Vec;

/// Bit pattern of a coordinate vector, with `-0.0` folded into `0.0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct PointKey(Vec<u64>);

impl PointKey {
    pub(crate) fn new(point: &[f64]) -> Self {
        PointKey(
            point
                .iter()
                .map(|&c| if c == 0.0 { 0u64 } else { c.to_bits() })
                .collect(),
        )
    }
}
