//! A desk-scale laboratory for fault attacks on SLH-DSA hash-based
//! signatures.
//!
//! The crate implements the full scheme (WOTS+, XMSS, hypertree, FORS,
//! keygen/sign/verify) in pure `no_std + alloc` Rust, a simulated
//! single-bit fault oracle that corrupts XMSS tree computations during
//! signing, the grafting-tree post-processing that turns colliding WOTS+
//! signatures into universal forgeries, and an exact combinatorial analysis
//! of the grafting success probability for concrete compromised instances.
//!
//! IO, file formats, campaign orchestration, and the CLI live in the
//! companion `graftlab` crate.

#![no_std]

extern crate alloc;

pub mod adrs;
pub mod complexity;
pub mod fault;
pub mod forge;
pub mod fors;
pub mod graft;
pub mod hashes;
pub mod identify;
pub mod observe;
pub mod params;
pub mod search;
pub mod seek;
pub mod slh;
pub mod wots;
pub mod xmss;

/// An argument outside its permitted range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeError {
    /// What was out of range.
    pub what: &'static str,
    /// The offending value.
    pub value: u64,
    /// Smallest permitted value.
    pub min: u64,
    /// Largest permitted value.
    pub max: u64,
}

impl core::fmt::Display for RangeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{} = {} outside [{}, {}]",
            self.what, self.value, self.min, self.max
        )
    }
}

impl core::error::Error for RangeError {}
