//! Exact grafting complexity for concrete compromised instances.
//!
//! A candidate grafted root is signable when its message digits dominate
//! the exposed message minima and its checksum digits dominate the exposed
//! checksum minima. The signable fraction is computed exactly by
//! enumerating the reachable checksum tuples and counting, per tuple, the
//! bounded compositions of the remaining chain capacity with a sliding-
//! window prefix-sum dynamic program. Probabilities stay exact rationals;
//! floats appear only at the reporting boundary.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::identify::CompromisedInstance;
use crate::observe::InstanceAddress;
use crate::params::ParameterSet;
use crate::seek::seek_exponent;
use crate::wots::{digits_value, wots_checksum};

/// Exact probability type.
pub type Probability = Ratio<BigInt>;

/// Per-chain capacities derived from exposed minima: how far each message
/// chain can still advance, and the minimal exposed checksum digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCapacities {
    /// `k_i = w - 1 - exposed_min_i` over the message chains.
    pub k: Vec<u32>,
    /// Minimal exposed checksum digit positions.
    pub checksum_min: Vec<u8>,
}

impl ChainCapacities {
    /// Total capacity `sum(k_i)`; also the checksum value of the minimal
    /// exposed message digits.
    pub fn total(&self) -> u64 {
        self.k.iter().map(|&k| k as u64).sum()
    }
}

/// A reachable checksum tuple with its integer value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChecksumTuple {
    pub digits: Vec<u8>,
    pub value: u64,
}

/// Analyzer failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyzerError {
    /// Probability undefined: nothing is signable.
    Undefined,
    /// Brute-force enumeration guard tripped (`w^ell1 > 2^24`).
    TooLarge,
    /// No compromised instances to rank.
    EmptyReport,
}

impl core::fmt::Display for AnalyzerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalyzerError::Undefined => write!(f, "signable probability is zero"),
            AnalyzerError::TooLarge => write!(f, "message space too large for brute force"),
            AnalyzerError::EmptyReport => write!(f, "no compromised instances"),
        }
    }
}

impl core::error::Error for AnalyzerError {}

/// Capacities of a compromised instance's exposed minima.
pub fn capacities(params: &ParameterSet, exposed_min: &[u8]) -> ChainCapacities {
    debug_assert_eq!(exposed_min.len(), params.ell);
    ChainCapacities {
        k: exposed_min[..params.ell1]
            .iter()
            .map(|&m| params.w - 1 - m as u32)
            .collect(),
        checksum_min: exposed_min[params.ell1..].to_vec(),
    }
}

/// Remaining message-chain advancement for a checksum tuple value:
/// `sum(k_i) - value`. Negative values mark unreachable tuples.
pub fn kappa(caps: &ChainCapacities, tuple_value: u64) -> i64 {
    caps.total() as i64 - tuple_value as i64
}

/// All checksum tuples reachable by continuing the exposed checksum chains:
/// digitwise at least `checksum_min`, value at most the maximum checksum
/// `ell1 * (w - 1)`, and with non-negative remaining capacity.
pub fn enumerate_checksums(params: &ParameterSet, caps: &ChainCapacities) -> Vec<ChecksumTuple> {
    debug_assert_eq!(caps.checksum_min.len(), params.ell2);
    let mut out = Vec::new();
    let mut digits: Vec<u8> = caps.checksum_min.clone();
    loop {
        let value = digits_value(&digits, params.w);
        if value <= params.max_checksum() && kappa(caps, value) >= 0 {
            out.push(ChecksumTuple {
                digits: digits.clone(),
                value,
            });
        }
        // Odometer over [checksum_min_i, w) per position.
        let mut pos = params.ell2;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (digits[pos] as u32) + 1 < params.w {
                digits[pos] += 1;
                digits[pos + 1..].copy_from_slice(&caps.checksum_min[pos + 1..]);
                break;
            }
        }
    }
}

/// Number of vectors `x` with `sum(x_i) = t` and `0 <= x_i <= bounds_i`,
/// for every `t <= tau_max`, via the sliding-window prefix-sum dynamic
/// program (subtract `dp[t - (k_i + 1)]` once `t` passes `k_i`).
pub fn weak_comp_table(tau_max: u64, bounds: &[u32]) -> Vec<BigUint> {
    let t_max = tau_max as usize;
    let mut dp = alloc::vec![BigUint::zero(); t_max + 1];
    dp[0] = BigUint::one(); // one way to compose 0
    for &k in bounds {
        let mut next = Vec::with_capacity(t_max + 1);
        let mut prefix = BigUint::zero();
        for (t, dt) in dp.iter().enumerate() {
            prefix += dt;
            if t > k as usize {
                prefix -= &dp[t - (k as usize + 1)];
            }
            next.push(prefix.clone());
        }
        dp = next;
    }
    dp
}

/// Number of bounded weak compositions of `tau_sum`.
pub fn weak_comp(tau_sum: u64, bounds: &[u32]) -> BigUint {
    weak_comp_table(tau_sum, bounds)
        .pop()
        .expect("table has tau_sum + 1 entries")
}

/// Exact probability that a uniformly random candidate root is signable
/// with the exposed chain values.
pub fn p_signable(params: &ParameterSet, exposed_min: &[u8]) -> Probability {
    let caps = capacities(params, exposed_min);
    let tuples = enumerate_checksums(params, &caps);
    let table = weak_comp_table(caps.total(), &caps.k);
    let mut signable = BigUint::zero();
    for tuple in &tuples {
        let kap = kappa(&caps, tuple.value);
        debug_assert!(kap >= 0, "enumeration filters negative capacity");
        signable += &table[kap as usize];
    }
    let denom = BigUint::from(params.w).pow(params.ell1 as u32);
    Ratio::new(BigInt::from(signable), BigInt::from(denom))
}

/// Exhaustive oracle for [`p_signable`]: enumerates every message digit
/// vector and filters for digitwise dominance of message and checksum.
/// Guarded to `w^ell1 <= 2^24`.
pub fn brute_force_p_signable(
    params: &ParameterSet,
    exposed_min: &[u8],
) -> Result<Probability, AnalyzerError> {
    let space_bits = params.lg_w as u64 * params.ell1 as u64;
    if space_bits > 24 {
        return Err(AnalyzerError::TooLarge);
    }
    let msg_min = &exposed_min[..params.ell1];
    let checksum_min = &exposed_min[params.ell1..];
    let mut signable = 0u64;
    let mut digits = alloc::vec![0u8; params.ell1];
    let total = 1u64 << space_bits;
    for _ in 0..total {
        let dominates_msg = digits.iter().zip(msg_min).all(|(d, m)| d >= m);
        if dominates_msg {
            let checksum = wots_checksum(params, &digits);
            if checksum.iter().zip(checksum_min).all(|(d, m)| d >= m) {
                signable += 1;
            }
        }
        // Odometer in base w.
        for pos in (0..params.ell1).rev() {
            if (digits[pos] as u32) + 1 < params.w {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(Ratio::new(BigInt::from(signable), BigInt::from(total)))
}

/// Hash calls to build one grafted candidate, counting every tweakable-hash
/// and PRF invocation as one hash: per leaf, `ell * (w - 1)` chain steps,
/// `ell` secret derivations and one compression, plus the internal tree
/// nodes. The constant is a model choice; [`CostModel`] makes it
/// overridable.
pub fn hashes_per_xmss_tree(params: &ParameterSet) -> u128 {
    let leaves = 1u128 << params.h_prime;
    let per_leaf = (params.ell as u128) * (params.w as u128 - 1) + params.ell as u128 + 1;
    leaves * per_leaf + (leaves - 1)
}

/// Hash-counting convention for cost reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub hashes_per_tree: u128,
}

impl CostModel {
    pub fn for_params(params: &ParameterSet) -> Self {
        CostModel {
            hashes_per_tree: hashes_per_xmss_tree(params),
        }
    }
}

/// Expected grafting attempts and hash count for a signable probability.
pub fn grafting_cost(
    p: &Probability,
    model: &CostModel,
) -> Result<(Probability, Probability), AnalyzerError> {
    if p.is_zero() {
        return Err(AnalyzerError::Undefined);
    }
    let attempts = p.recip();
    let hashes = &attempts * Ratio::from_integer(BigInt::from(model.hashes_per_tree));
    Ok((attempts, hashes))
}

/// Expected hash count for seeking an instance at `layer`: `2^(h - h' * layer)`.
pub fn seeking_cost(params: &ParameterSet, layer: u32) -> BigUint {
    BigUint::one() << seek_exponent(params, layer)
}

/// Base-2 logarithm of a positive rational, accurate enough for reporting.
pub fn ratio_log2(r: &Probability) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive ratio");
    big_log2(r.numer().magnitude()) - big_log2(r.denom().magnitude())
}

fn big_log2(x: &BigUint) -> f64 {
    assert!(!x.is_zero());
    let bits = x.bits();
    // Top 53 bits as mantissa.
    let mantissa = if bits <= 53 {
        x.to_f64().expect("fits f64")
    } else {
        ((x >> (bits - 53)).to_f64()).expect("53 bits fit f64")
    };
    let shift = if bits <= 53 { 0.0 } else { (bits - 53) as f64 };
    shift + log2_f64(mantissa)
}

/// Digit-by-digit binary logarithm; `core` has no transcendental float math.
fn log2_f64(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut int_part = 0f64;
    let mut m = x;
    while m >= 2.0 {
        m /= 2.0;
        int_part += 1.0;
    }
    while m < 1.0 {
        m *= 2.0;
        int_part -= 1.0;
    }
    let mut frac = 0.0f64;
    let mut step = 0.5f64;
    for _ in 0..48 {
        m *= m;
        if m >= 2.0 {
            m /= 2.0;
            frac += step;
        }
        step *= 0.5;
    }
    int_part + frac
}

/// One ranked instance in a complexity report.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub address: InstanceAddress,
    pub observations: usize,
    pub p_signable: Probability,
    pub grafting_attempts: Probability,
    pub grafting_hashes_log2: f64,
    pub seeking_log2: u32,
    pub total_log2: f64,
    pub identify_hash_ops: u64,
}

/// Instances ranked by total one-shot forgery cost, cheapest first.
#[derive(Clone, Debug)]
pub struct ComplexityReport {
    pub rows: Vec<ReportRow>,
}

/// Ranks compromised instances by `grafting hashes + seeking hashes`.
pub fn rank_instances(
    params: &ParameterSet,
    model: &CostModel,
    instances: &[CompromisedInstance],
) -> Result<ComplexityReport, AnalyzerError> {
    if instances.is_empty() {
        return Err(AnalyzerError::EmptyReport);
    }
    let mut keyed: Vec<(Probability, ReportRow)> = instances
        .iter()
        .map(|inst| {
            let p = p_signable(params, &inst.exposed_min);
            let (attempts, hashes) = grafting_cost(&p, model)?;
            let seeking = seeking_cost(params, inst.address.layer);
            let total = &hashes + Ratio::from_integer(BigInt::from(seeking));
            let row = ReportRow {
                address: inst.address,
                observations: inst.observation_count,
                p_signable: p,
                grafting_attempts: attempts,
                grafting_hashes_log2: ratio_log2(&hashes),
                seeking_log2: seek_exponent(params, inst.address.layer),
                total_log2: ratio_log2(&total),
                identify_hash_ops: inst.hash_ops,
            };
            Ok((total, row))
        })
        .collect::<Result<_, AnalyzerError>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ComplexityReport {
        rows: keyed.into_iter().map(|(_, row)| row).collect(),
    })
}
