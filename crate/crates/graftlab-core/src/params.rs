//! SLH-DSA parameter sets: the twelve standard sets plus two toy sets small
//! enough for exhaustive oracles and end-to-end attack tests.
//!
//! Standard numeric values follow the FIPS 205 parameter table. The toy sets
//! keep the same structural relations (`h = d * h'`, derived WOTS+ lengths)
//! at sizes where brute-force enumeration stays feasible.

use core::fmt;

/// Hash family backing tweakable hashing for a parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashFamily {
    /// SHA-256, truncated to `n` bytes.
    Sha2,
    /// SHAKE256 with `n`-byte output.
    Shake,
}

/// All scheme constants for one SLH-DSA instantiation.
///
/// Immutable after construction; shared freely across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParameterSet {
    /// Canonical name, e.g. `SHA2-128f` or `toy-e2e`.
    pub name: &'static str,
    /// Hash output length in bytes.
    pub n: usize,
    /// Total hypertree height in bits (`h = d * h_prime`).
    pub h: u32,
    /// Number of hypertree layers.
    pub d: u32,
    /// XMSS tree height per layer.
    pub h_prime: u32,
    /// FORS tree height in bits.
    pub a: u32,
    /// Number of FORS trees.
    pub k_fors: u32,
    /// Winternitz log (bits per digit).
    pub lg_w: u32,
    /// Chain length `w = 2^lg_w`.
    pub w: u32,
    /// Number of message chains.
    pub ell1: usize,
    /// Number of checksum chains.
    pub ell2: usize,
    /// Total chains `ell1 + ell2`.
    pub ell: usize,
    /// Message-digest byte length fed to the index split.
    pub digest_len: usize,
    /// Hash family.
    pub hash_family: HashFamily,
}

/// Number of message chains for `n`-byte values at `lg_w` bits per digit:
/// `ceil(8n / lg_w)`.
pub const fn wots_len1(n: usize, lg_w: u32) -> usize {
    (8 * n).div_ceil(lg_w as usize)
}

/// Number of checksum chains: the base-`w` digit count of the maximum
/// checksum `ell1 * (w - 1)`, i.e. `floor(log_w(ell1 * (w - 1))) + 1`.
pub const fn wots_len2(n: usize, lg_w: u32) -> usize {
    let w = 1u64 << lg_w;
    let max_checksum = wots_len1(n, lg_w) as u64 * (w - 1);
    let mut digits = 1usize;
    let mut p = w;
    while p <= max_checksum {
        p *= w;
        digits += 1;
    }
    digits
}

/// Derived WOTS+ chain counts `(ell1, ell2)` for a hash length and digit width.
pub fn derive_wots_lengths(n: usize, lg_w: u32) -> (usize, usize) {
    debug_assert!(n >= 1 && (1..=8).contains(&lg_w));
    (wots_len1(n, lg_w), wots_len2(n, lg_w))
}

#[allow(clippy::too_many_arguments)]
const fn make(
    name: &'static str,
    n: usize,
    h_prime: u32,
    d: u32,
    a: u32,
    k_fors: u32,
    lg_w: u32,
    hash_family: HashFamily,
) -> ParameterSet {
    let h = d * h_prime;
    let ell1 = wots_len1(n, lg_w);
    let ell2 = wots_len2(n, lg_w);
    let digest_len = ((k_fors * a) as usize).div_ceil(8)
        + ((h - h_prime) as usize).div_ceil(8)
        + (h_prime as usize).div_ceil(8);
    ParameterSet {
        name,
        n,
        h,
        d,
        h_prime,
        a,
        k_fors,
        lg_w,
        w: 1 << lg_w,
        ell1,
        ell2,
        ell: ell1 + ell2,
        digest_len,
        hash_family,
    }
}

/// Every registered parameter set, standard sets first.
pub const REGISTRY: &[ParameterSet] = &[
    make("SHA2-128s", 16, 9, 7, 12, 14, 4, HashFamily::Sha2),
    make("SHA2-128f", 16, 3, 22, 6, 33, 4, HashFamily::Sha2),
    make("SHA2-192s", 24, 9, 7, 14, 17, 4, HashFamily::Sha2),
    make("SHA2-192f", 24, 3, 22, 8, 33, 4, HashFamily::Sha2),
    make("SHA2-256s", 32, 8, 8, 14, 22, 4, HashFamily::Sha2),
    make("SHA2-256f", 32, 4, 17, 9, 35, 4, HashFamily::Sha2),
    make("SHAKE-128s", 16, 9, 7, 12, 14, 4, HashFamily::Shake),
    make("SHAKE-128f", 16, 3, 22, 6, 33, 4, HashFamily::Shake),
    make("SHAKE-192s", 24, 9, 7, 14, 17, 4, HashFamily::Shake),
    make("SHAKE-192f", 24, 3, 22, 8, 33, 4, HashFamily::Shake),
    make("SHAKE-256s", 32, 8, 8, 14, 22, 4, HashFamily::Shake),
    make("SHAKE-256f", 32, 4, 17, 9, 35, 4, HashFamily::Shake),
    // Test-only sets. `toy-w4` mirrors the classic w=4 WOTS+ textbook
    // instance (ell1 = 4, ell2 = 2); `toy-e2e` is the smallest set with a
    // non-trivial hypertree for end-to-end forgery runs.
    make("toy-w4", 1, 2, 2, 2, 2, 2, HashFamily::Sha2),
    make("toy-e2e", 2, 2, 3, 2, 4, 2, HashFamily::Sha2),
];

/// Lookup failure for [`parameter_set`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownParameterSet {
    /// The name that failed to resolve.
    pub name: alloc::string::String,
}

impl fmt::Display for UnknownParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown parameter set `{}`", self.name)
    }
}

impl core::error::Error for UnknownParameterSet {}

/// Resolves a canonical parameter-set name.
pub fn parameter_set(name: &str) -> Result<&'static ParameterSet, UnknownParameterSet> {
    REGISTRY
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| UnknownParameterSet {
            name: alloc::string::String::from(name),
        })
}

impl ParameterSet {
    /// Leaves per XMSS tree.
    pub fn leaves_per_tree(&self) -> u64 {
        1 << self.h_prime
    }

    /// Index of the topmost hypertree layer.
    pub fn top_layer(&self) -> u32 {
        self.d - 1
    }

    /// Byte length of a serialized signature:
    /// `R + FORS + d * (WOTS+ sig + auth path)`.
    pub fn signature_len(&self) -> usize {
        self.n
            + self.k_fors as usize * (1 + self.a as usize) * self.n
            + self.d as usize * (self.ell + self.h_prime as usize) * self.n
    }

    /// Maximum checksum value `ell1 * (w - 1)`.
    pub fn max_checksum(&self) -> u64 {
        self.ell1 as u64 * (self.w as u64 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_invariants_hold() {
        for p in REGISTRY {
            assert_eq!(p.w, 1 << p.lg_w, "{}", p.name);
            assert_eq!(p.h, p.d * p.h_prime, "{}", p.name);
            assert_eq!(p.ell, p.ell1 + p.ell2, "{}", p.name);
            assert_eq!(p.ell1, (8 * p.n).div_ceil(p.lg_w as usize), "{}", p.name);
            // ell2 digits fit the max checksum, ell2 - 1 digits do not.
            let max = p.max_checksum();
            assert!((p.w as u64).pow(p.ell2 as u32) > max, "{}", p.name);
            assert!((p.w as u64).pow(p.ell2 as u32 - 1) <= max, "{}", p.name);
        }
    }

    #[test]
    fn standard_sets_have_ell2_three() {
        for p in REGISTRY.iter().filter(|p| p.lg_w == 4) {
            assert_eq!(p.ell2, 3, "{}", p.name);
        }
    }

    #[test]
    fn derive_lengths_examples() {
        assert_eq!(derive_wots_lengths(16, 4), (32, 3));
        assert_eq!(derive_wots_lengths(2, 2), (8, 3));
        assert_eq!(derive_wots_lengths(1, 8).0, 1);
    }

    #[test]
    fn derive_ell2_is_minimal_digit_count() {
        // Exhaustive check that ell2 base-w digits cover the max checksum
        // and one digit fewer does not.
        for n in 1..=32usize {
            for lg_w in 1..=8u32 {
                let (ell1, ell2) = derive_wots_lengths(n, lg_w);
                let w = 1u64 << lg_w;
                let max = ell1 as u64 * (w - 1);
                assert!(w.pow(ell2 as u32) > max, "n={n} lg_w={lg_w}");
                if ell2 > 1 {
                    assert!(w.pow(ell2 as u32 - 1) <= max, "n={n} lg_w={lg_w}");
                }
            }
        }
    }

    #[test]
    fn sha2_192f_shape() {
        let p = parameter_set("SHA2-192f").unwrap();
        assert_eq!(p.h_prime, 3);
        assert_eq!(p.top_layer(), 21);
        assert_eq!(p.leaves_per_tree(), 8);
    }

    #[test]
    fn toy_w4_matches_textbook_instance() {
        let p = parameter_set("toy-w4").unwrap();
        assert_eq!(p.w, 4);
        assert_eq!(p.ell1, 4);
        assert_eq!(p.ell2, 2);
    }

    #[test]
    fn digest_len_matches_standard_layout() {
        for (name, len) in [
            ("SHA2-128s", 30),
            ("SHA2-128f", 34),
            ("SHA2-192s", 39),
            ("SHA2-192f", 42),
            ("SHA2-256s", 47),
            ("SHA2-256f", 49),
        ] {
            assert_eq!(parameter_set(name).unwrap().digest_len, len, "{name}");
        }
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(parameter_set("SHA2-512f").is_err());
        assert!(parameter_set("").is_err());
    }

    #[test]
    fn lookup_is_pure() {
        let a = parameter_set("SHAKE-256s").unwrap();
        let b = parameter_set("SHAKE-256s").unwrap();
        assert_eq!(a, b);
    }
}
