//! The 32-byte hash address (`ADRS`) that domain-separates every tweakable
//! hash call.
//!
//! Layout (big-endian words):
//! bytes 0..4 layer, 4..16 tree address (top 4 bytes always zero),
//! 16..20 type tag, 20..32 three type-specific words.

/// Address type tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum AdrsType {
    WotsHash = 0,
    WotsPk = 1,
    Tree = 2,
    ForsTree = 3,
    ForsRoots = 4,
    WotsPrf = 5,
    ForsPrf = 6,
}

/// A hash address. Serializes to a fixed 32-byte layout.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Adrs {
    bytes: [u8; 32],
}

impl Default for Adrs {
    fn default() -> Self {
        Self::new()
    }
}

impl Adrs {
    /// An all-zero address (layer 0, tree 0, type WOTS_HASH).
    pub fn new() -> Self {
        Adrs { bytes: [0u8; 32] }
    }

    /// The serialized 32-byte form.
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn set_layer(&mut self, layer: u32) {
        self.bytes[0..4].copy_from_slice(&layer.to_be_bytes());
    }

    pub fn layer(&self) -> u32 {
        u32::from_be_bytes(self.bytes[0..4].try_into().unwrap())
    }

    pub fn set_tree_address(&mut self, tree: u64) {
        self.bytes[4..8].fill(0);
        self.bytes[8..16].copy_from_slice(&tree.to_be_bytes());
    }

    pub fn tree_address(&self) -> u64 {
        u64::from_be_bytes(self.bytes[8..16].try_into().unwrap())
    }

    /// Sets the type tag and zeroes all type-specific words after it.
    pub fn set_type_and_clear(&mut self, t: AdrsType) {
        self.bytes[16..20].copy_from_slice(&(t as u32).to_be_bytes());
        self.bytes[20..32].fill(0);
    }

    pub fn set_keypair(&mut self, keypair: u32) {
        self.bytes[20..24].copy_from_slice(&keypair.to_be_bytes());
    }

    pub fn keypair(&self) -> u32 {
        u32::from_be_bytes(self.bytes[20..24].try_into().unwrap())
    }

    /// Chain index for WOTS types.
    pub fn set_chain(&mut self, chain: u32) {
        self.bytes[24..28].copy_from_slice(&chain.to_be_bytes());
    }

    /// Tree height for TREE / FORS_TREE types (same word as the chain index).
    pub fn set_tree_height(&mut self, height: u32) {
        self.set_chain(height);
    }

    /// Hash position within a chain.
    pub fn set_hash(&mut self, hash: u32) {
        self.bytes[28..32].copy_from_slice(&hash.to_be_bytes());
    }

    /// Node index for TREE / FORS_TREE types (same word as the hash position).
    pub fn set_tree_index(&mut self, index: u32) {
        self.set_hash(index);
    }
}

impl core::fmt::Debug for Adrs {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Adrs(")?;
        for b in &self.bytes {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialized_layout_is_32_bytes_big_endian() {
        let mut a = Adrs::new();
        a.set_layer(0x01020304);
        a.set_tree_address(0x05060708090a0b0c);
        a.set_type_and_clear(AdrsType::Tree);
        a.set_tree_height(2);
        a.set_tree_index(7);
        let b = a.as_bytes();
        assert_eq!(&b[0..4], &[1, 2, 3, 4]);
        assert_eq!(&b[4..8], &[0, 0, 0, 0]);
        assert_eq!(&b[8..16], &[5, 6, 7, 8, 9, 10, 11, 12]);
        assert_eq!(&b[16..20], &[0, 0, 0, 2]);
        assert_eq!(&b[28..32], &[0, 0, 0, 7]);
    }

    #[test]
    fn set_type_and_clear_zeroes_trailing_words() {
        let mut a = Adrs::new();
        a.set_keypair(9);
        a.set_chain(5);
        a.set_hash(3);
        a.set_type_and_clear(AdrsType::WotsPrf);
        assert_eq!(&a.as_bytes()[20..32], &[0u8; 12]);
        assert_eq!(a.keypair(), 0);
    }
}
