//! Deterministic seed derivation for independent work units.

/// Mixes `master` and `stream` into a well-spread 64-bit seed (SplitMix64 finalizer).
pub fn derive(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a seed for a nested work unit, e.g. `(master, leaf, entry)`.
pub fn derive2(master: u64, outer: u64, inner: u64) -> u64 {
    derive(derive(master, outer), inner)
}
