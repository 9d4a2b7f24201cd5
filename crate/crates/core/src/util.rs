//! Small shared helpers.

/// 64-bit FNV-1a over a byte slice.
///
/// Used for parameter checksums, token bucketing, and stable resource seeds
/// where a dependency-free non-cryptographic hash is enough.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

/// Order-sensitive checksum of a float slice over exact bit patterns.
pub fn checksum_f32(values: &[f32]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_le_bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x100_0000_01b3);
        }
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_known_values() {
        // Reference vectors for 64-bit FNV-1a.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn checksum_is_bit_exact() {
        let a = [1.0f32, -0.0, 3.5];
        let b = [1.0f32, 0.0, 3.5];
        assert_ne!(checksum_f32(&a), checksum_f32(&b));
        assert_eq!(checksum_f32(&a), checksum_f32(&[1.0, -0.0, 3.5]));
    }
}
