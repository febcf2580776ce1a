//! Small helpers for bit vectors stored one bit per `u8` (0 or 1).

/// XOR of two equal-length bit vectors.
pub fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Packs bits MSB-first into bytes; the last byte is zero padded.
pub fn pack(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Inverse of [`pack`] for a known bit count.
pub fn unpack(bytes: &[u8], len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

/// Interprets the bits MSB-first as an unsigned integer.
pub fn to_u64(bits: &[u8]) -> u64 {
    bits.iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

/// `width` bits of `value`, MSB first.
pub fn from_u64(value: u64, width: usize) -> Vec<u8> {
    (0..width)
        .map(|k| ((value >> (width - 1 - k)) & 1) as u8)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pack_roundtrip(bits in prop::collection::vec(0u8..2, 0..100)) {
            prop_assert_eq!(unpack(&pack(&bits), bits.len()), bits);
        }
    }

    #[test]
    fn integer_conversion_is_msb_first() {
        assert_eq!(from_u64(2, 2), vec![1, 0]);
        assert_eq!(to_u64(&[1, 0, 1]), 5);
    }
}
