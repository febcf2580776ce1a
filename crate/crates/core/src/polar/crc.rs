use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// CRC defined by its width and generator.
///
/// `generator` holds the polynomial coefficients below `x^width` (the leading
/// term is implicit), MSB-first, zero initial register and no final XOR. The
/// map message -> CRC is therefore linear over GF(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    pub width: usize,
    pub generator: u64,
}

impl CrcSpec {
    /// CRC-12, `x^12 + x^11 + x^3 + x^2 + x + 1`.
    pub const CRC12: CrcSpec = CrcSpec {
        width: 12,
        generator: 0x80F,
    };

    /// 28-bit CRC used with the list decoder.
    pub const CRC28: CrcSpec = CrcSpec {
        width: 28,
        generator: 0x8F6_E37A,
    };

    pub fn new(width: usize, generator: u64) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::invalid(format!("CRC width {width} not in [1, 63]")));
        }
        if generator >> width != 0 {
            return Err(Error::invalid(format!(
                "CRC generator {generator:#x} has degree >= {width}"
            )));
        }
        Ok(CrcSpec { width, generator })
    }

    /// Remainder of `M(x) · x^width` modulo the generator, as `width` bits.
    pub fn compute(&self, bits: &[u8]) -> Vec<u8> {
        crate::bits::from_u64(self.register(bits), self.width)
    }

    /// Same as [`CrcSpec::compute`] but packed into an integer.
    pub fn register(&self, bits: &[u8]) -> u64 {
        let mask = (1u64 << self.width) - 1;
        let top = self.width - 1;
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg >> top) & 1) ^ u64::from(b & 1);
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= self.generator;
            }
        }
        reg
    }

    pub fn check(&self, bits: &[u8], expected: &[u8]) -> bool {
        self.register(bits) == crate::bits::to_u64(expected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Schoolbook polynomial long division of `M(x) x^w` by the full generator.
    fn long_division(msg: &[u8], spec: &CrcSpec) -> Vec<u8> {
        let w = spec.width;
        let mut dividend: Vec<u8> = msg.to_vec();
        dividend.extend(std::iter::repeat_n(0, w));
        let mut divisor = vec![1u8];
        divisor.extend(crate::bits::from_u64(spec.generator, w));
        for i in 0..msg.len() {
            if dividend[i] == 1 {
                for (k, d) in divisor.iter().enumerate() {
                    dividend[i + k] ^= d;
                }
            }
        }
        dividend[msg.len()..].to_vec()
    }

    #[test]
    fn empty_message_gives_zero() {
        assert_eq!(CrcSpec::CRC12.compute(&[]), vec![0; 12]);
        assert_eq!(CrcSpec::CRC28.compute(&[]), vec![0; 28]);
    }

    #[test]
    fn single_bit_messages_are_generator_shifts() {
        for spec in [CrcSpec::CRC12, CrcSpec::CRC28] {
            assert_eq!(spec.register(&[1]), spec.generator);
            for len in 1..40 {
                let mut msg = vec![0u8; len];
                msg[0] = 1;
                assert_eq!(spec.compute(&msg), long_division(&msg, &spec), "len {len}");
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CrcSpec::new(0, 1).is_err());
        assert!(CrcSpec::new(4, 0x1F).is_err());
        assert!(CrcSpec::new(4, 0x3).is_ok());
    }

    proptest! {
        #[test]
        fn linear_over_gf2(a in prop::collection::vec(0u8..2, 0..200), seed in any::<u64>()) {
            let b: Vec<u8> = a.iter().enumerate().map(|(i, _)| ((seed >> (i % 64)) & 1) as u8).collect();
            for spec in [CrcSpec::CRC12, CrcSpec::CRC28] {
                let lhs = spec.compute(&crate::bits::xor(&a, &b));
                let rhs = crate::bits::xor(&spec.compute(&a), &spec.compute(&b));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn matches_long_division(msg in prop::collection::vec(0u8..2, 0..120)) {
            prop_assert_eq!(CrcSpec::CRC12.compute(&msg), long_division(&msg, &CrcSpec::CRC12));
        }
    }
}
