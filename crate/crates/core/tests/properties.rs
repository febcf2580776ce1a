//! Property tests for the invariants of each layer.

use polar_dvc::construction::{build_reliability_sequence, ConstructionParams};
use polar_dvc::ldpca::LdpcaCode;
use polar_dvc::polar::{recover_bitplane_full, sw_encode_syndrome, PolarCodeSpec};
use polar_dvc::sw::{LaplaceModel, QuantizerSpec};
use polar_dvc::wz::{assemble_frame, extract_bands, forward_dct4, inverse_dct4, reconstruct, FrameBuffer};
use proptest::prelude::*;

fn spec(n: usize) -> PolarCodeSpec {
    PolarCodeSpec::new(build_reliability_sequence(n, &ConstructionParams::new(1e-3, 1e-4).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn syndrome_is_linear_and_invertible(n in 2usize..80, seed in any::<u64>()) {
        let s = spec(n);
        let bits = |k: u64| -> Vec<u8> { (0..n).map(|i| ((seed.rotate_left(i as u32 + k as u32) ^ (i as u64 * 0x9E37)) & 1) as u8).collect() };
        let (a, b) = (bits(1), bits(7));
        let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let (sa, sb, sab) = (sw_encode_syndrome(&a, &s).unwrap(), sw_encode_syndrome(&b, &s).unwrap(), sw_encode_syndrome(&ab, &s).unwrap());
        let sum: Vec<u8> = sa.iter().zip(&sb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(sab, sum);
        prop_assert_eq!(recover_bitplane_full(&sa, &s).unwrap(), a);
    }

    #[test]
    fn ldpca_inversion_roundtrip(n in 24usize..120, bits in prop::collection::vec(0u8..2, 120)) {
        let code = LdpcaCode::new(n, 5).unwrap();
        let b = &bits[..n];
        prop_assert_eq!(code.invert(&code.encode(b).unwrap()).unwrap(), b.to_vec());
        prop_assert!(code.merged_checks(&code.encode(b).unwrap()[..n / 2]).satisfied_by(b));
    }
}

proptest! {
    #[test]
    fn dct_roundtrip(samples in prop::array::uniform16(0i32..256)) {
        let mut block = [[0i32; 4]; 4];
        for (k, v) in samples.iter().enumerate() {
            block[k / 4][k % 4] = *v;
        }
        prop_assert_eq!(inverse_dct4(&forward_dct4(&block)), block);
    }

    #[test]
    fn band_roundtrip(w in 1usize..6, h in 1usize..6, data in prop::collection::vec(any::<u8>(), 400)) {
        let (w, h) = (4 * w, 4 * h);
        let f = FrameBuffer::new(w, h, data[..w * h].to_vec()).unwrap();
        let bands = extract_bands(&f);
        prop_assert_eq!(assemble_frame(&bands, w, h).unwrap(), f);
    }

    #[test]
    fn reconstruction_stays_in_bin(x in -2047i64..2048, s in -3000.0f64..3000.0, alpha in 1e-3f64..50.0, mu in 2u32..7) {
        let q = QuantizerSpec::doubled_zero_ac(4, 11, mu).unwrap();
        let j = q.bin_of(x).0;
        let (lo, hi) = q.bin_bounds(j);
        let r = reconstruct(j, s, &LaplaceModel::new(alpha).unwrap(), &q);
        prop_assert!(lo <= r && r <= hi);
        prop_assert!((r - x).abs() < q.bin_width(j));
    }
}
