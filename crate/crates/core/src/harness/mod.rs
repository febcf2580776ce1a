//! Experiment configuration and the runners behind the `dvc` binary.
//!
//! Every CSV written here starts with `# dvc <version>` and
//! `# config <json>` lines so that a result file carries its own provenance.

pub mod cli;
mod csv;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use csv::{read_rd_csv, write_csv, CsvTable};

use crate::construction::{build_with_trace, write_sequence_file, ConstructionParams, SequenceHeader};
use crate::sw::sim::{draw_band, run_trial_on};
use crate::sw::{LaplaceModel, LlrMode, QuantizerSpec, SwSession};
use crate::wz::{
    band_distortion, decode_sequence, encode_sequence, psnr, AnyCode, CodecConfig, CodecKind, DecodedSequence,
    FrameBuffer, FrameKind,
};
use crate::{Error, Result};

/// Full description of a run; serialized into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub codec: CodecConfig,
    /// Seed of the single experiment RNG.
    pub seed: u64,
    /// Slepian-Wolf block length for `construct` and `swsim`.
    pub n: usize,
    pub alphas: Vec<f64>,
    pub trials: usize,
    /// Quantizer of the synthetic source in `swsim` (uniform, `[0, 2^β)`).
    pub swsim_beta: u32,
    pub swsim_mu: u32,
    pub f_list: Vec<usize>,
    /// Directory caching reliability sequences.
    pub cache_dir: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub frames: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            codec: CodecConfig::default(),
            seed: 1,
            n: 1584,
            alphas: vec![0.2, 0.35, 0.5, 1.0, 2.0],
            trials: 100,
            swsim_beta: 6,
            swsim_mu: 2,
            f_list: (0..8).collect(),
            cache_dir: None,
            input: None,
            output: None,
            width: None,
            height: None,
            frames: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.codec.validate()?;
        if self.n < 2 {
            return Err(Error::invalid(format!("block length {} too small", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("need at least one trial"));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::invalid(format!("alpha {a} must be positive")));
        }
        QuantizerSpec::uniform_dc(self.swsim_beta, self.swsim_mu)?;
        if let Some(f) = self.f_list.iter().find(|&&f| f >= self.codec.qmatrices.len()) {
            return Err(Error::invalid(format!("quantization index {f} out of range")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn build_code(&self, n: usize) -> Result<AnyCode> {
        AnyCode::build(&self.codec, n, self.cache_dir.as_deref())
    }

    pub fn session(&self, n: usize) -> Result<SwSession<AnyCode>> {
        Ok(SwSession::new(self.build_code(n)?, self.codec.crc()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructReport {
    pub seconds: f64,
    pub ga_evaluations: usize,
    pub steps: usize,
}

/// Builds and writes the reliability sequence of length `n`.
pub fn run_construct(n: usize, params: &ConstructionParams, out: &Path) -> Result<ConstructReport> {
    let start = Instant::now();
    let (seq, trace) = build_with_trace(n, params)?;
    let header = SequenceHeader {
        n,
        target: params.target,
        eps: params.eps,
        mother_len: n.next_power_of_two(),
    };
    write_sequence_file(out, &header, &seq)?;
    Ok(ConstructReport {
        seconds: start.elapsed().as_secs_f64(),
        ga_evaluations: trace.ga_evaluations,
        steps: trace.sigmas.len(),
    })
}

/// One `(codec, llr mode, α)` point of a synthetic Slepian-Wolf run.
#[derive(Clone, Debug, PartialEq)]
pub struct SwsimPoint {
    pub codec: CodecKind,
    pub llr_mode: LlrMode,
    pub alpha: f64,
    pub trials: usize,
    pub bitplanes: usize,
    /// Bits sent per source bit.
    pub mean_rate: f64,
    /// Conditional entropy of the labels per source bit.
    pub entropy_rate: f64,
    pub false_accepts: usize,
    pub inversions: usize,
    pub wall_seconds: f64,
}

pub const SWSIM_HEADER: [&str; 10] = [
    "codec",
    "llr_mode",
    "alpha",
    "trials",
    "bitplanes",
    "mean_rate",
    "entropy_rate",
    "false_accepts",
    "inversions",
    "wall_seconds",
];

impl SwsimPoint {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.codec.to_string(),
            llr_mode_name(self.llr_mode).to_string(),
            self.alpha.to_string(),
            self.trials.to_string(),
            self.bitplanes.to_string(),
            format!("{:.6}", self.mean_rate),
            format!("{:.6}", self.entropy_rate),
            self.false_accepts.to_string(),
            self.inversions.to_string(),
            format!("{:.3}", self.wall_seconds),
        ]
    }
}

pub fn llr_mode_name(mode: LlrMode) -> &'static str {
    match mode {
        LlrMode::Basic => "basic",
        LlrMode::Proposed => "proposed",
    }
}

/// Synthetic Slepian-Wolf simulation over the configured α grid.
///
/// The draws of α-point `i` come from stream `i` of the seeded generator and
/// are shared by every codec and LLR mode, so all comparisons are paired.
pub fn run_swsim(config: &ExperimentConfig, codecs: &[CodecKind], modes: &[LlrMode]) -> Result<Vec<SwsimPoint>> {
    config.validate()?;
    let q = QuantizerSpec::uniform_dc(config.swsim_beta, config.swsim_mu)?;
    let mut sessions = codecs
        .iter()
        .map(|&codec| {
            let c = ExperimentConfig {
                codec: CodecConfig {
                    codec,
                    ..config.codec.clone()
                },
                ..config.clone()
            };
            c.session(config.n)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    for (ai, &alpha) in config.alphas.iter().enumerate() {
        let model = LaplaceModel::new(alpha)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(ai as u64);
        let draws: Vec<_> = (0..config.trials).map(|_| draw_band(&mut rng, config.n, &q, &model)).collect();
        for (session, &codec) in sessions.iter_mut().zip(codecs) {
            for &mode in modes {
                let start = Instant::now();
                let mut p = SwsimPoint {
                    codec,
                    llr_mode: mode,
                    alpha,
                    trials: config.trials,
                    bitplanes: 0,
                    mean_rate: 0.0,
                    entropy_rate: 0.0,
                    false_accepts: 0,
                    inversions: 0,
                    wall_seconds: 0.0,
                };
                for (x, s) in &draws {
                    let out = run_trial_on(session, x, s, &q, &model, mode)?;
                    p.bitplanes += out.bitplanes;
                    p.mean_rate += out.rate();
                    p.entropy_rate += out.entropy_rate(q.mu);
                    p.false_accepts += out.false_accepts;
                    p.inversions += out.inversions;
                }
                session.transcript.records.clear();
                p.mean_rate /= config.trials as f64;
                p.entropy_rate /= config.trials as f64;
                p.wall_seconds = start.elapsed().as_secs_f64();
                log::info!(
                    "{codec} {} alpha={alpha}: rate {:.4} (entropy {:.4})",
                    llr_mode_name(mode),
                    p.mean_rate,
                    p.entropy_rate
                );
                points.push(p);
            }
        }
    }
    Ok(points)
}

/// One point of a rate-distortion sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RdRow {
    pub f: usize,
    pub gop: usize,
    pub codec: CodecKind,
    pub llr_mode: LlrMode,
    /// WZ plus key-frame rate.
    pub rate_kbps: f64,
    /// Mean PSNR of the WZ frames.
    pub psnr_db: f64,
    pub wz_kbps: f64,
    pub key_kbps: f64,
    /// Mean PSNR over all frames (key frames are lossless and capped).
    pub all_psnr_db: f64,
    pub decode_seconds_per_wz_frame: f64,
    pub bands: usize,
    pub lossless_bands: usize,
    pub bound_violations: usize,
}

pub const RD_HEADER: [&str; 13] = [
    "f",
    "gop",
    "codec",
    "llr_mode",
    "rate_kbps",
    "psnr_db",
    "wz_kbps",
    "key_kbps",
    "all_psnr_db",
    "decode_s_per_wz_frame",
    "bands",
    "lossless_bands",
    "bound_violations",
];

impl RdRow {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.f.to_string(),
            self.gop.to_string(),
            self.codec.to_string(),
            llr_mode_name(self.llr_mode).to_string(),
            format!("{:.4}", self.rate_kbps),
            format!("{:.4}", self.psnr_db),
            format!("{:.4}", self.wz_kbps),
            format!("{:.4}", self.key_kbps),
            format!("{:.4}", self.all_psnr_db),
            format!("{:.4}", self.decode_seconds_per_wz_frame),
            self.bands.to_string(),
            self.lossless_bands.to_string(),
            self.bound_violations.to_string(),
        ]
    }
}

/// Per-frame CSV columns.
pub const FRAME_HEADER: [&str; 5] = ["frame", "type", "rate_bits", "psnr_db", "decode_seconds"];

/// Per-frame rows; PSNR is empty without a reference.
pub fn frame_rows(decoded: &DecodedSequence, reference: Option<&[FrameBuffer]>) -> Result<Vec<Vec<String>>> {
    decoded
        .reports
        .iter()
        .map(|r| {
            let p = match reference {
                Some(frames) => {
                    let f = frames
                        .get(r.index)
                        .ok_or_else(|| Error::invalid(format!("reference lacks frame {}", r.index)))?;
                    format!("{:.4}", psnr(&decoded.frames[r.index], f)?)
                }
                None => String::new(),
            };
            Ok(vec![
                r.index.to_string(),
                r.kind.to_string(),
                r.rate_bits.to_string(),
                p,
                format!("{:.4}", r.decode_seconds),
            ])
        })
        .collect()
}

/// Encodes and decodes `frames` with `codec` and summarizes the result
/// against the originals.
pub fn run_rd_point(
    frames: &[FrameBuffer],
    codec: &CodecConfig,
    session: &mut SwSession<AnyCode>,
) -> Result<(RdRow, DecodedSequence)> {
    let stream = encode_sequence(session, frames, codec)?;
    session.transcript.records.clear();
    let decoded = decode_sequence(session, &stream)?;
    session.transcript.records.clear();
    let mut wz_psnr = Vec::new();
    let mut all_psnr = Vec::new();
    for r in &decoded.reports {
        let p = psnr(&decoded.frames[r.index], &frames[r.index])?;
        all_psnr.push(p);
        if r.kind == FrameKind::Wz {
            wz_psnr.push(p);
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let dist = band_distortion(frames, &decoded)?;
    let (wz_bits, key_bits) = (decoded.wz_bits(), decoded.key_bits());
    let row = RdRow {
        f: codec.f,
        gop: codec.gop,
        codec: codec.codec,
        llr_mode: codec.llr_mode,
        rate_kbps: decoded.kbps(wz_bits + key_bits),
        psnr_db: mean(&wz_psnr),
        wz_kbps: decoded.kbps(wz_bits),
        key_kbps: decoded.kbps(key_bits),
        all_psnr_db: mean(&all_psnr),
        decode_seconds_per_wz_frame: mean(&decoded.wz_decode_seconds()),
        bands: dist.len(),
        lossless_bands: dist.iter().filter(|d| d.lossless).count(),
        bound_violations: dist.iter().filter(|d| !d.bound_holds()).count(),
    };
    Ok((row, decoded))
}

/// Sweeps `f_list` for every codec / LLR-mode combination. Rows are ordered
/// by codec, mode, then `f`.
pub fn run_rd_sweep(
    config: &ExperimentConfig,
    frames: &[FrameBuffer],
    codecs: &[CodecKind],
    modes: &[LlrMode],
) -> Result<Vec<RdRow>> {
    config.validate()?;
    let n = frames
        .first()
        .ok_or_else(|| Error::invalid("empty sequence"))?
        .block_count();
    let mut rows = Vec::new();
    for &codec in codecs {
        let base = CodecConfig {
            codec,
            ..config.codec.clone()
        };
        let mut session = SwSession::new(AnyCode::build(&base, n, config.cache_dir.as_deref())?, base.crc());
        for &llr_mode in modes {
            for &f in &config.f_list {
                let c = CodecConfig {
                    f,
                    llr_mode,
                    ..base.clone()
                };
                let (row, _) = run_rd_point(frames, &c, &mut session)?;
                log::info!(
                    "{codec} {} f={f}: {:.2} kbps, {:.2} dB",
                    llr_mode_name(llr_mode),
                    row.rate_kbps,
                    row.psnr_db
                );
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::CrcSpec;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            codec: CodecConfig {
                list_size: 4,
                polar_crc: CrcSpec::CRC12,
                ..CodecConfig::default()
            },
            n: 64,
            alphas: vec![0.3, 3.0],
            trials: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_roundtrip_and_partial_json() {
        let c = small();
        let back: ExperimentConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let p: ExperimentConfig = serde_json::from_str(r#"{"gop": 4, "trials": 7, "codec": "ldpca"}"#).unwrap();
        assert_eq!(p.codec.gop, 4);
        assert_eq!(p.codec.codec, CodecKind::Ldpca);
        assert_eq!(p.trials, 7);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_values() {
        for c in [
            ExperimentConfig { trials: 0, ..small() },
            ExperimentConfig { alphas: vec![-1.0], ..small() },
            ExperimentConfig { f_list: vec![9], ..small() },
            ExperimentConfig { swsim_mu: 9, ..small() },
        ] {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn swsim_is_paired_and_deterministic() {
        let c = small();
        let modes = [LlrMode::Basic, LlrMode::Proposed];
        let a = run_swsim(&c, &[CodecKind::Polar, CodecKind::Ldpca], &modes).unwrap();
        let b = run_swsim(&c, &[CodecKind::Polar, CodecKind::Ldpca], &modes).unwrap();
        assert_eq!(a.len(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean_rate, y.mean_rate);
            assert_eq!(x.bitplanes, 2 * c.trials);
            assert!(x.mean_rate > 0.0 && x.mean_rate <= 1.0 + 28.0 / 64.0);
        }
        // Same draws for every mode: identical entropy.
        assert_eq!(a[0].entropy_rate, a[1].entropy_rate);
        assert_eq!(a[0].entropy_rate, a[2].entropy_rate);
    }

    #[test]
    fn construct_writes_a_readable_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("seq.txt");
        let params = ConstructionParams::new(1e-3, 1e-4).unwrap();
        let r = run_construct(40, &params, &p).unwrap();
        assert!(r.ga_evaluations > 0);
        let (h, seq) = crate::construction::read_sequence_file(&p).unwrap();
        assert_eq!(h.n, 40);
        assert_eq!(seq.len(), 40);
        assert_eq!(h.mother_len, 64);
    }

    #[test]
    fn rd_sweep_small() {
        let frames = crate::wz::synthetic_sequence(32, 16, 4, 2).unwrap();
        let c = ExperimentConfig {
            f_list: vec![0, 7],
            ..small()
        };
        let rows = run_rd_sweep(&c, &frames, &[CodecKind::Ldpca], &[LlrMode::Proposed]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].rate_kbps <= rows[1].rate_kbps);
        assert!(rows.iter().all(|r| r.bound_violations == 0 && r.decode_seconds_per_wz_frame >= 0.0));
    }
}
