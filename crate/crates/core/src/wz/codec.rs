//! GOP orchestration: key frames pass through, WZ frames are coded band by
//! band and bitplane by bitplane against interpolated side information.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bands::{assemble_frame, extract_bands, FrameBuffer};
use super::qmatrix::QMatrixSet;
use super::reconstruct::reconstruct;
use super::si::make_side_information;
use crate::construction::{build_reliability_sequence, load_or_build, ConstructionParams};
use crate::ldpca::{LdpcaCode, LdpcaSwCode};
use crate::polar::{CrcSpec, Kernel, LlrVector, NestedChain, PolarCodeSpec};
use crate::sw::{
    encode_band, fit_alpha, multistage_decode_band, BandEncoding, BitplaneRecord, LaplaceModel, LlrMode, PolarSwCode,
    QuantizerSpec, SwCode, SwSession,
};
use crate::{Error, Result};

/// Frames per second assumed for rate accounting.
pub const FRAME_RATE: f64 = 15.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodecKind {
    #[default]
    Polar,
    Ldpca,
}

impl FromStr for CodecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(CodecKind::Polar),
            "ldpca" => Ok(CodecKind::Ldpca),
            other => Err(Error::invalid(format!("unknown codec {other:?}"))),
        }
    }
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecKind::Polar => "polar",
            CodecKind::Ldpca => "ldpca",
        })
    }
}

/// Where the correlation parameter of each band comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Fitted by the encoder to the true residual and sent alongside the
    /// syndromes (offline correlation estimate).
    #[default]
    Oracle,
    /// Fitted by the decoder to half the difference of the two keys; frames
    /// without a following key fall back to the transmitted value.
    KeyDifference,
}

impl FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(AlphaMode::Oracle),
            "key-difference" => Ok(AlphaMode::KeyDifference),
            other => Err(Error::invalid(format!("unknown alpha mode {other:?}"))),
        }
    }
}

/// Everything that determines the bitstream and its decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodecConfig {
    pub codec: CodecKind,
    pub llr_mode: LlrMode,
    pub gop: usize,
    /// Quantization index into `qmatrices`.
    pub f: usize,
    pub list_size: usize,
    pub kernel: Kernel,
    pub polar_crc: CrcSpec,
    pub ldpca_crc: CrcSpec,
    /// Construction target and window.
    pub target: f64,
    pub eps: f64,
    /// Chain dimensions; `None` uses [`NestedChain::default_for`].
    pub chain: Option<Vec<usize>>,
    pub ldpca_seed: u64,
    pub bp_iterations: usize,
    pub dc_beta: u32,
    pub ac_beta: u32,
    pub alpha_mode: AlphaMode,
    /// Bits charged per key frame.
    pub key_frame_bits: u64,
    pub qmatrices: QMatrixSet,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            codec: CodecKind::Polar,
            llr_mode: LlrMode::Proposed,
            gop: 2,
            f: 7,
            list_size: 32,
            kernel: Kernel::MinSum,
            polar_crc: CrcSpec::CRC28,
            ldpca_crc: CrcSpec::CRC12,
            target: 1e-3,
            eps: 1e-4,
            chain: None,
            ldpca_seed: 0,
            bp_iterations: 100,
            dc_beta: 12,
            ac_beta: 11,
            alpha_mode: AlphaMode::Oracle,
            key_frame_bits: 0,
            qmatrices: QMatrixSet::builtin(),
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        if ![2, 4, 8].contains(&self.gop) {
            return Err(Error::invalid(format!("GOP length {} not in {{2, 4, 8}}", self.gop)));
        }
        self.qmatrices.matrix(self.f)?;
        if self.list_size == 0 || !self.list_size.is_power_of_two() {
            return Err(Error::invalid(format!("list size {} must be a power of two", self.list_size)));
        }
        CrcSpec::new(self.polar_crc.width, self.polar_crc.generator)?;
        CrcSpec::new(self.ldpca_crc.width, self.ldpca_crc.generator)?;
        ConstructionParams::new(self.target, self.eps)?;
        if self.bp_iterations == 0 {
            return Err(Error::invalid("BP needs at least one iteration"));
        }
        let max_bits = self.qmatrices.band_bits(self.qmatrices.len() - 1)?;
        if max_bits[0] > self.dc_beta || max_bits[1..].iter().any(|&b| b > self.ac_beta) {
            return Err(Error::invalid("quantizer bit depth exceeds the band dynamic range"));
        }
        Ok(())
    }

    pub fn crc(&self) -> CrcSpec {
        match self.codec {
            CodecKind::Polar => self.polar_crc,
            CodecKind::Ldpca => self.ldpca_crc,
        }
    }

    /// Quantizer of every band at the configured `f`; `None` for skipped bands.
    pub fn quantizers(&self) -> Result<[Option<QuantizerSpec>; 16]> {
        let bits = self.qmatrices.band_bits(self.f)?;
        let mut out: [Option<QuantizerSpec>; 16] = Default::default();
        for (band, &mu) in bits.iter().enumerate() {
            if mu == 0 {
                continue;
            }
            out[band] = Some(if band == 0 {
                QuantizerSpec::uniform_dc(self.dc_beta, mu)?
            } else {
                QuantizerSpec::doubled_zero_ac(band, self.ac_beta, mu)?
            });
        }
        Ok(out)
    }

    pub fn nested_chain(&self, n: usize) -> Result<NestedChain> {
        match &self.chain {
            Some(dims) => NestedChain::new(n, dims.clone()),
            None => NestedChain::default_for(n),
        }
    }
}

/// Either backend behind one [`SwCode`].
pub enum AnyCode {
    Polar(PolarSwCode),
    Ldpca(LdpcaSwCode),
}

impl AnyCode {
    /// Builds the configured code of length `n`. Polar reliability sequences
    /// are cached in `cache_dir` when given.
    pub fn build(config: &CodecConfig, n: usize, cache_dir: Option<&Path>) -> Result<Self> {
        let chain = config.nested_chain(n)?;
        match config.codec {
            CodecKind::Polar => {
                let params = ConstructionParams::new(config.target, config.eps)?;
                let seq = match cache_dir {
                    Some(dir) => load_or_build(dir, n, &params)?,
                    None => build_reliability_sequence(n, &params)?,
                };
                Ok(AnyCode::Polar(PolarSwCode::new(
                    PolarCodeSpec::new(seq),
                    chain,
                    config.list_size,
                    config.kernel,
                )?))
            }
            CodecKind::Ldpca => Ok(AnyCode::Ldpca(LdpcaSwCode::new(
                LdpcaCode::new(n, config.ldpca_seed)?,
                chain,
                config.bp_iterations,
            )?)),
        }
    }

    fn inner(&self) -> &dyn SwCode {
        match self {
            AnyCode::Polar(c) => c,
            AnyCode::Ldpca(c) => c,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn SwCode {
        match self {
            AnyCode::Polar(c) => c,
            AnyCode::Ldpca(c) => c,
        }
    }
}

impl SwCode for AnyCode {
    fn name(&self) -> &'static str {
        self.inner().name()
    }

    fn chain(&self) -> &NestedChain {
        self.inner().chain()
    }

    fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.inner().syndrome(bits)
    }

    fn decode_stage(
        &mut self,
        stage: usize,
        llr: &LlrVector,
        syndrome: &[u8],
        crc: (&CrcSpec, &[u8]),
    ) -> Result<Option<Vec<u8>>> {
        self.inner_mut().decode_stage(stage, llr, syndrome, crc)
    }

    fn invert(&self, syndrome: &[u8]) -> Result<Vec<u8>> {
        self.inner().invert(syndrome)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    Key,
    Wz,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Key => "key",
            FrameKind::Wz => "wz",
        })
    }
}

/// Key frames sit at multiples of the GOP length.
pub fn frame_kind(index: usize, gop: usize) -> FrameKind {
    if index % gop == 0 {
        FrameKind::Key
    } else {
        FrameKind::Wz
    }
}

/// Neighbouring keys of a WZ frame and its interpolation position. WZ frames
/// after the last key use that key alone.
fn key_neighbours(index: usize, gop: usize, frames: usize) -> (usize, Option<usize>, f64) {
    let prev = index - index % gop;
    let next = prev + gop;
    if next < frames {
        (prev, Some(next), (index - prev) as f64 / gop as f64)
    } else {
        (prev, None, 0.0)
    }
}

fn side_information(keys: &[(usize, FrameBuffer)], index: usize, gop: usize, frames: usize) -> Result<FrameBuffer> {
    let key = |i: usize| {
        keys.iter()
            .find(|(k, _)| *k == i)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Decode(format!("key frame {i} missing")))
    };
    let (prev, next, t) = key_neighbours(index, gop, frames);
    match next {
        Some(n) => make_side_information(key(prev)?, key(n)?, t),
        None => Ok(key(prev)?.clone()),
    }
}

mod frame_hex {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(data: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(data))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFrameData {
    pub index: usize,
    #[serde(with = "frame_hex")]
    pub luma: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandData {
    pub band: usize,
    /// Encoder-side fit of the residual.
    pub alpha: f64,
    /// `None` for bands skipped at this quantization index.
    pub encoding: Option<BandEncoding>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WzFrameData {
    pub index: usize,
    pub bands: Vec<BandData>,
}

/// Encoder output for a whole sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WzStream {
    pub version: String,
    pub config: CodecConfig,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub keys: Vec<KeyFrameData>,
    pub wz: Vec<WzFrameData>,
}

impl WzStream {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn check_sequence(frames: &[FrameBuffer]) -> Result<()> {
    let Some(first) = frames.first() else {
        return Err(Error::invalid("empty sequence"));
    };
    if let Some(i) = frames.iter().position(|f| !f.same_size(first)) {
        return Err(Error::invalid(format!("frame {i} differs in size from frame 0")));
    }
    Ok(())
}

/// Encodes `frames`; `session` must hold a code of length `w·h/16`.
pub fn encode_sequence<C: SwCode>(session: &SwSession<C>, frames: &[FrameBuffer], config: &CodecConfig) -> Result<WzStream> {
    config.validate()?;
    check_sequence(frames)?;
    let (w, h) = (frames[0].width(), frames[0].height());
    if session.code.len() != frames[0].block_count() {
        return Err(Error::LengthMismatch {
            expected: frames[0].block_count(),
            actual: session.code.len(),
        });
    }
    let quantizers = config.quantizers()?;
    let keys: Vec<(usize, FrameBuffer)> = (0..frames.len())
        .filter(|&i| frame_kind(i, config.gop) == FrameKind::Key)
        .map(|i| (i, frames[i].clone()))
        .collect();
    let mut wz = Vec::new();
    for (index, frame) in frames.iter().enumerate() {
        if frame_kind(index, config.gop) == FrameKind::Key {
            continue;
        }
        let si_bands = extract_bands(&side_information(&keys, index, config.gop, frames.len())?);
        let x_bands = extract_bands(frame);
        let mut bands = Vec::with_capacity(16);
        for (band, q) in quantizers.iter().enumerate() {
            let residual: Vec<f64> = x_bands[band]
                .iter()
                .zip(&si_bands[band])
                .map(|(&x, &y)| (x - y) as f64)
                .collect();
            let encoding = match q {
                Some(q) => {
                    let enc = encode_band(session, &x_bands[band], q)?;
                    if enc.clamped > 0 {
                        log::warn!("frame {index} band {band}: {} coefficients clamped", enc.clamped);
                    }
                    Some(enc)
                }
                None => None,
            };
            bands.push(BandData {
                band,
                alpha: fit_alpha(&residual)?,
                encoding,
            });
        }
        wz.push(WzFrameData { index, bands });
    }
    Ok(WzStream {
        version: crate::VERSION.to_string(),
        config: config.clone(),
        width: w,
        height: h,
        frames: frames.len(),
        keys: keys
            .into_iter()
            .map(|(index, f)| KeyFrameData {
                index,
                luma: f.data().to_vec(),
            })
            .collect(),
        wz,
    })
}

/// Decoder-side view of one band.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedBand {
    pub band: usize,
    pub quantizer: Option<QuantizerSpec>,
    pub alpha: f64,
    /// Decoded bins (empty for skipped bands).
    pub bins: Vec<usize>,
    /// Reconstructed coefficients.
    pub values: Vec<i64>,
    pub bits_sent: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    pub index: usize,
    pub kind: FrameKind,
    pub rate_bits: u64,
    pub decode_seconds: f64,
    /// Per-band detail of WZ frames.
    pub bands: Vec<DecodedBand>,
}

#[derive(Clone, Debug)]
pub struct DecodedSequence {
    pub frames: Vec<FrameBuffer>,
    pub reports: Vec<FrameReport>,
    /// Every bitplane decoded, in order.
    pub records: Vec<BitplaneRecord>,
}

impl DecodedSequence {
    pub fn wz_bits(&self) -> u64 {
        self.reports.iter().filter(|r| r.kind == FrameKind::Wz).map(|r| r.rate_bits).sum()
    }

    pub fn key_bits(&self) -> u64 {
        self.reports.iter().filter(|r| r.kind == FrameKind::Key).map(|r| r.rate_bits).sum()
    }

    /// Rate in kbps over the whole sequence at [`FRAME_RATE`].
    pub fn kbps(&self, bits: u64) -> f64 {
        bits as f64 * FRAME_RATE / self.frames.len() as f64 / 1000.0
    }

    pub fn wz_decode_seconds(&self) -> Vec<f64> {
        self.reports
            .iter()
            .filter(|r| r.kind == FrameKind::Wz)
            .map(|r| r.decode_seconds)
            .collect()
    }
}

fn alpha_from_keys(keys: &[(usize, FrameBuffer)], index: usize, gop: usize, frames: usize, band: usize) -> Option<f64> {
    let (prev, next, _) = key_neighbours(index, gop, frames);
    let next = next?;
    let find = |i: usize| keys.iter().find(|(k, _)| *k == i).map(|(_, f)| extract_bands(f));
    let (a, b) = (find(prev)?, find(next)?);
    let r: Vec<f64> = a[band].iter().zip(&b[band]).map(|(&x, &y)| (y - x) as f64 / 2.0).collect();
    fit_alpha(&r).ok()
}

/// Decodes a stream; `session` must be built from `stream.config`.
pub fn decode_sequence<C: SwCode>(session: &mut SwSession<C>, stream: &WzStream) -> Result<DecodedSequence> {
    let config = &stream.config;
    config.validate()?;
    let keys: Vec<(usize, FrameBuffer)> = stream
        .keys
        .iter()
        .map(|k| Ok((k.index, FrameBuffer::new(stream.width, stream.height, k.luma.clone())?)))
        .collect::<Result<_>>()?;
    let quantizers = config.quantizers()?;
    let mut frames: Vec<Option<FrameBuffer>> = vec![None; stream.frames];
    let mut reports = Vec::with_capacity(stream.frames);
    for (index, f) in &keys {
        if *index >= stream.frames {
            return Err(Error::Decode(format!("key frame {index} beyond the sequence")));
        }
        frames[*index] = Some(f.clone());
    }
    let mut records = Vec::new();
    for wz in &stream.wz {
        if wz.index >= stream.frames || wz.bands.len() != 16 {
            return Err(Error::Decode(format!("malformed WZ frame {}", wz.index)));
        }
        let start = Instant::now();
        let first_record = session.transcript.records.len();
        let si_bands = extract_bands(&side_information(&keys, wz.index, config.gop, stream.frames)?);
        let mut values: [Vec<i64>; 16] = Default::default();
        let mut decoded = Vec::with_capacity(16);
        for data in &wz.bands {
            let band = data.band;
            if band >= 16 {
                return Err(Error::Decode(format!("band {band} out of range")));
            }
            let si: Vec<f64> = si_bands[band].iter().map(|&v| v as f64).collect();
            let alpha = match config.alpha_mode {
                AlphaMode::Oracle => data.alpha,
                AlphaMode::KeyDifference => {
                    alpha_from_keys(&keys, wz.index, config.gop, stream.frames, band).unwrap_or(data.alpha)
                }
            };
            let model = LaplaceModel::new(alpha)?;
            let before = session.transcript.total_bits();
            let (bins, vals) = match (&quantizers[band], &data.encoding) {
                (Some(q), Some(enc)) => {
                    if enc.quantizer != *q {
                        return Err(Error::Decode(format!("band {band} quantizer disagrees with the config")));
                    }
                    let bins = multistage_decode_band(session, enc, &si, &model, config.llr_mode)?;
                    let vals = bins.iter().zip(&si).map(|(&j, &s)| reconstruct(j, s, &model, q)).collect();
                    (bins, vals)
                }
                (None, None) => (Vec::new(), si_bands[band].clone()),
                _ => return Err(Error::Decode(format!("band {band} presence disagrees with the config"))),
            };
            values[band] = vals.clone();
            decoded.push(DecodedBand {
                band,
                quantizer: quantizers[band].clone(),
                alpha,
                bins,
                values: vals,
                bits_sent: session.transcript.total_bits() - before,
            });
        }
        frames[wz.index] = Some(assemble_frame(&values, stream.width, stream.height)?);
        let new_records = &session.transcript.records[first_record..];
        records.extend_from_slice(new_records);
        reports.push(FrameReport {
            index: wz.index,
            kind: FrameKind::Wz,
            rate_bits: new_records.iter().map(|r| r.bits_sent as u64).sum(),
            decode_seconds: start.elapsed().as_secs_f64(),
            bands: decoded,
        });
    }
    for (index, _) in &keys {
        reports.push(FrameReport {
            index: *index,
            kind: FrameKind::Key,
            rate_bits: config.key_frame_bits,
            decode_seconds: 0.0,
            bands: Vec::new(),
        });
    }
    reports.sort_by_key(|r| r.index);
    let frames = frames
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| Error::Decode(format!("frame {i} missing from the stream"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecodedSequence { frames, reports, records })
}

/// Distortion of one decoded band against the original coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BandDistortion {
    pub frame: usize,
    pub band: usize,
    /// Decoded bins equal the encoder's bins.
    pub lossless: bool,
    /// Symbols outside the quantizer range (excluded from the bound).
    pub clamped: usize,
    pub max_error: i64,
    /// Symbols with `|rec - orig| ≥` their bin width.
    pub violations: usize,
}

impl BandDistortion {
    /// The bin-width bound holds, or does not apply because decoding was lossy.
    pub fn bound_holds(&self) -> bool {
        !self.lossless || self.violations == 0
    }
}

/// Compares every quantized band of `decoded` with `original`.
pub fn band_distortion(original: &[FrameBuffer], decoded: &DecodedSequence) -> Result<Vec<BandDistortion>> {
    let mut out = Vec::new();
    for report in decoded.reports.iter().filter(|r| r.kind == FrameKind::Wz) {
        let frame = original
            .get(report.index)
            .ok_or_else(|| Error::invalid(format!("reference lacks frame {}", report.index)))?;
        let x = extract_bands(frame);
        for b in &report.bands {
            let Some(q) = &b.quantizer else { continue };
            let truth = q.quantize_band(&x[b.band]);
            let mut d = BandDistortion {
                frame: report.index,
                band: b.band,
                lossless: truth.bins == b.bins,
                clamped: truth.clamped,
                max_error: 0,
                violations: 0,
            };
            let (lo, hi) = q.range();
            for ((&orig, &rec), &j) in x[b.band].iter().zip(&b.values).zip(&b.bins) {
                if orig < lo || orig > hi {
                    continue;
                }
                let err = (rec - orig).abs();
                d.max_error = d.max_error.max(err);
                if err >= q.bin_width(j) {
                    d.violations += 1;
                }
            }
            out.push(d);
        }
    }
    Ok(out)
}
