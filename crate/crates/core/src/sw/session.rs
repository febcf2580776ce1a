//! Rate-adaptive Slepian-Wolf coding with simulated CRC feedback.
//!
//! The encoder stores the full ordered syndrome of a bitplane plus a CRC of
//! the bitplane; the decoder asks for syndrome chunks one at a time until a
//! decoded word passes the CRC, and as a last resort inverts the full
//! syndrome.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::polar::{
    recover_bitplane_full, sw_encode_syndrome, CrcSpec, Kernel, LlrVector, NestedChain, PolarCodeSpec, SclDecoder,
};
use crate::{Error, Result};

/// A syndrome code with a nested chain of rates.
///
/// The syndrome is ordered so that the first `chain.syndrome_len(i)` bits
/// define code `i` of the chain.
pub trait SwCode {
    fn name(&self) -> &'static str;

    fn chain(&self) -> &NestedChain;

    fn len(&self) -> usize {
        self.chain().len()
    }

    /// Full ordered syndrome of `bits`.
    fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>>;

    /// Attempts to decode at chain stage `stage` from the syndrome prefix.
    /// Returns a candidate word, or `None` when the decoder gives up.
    fn decode_stage(
        &mut self,
        stage: usize,
        llr: &LlrVector,
        syndrome: &[u8],
        crc: (&CrcSpec, &[u8]),
    ) -> Result<Option<Vec<u8>>>;

    /// Recovers the word from the complete syndrome.
    fn invert(&self, syndrome: &[u8]) -> Result<Vec<u8>>;
}

/// Shortened polar code decoded with CRC-aided SCL.
pub struct PolarSwCode {
    spec: PolarCodeSpec,
    chain: NestedChain,
    decoder: SclDecoder,
}

impl PolarSwCode {
    pub fn new(spec: PolarCodeSpec, chain: NestedChain, list_size: usize, kernel: Kernel) -> Result<Self> {
        if chain.len() != spec.len() {
            return Err(Error::LengthMismatch {
                expected: spec.len(),
                actual: chain.len(),
            });
        }
        let decoder = SclDecoder::new(spec.mother_len(), list_size, kernel)?;
        Ok(PolarSwCode { spec, chain, decoder })
    }

    pub fn spec(&self) -> &PolarCodeSpec {
        &self.spec
    }
}

impl SwCode for PolarSwCode {
    fn name(&self) -> &'static str {
        "polar"
    }

    fn chain(&self) -> &NestedChain {
        &self.chain
    }

    fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        sw_encode_syndrome(bits, &self.spec)
    }

    fn decode_stage(
        &mut self,
        stage: usize,
        llr: &LlrVector,
        syndrome: &[u8],
        crc: (&CrcSpec, &[u8]),
    ) -> Result<Option<Vec<u8>>> {
        let need = self.chain.syndrome_len(stage);
        let frozen = self.spec.frozen_map(&syndrome[..need])?;
        let out = self.decoder.decode(llr, &frozen, Some(crc))?;
        Ok(Some(out.x))
    }

    fn invert(&self, syndrome: &[u8]) -> Result<Vec<u8>> {
        recover_bitplane_full(syndrome, &self.spec)
    }
}

/// Encoder-side buffer of one bitplane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitplaneBuffer {
    #[serde(with = "bits_hex")]
    pub syndrome: Vec<u8>,
    #[serde(with = "bits_hex")]
    pub crc: Vec<u8>,
}

impl BitplaneBuffer {
    pub fn encode(code: &dyn SwCode, crc: &CrcSpec, bits: &[u8]) -> Result<Self> {
        Ok(BitplaneBuffer {
            syndrome: code.syndrome(bits)?,
            crc: crc.compute(bits),
        })
    }
}

/// Bit vectors serialized as hex of their MSB-first packing plus a length.
mod bits_hex {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Packed {
        len: usize,
        hex: String,
    }

    pub fn serialize<S: Serializer>(bits: &[u8], s: S) -> Result<S::Ok, S::Error> {
        Packed {
            len: bits.len(),
            hex: hex::encode(crate::bits::pack(bits)),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let p = Packed::deserialize(d)?;
        let bytes = hex::decode(&p.hex).map_err(serde::de::Error::custom)?;
        if bytes.len() != p.len.div_ceil(8) {
            return Err(serde::de::Error::custom("hex length does not match bit count"));
        }
        Ok(crate::bits::unpack(&bytes, p.len))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    Decoded,
    FullSyndromeInverted,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Decoded => "decoded",
            Terminal::FullSyndromeInverted => "full-syndrome-inverted",
        })
    }
}

/// One syndrome chunk delivered over the feedback channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkRequest {
    pub index: usize,
    pub len: usize,
    /// Whether the decode attempt made after receiving it passed the CRC.
    pub crc_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitplaneRecord {
    pub band: usize,
    pub level: u32,
    pub requests: Vec<ChunkRequest>,
    pub terminal: Terminal,
    /// Syndrome bits received plus the CRC.
    pub bits_sent: usize,
}

impl BitplaneRecord {
    pub fn crc_pass(&self) -> bool {
        self.terminal == Terminal::Decoded
    }
}

/// Log of every bitplane decoded in a session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackTranscript {
    pub records: Vec<BitplaneRecord>,
}

impl FeedbackTranscript {
    pub const CSV_HEADER: &'static str = "band,level,chunks_requested,bits_sent,crc_pass,terminal_method";

    pub fn total_bits(&self) -> usize {
        self.records.iter().map(|r| r.bits_sent).sum()
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.band,
                r.level,
                r.requests.len(),
                r.bits_sent,
                u8::from(r.crc_pass()),
                r.terminal
            )?;
        }
        Ok(())
    }
}

/// Decoder state shared by all bitplanes of a run.
pub struct SwSession<C: SwCode> {
    pub code: C,
    pub crc: CrcSpec,
    pub transcript: FeedbackTranscript,
}

impl<C: SwCode> SwSession<C> {
    pub fn new(code: C, crc: CrcSpec) -> Self {
        SwSession {
            code,
            crc,
            transcript: FeedbackTranscript::default(),
        }
    }

    /// Encoder side: full syndrome and CRC of `bits`.
    pub fn compress(&self, bits: &[u8]) -> Result<BitplaneBuffer> {
        if bits.len() != self.code.len() {
            return Err(Error::LengthMismatch {
                expected: self.code.len(),
                actual: bits.len(),
            });
        }
        BitplaneBuffer::encode(&self.code, &self.crc, bits)
    }

    /// Decoder side: requests chunks from `buffer` until a candidate passes
    /// the CRC; falls back to full-syndrome inversion after the last proper
    /// code of the chain.
    pub fn decode_bitplane(
        &mut self,
        llr: &LlrVector,
        buffer: &BitplaneBuffer,
        band: usize,
        level: u32,
    ) -> Result<Vec<u8>> {
        let n = self.code.len();
        if llr.len() != n || buffer.syndrome.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: if llr.len() != n { llr.len() } else { buffer.syndrome.len() },
            });
        }
        let omega = self.code.chain().omega();
        let mut requests = Vec::new();
        for stage in 0..omega - 1 {
            let chunk = self.code.chain().chunk(stage);
            let received = chunk.end;
            let candidate =
                self.code
                    .decode_stage(stage, llr, &buffer.syndrome[..received], (&self.crc, &buffer.crc))?;
            let pass = candidate
                .as_ref()
                .is_some_and(|c| self.crc.check(c, &buffer.crc));
            requests.push(ChunkRequest {
                index: stage,
                len: chunk.len(),
                crc_pass: pass,
            });
            if pass {
                self.transcript.records.push(BitplaneRecord {
                    band,
                    level,
                    requests,
                    terminal: Terminal::Decoded,
                    bits_sent: received + self.crc.width as usize,
                });
                return Ok(candidate.expect("passed the CRC"));
            }
        }
        let last = omega - 1;
        let chunk = self.code.chain().chunk(last);
        let bits = self.code.invert(&buffer.syndrome)?;
        requests.push(ChunkRequest {
            index: last,
            len: chunk.len(),
            crc_pass: self.crc.check(&bits, &buffer.crc),
        });
        self.transcript.records.push(BitplaneRecord {
            band,
            level,
            requests,
            terminal: Terminal::FullSyndromeInverted,
            bits_sent: n + self.crc.width as usize,
        });
        Ok(bits)
    }
}
