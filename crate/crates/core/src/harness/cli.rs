//! Command-line front end. Flags override values from `--config`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use super::{
    frame_rows, read_rd_csv, run_construct, run_rd_sweep, run_swsim, write_csv, ExperimentConfig, FRAME_HEADER,
    RD_HEADER, SWSIM_HEADER,
};
use crate::construction::ConstructionParams;
use crate::polar::{CrcSpec, Kernel};
use crate::sw::{LlrMode, SwSession};
use crate::wz::{
    bd_psnr, decode_sequence, encode_sequence, read_video, synthetic_sequence, write_video, AlphaMode, AnyCode,
    CodecKind, FrameBuffer, WzStream,
};
use crate::{Error, Result};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DECODE: u8 = 4;

/// Exit code class of an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::Decode(_) | Error::Singular | Error::NanLlr(_) => EXIT_DECODE,
        _ => EXIT_CONFIG,
    }
}

#[derive(Parser, Debug)]
#[command(name = "dvc", version = crate::VERSION, about = "Distributed video coding with rate-compatible polar codes")]
pub struct Cli {
    /// JSON experiment configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a reliability sequence.
    Construct(ConstructArgs),
    /// Synthetic Slepian-Wolf simulation over a Laplace channel.
    Swsim(SwsimArgs),
    /// Encode a video into a stream file.
    Encode(EncodeArgs),
    /// Decode a stream file.
    Decode(DecodeArgs),
    /// Rate-distortion sweep over quantization indices.
    RdSweep(RdSweepArgs),
    /// Bjøntegaard delta-PSNR of curve B over curve A.
    Bd(BdArgs),
}

/// Overrides shared by all coding commands.
#[derive(Args, Debug, Default)]
pub struct CodecFlags {
    #[arg(long)]
    pub llr_mode: Option<LlrMode>,
    #[arg(long)]
    pub gop: Option<usize>,
    #[arg(long)]
    pub list_size: Option<usize>,
    #[arg(long, value_parser = parse_kernel)]
    pub kernel: Option<Kernel>,
    /// CRC width of the polar decoder (12 or 28).
    #[arg(long, value_parser = parse_crc)]
    pub polar_crc: Option<CrcSpec>,
    /// CRC width of the LDPCA decoder (12 or 28).
    #[arg(long, value_parser = parse_crc)]
    pub ldpca_crc: Option<CrcSpec>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Chain dimensions, comma separated, strictly decreasing to 0.
    #[arg(long, value_delimiter = ',')]
    pub chain: Option<Vec<usize>>,
    #[arg(long)]
    pub bp_iterations: Option<usize>,
    #[arg(long)]
    pub ldpca_seed: Option<u64>,
    #[arg(long)]
    pub alpha_mode: Option<AlphaMode>,
    #[arg(long)]
    pub key_frame_bits: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory caching reliability sequences.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VideoFlags {
    /// Raw 8-bit luma or `.y4m`; omit for the synthetic sequence.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub frames: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SwsimArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub codec: Option<Vec<CodecKind>>,
    /// One or more LLR modes; the same draws are used for each.
    #[arg(long = "llr-modes", value_delimiter = ',')]
    pub llr_modes: Option<Vec<LlrMode>>,
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long)]
    pub mu: Option<u32>,
    #[command(flatten)]
    pub codec_flags: CodecFlags,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub video: VideoFlags,
    #[arg(long)]
    pub codec: Option<CodecKind>,
    #[arg(long)]
    pub f: Option<usize>,
    #[command(flatten)]
    pub codec_flags: CodecFlags,
    /// Stream file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Stream file written by `encode`.
    #[arg(long)]
    pub stream: PathBuf,
    /// Decoded video (`.y4m` or raw).
    #[arg(long)]
    pub out: PathBuf,
    /// Original video for PSNR; the synthetic sequence when `--synthetic`.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub synthetic_reference: bool,
    /// Per-frame CSV.
    #[arg(long)]
    pub frames_csv: Option<PathBuf>,
    /// Per-bitplane feedback transcript CSV.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RdSweepArgs {
    #[command(flatten)]
    pub video: VideoFlags,
    #[arg(long, value_delimiter = ',')]
    pub f: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub codec: Option<Vec<CodecKind>>,
    #[arg(long = "llr-modes", value_delimiter = ',')]
    pub llr_modes: Option<Vec<LlrMode>>,
    #[command(flatten)]
    pub codec_flags: CodecFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BdArgs {
    /// Reference RD CSV.
    pub curve_a: PathBuf,
    /// Tested RD CSV.
    pub curve_b: PathBuf,
    /// Row filters for curve A, e.g. `codec=ldpca`.
    #[arg(long = "filter-a", value_parser = parse_filter)]
    pub filter_a: Vec<(String, String)>,
    #[arg(long = "filter-b", value_parser = parse_filter)]
    pub filter_b: Vec<(String, String)>,
}

fn parse_kernel(s: &str) -> std::result::Result<Kernel, String> {
    match s {
        "min-sum" => Ok(Kernel::MinSum),
        "exact" => Ok(Kernel::Exact),
        _ => Err(format!("unknown kernel {s:?} (min-sum | exact)")),
    }
}

fn parse_crc(s: &str) -> std::result::Result<CrcSpec, String> {
    match s {
        "12" => Ok(CrcSpec::CRC12),
        "28" => Ok(CrcSpec::CRC28),
        _ => Err(format!("unsupported CRC width {s:?} (12 | 28)")),
    }
}

fn parse_filter(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("filter {s:?} must look like column=value"))
}

impl clap::ValueEnum for LlrMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[LlrMode::Basic, LlrMode::Proposed]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(super::llr_mode_name(*self)))
    }
}

impl clap::ValueEnum for CodecKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[CodecKind::Polar, CodecKind::Ldpca]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            CodecKind::Polar => "polar",
            CodecKind::Ldpca => "ldpca",
        }))
    }
}

impl clap::ValueEnum for AlphaMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[AlphaMode::Oracle, AlphaMode::KeyDifference]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            AlphaMode::Oracle => "oracle",
            AlphaMode::KeyDifference => "key-difference",
        }))
    }
}

impl CodecFlags {
    fn apply(&self, c: &mut ExperimentConfig) {
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { c.$($field).+ = v.clone(); })*
            };
        }
        set!(
            llr_mode => codec.llr_mode,
            gop => codec.gop,
            list_size => codec.list_size,
            kernel => codec.kernel,
            polar_crc => codec.polar_crc,
            ldpca_crc => codec.ldpca_crc,
            target => codec.target,
            eps => codec.eps,
            bp_iterations => codec.bp_iterations,
            ldpca_seed => codec.ldpca_seed,
            alpha_mode => codec.alpha_mode,
            key_frame_bits => codec.key_frame_bits,
            seed => seed,
        );
        if let Some(dims) = &self.chain {
            c.codec.chain = Some(dims.clone());
        }
        if let Some(d) = &self.cache_dir {
            c.cache_dir = Some(d.clone());
        }
    }
}

impl VideoFlags {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(p) = &self.input {
            c.input = Some(p.clone());
        }
        for (flag, field) in [
            (self.width, &mut c.width),
            (self.height, &mut c.height),
            (self.frames, &mut c.frames),
        ] {
            if flag.is_some() {
                *field = flag;
            }
        }
    }
}

/// Input video of a run: the configured file or the 176×144 synthetic
/// sequence (16 frames unless configured otherwise).
pub fn load_input(c: &ExperimentConfig) -> Result<Vec<FrameBuffer>> {
    match &c.input {
        Some(p) => read_video(p, c.width, c.height, c.frames),
        None => synthetic_sequence(
            c.width.unwrap_or(176),
            c.height.unwrap_or(144),
            c.frames.unwrap_or(16),
            c.seed,
        ),
    }
}

fn provenance(c: &ExperimentConfig) -> Vec<String> {
    vec![format!("dvc {}", crate::VERSION), format!("config {}", c.to_json())]
}

fn emit_csv(out: Option<&Path>, comments: &[String], header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    match out {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::io(p, e))?;
            let mut w = BufWriter::new(file);
            write_csv(&mut w, comments, header, rows)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(p, e))
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&mut stdout.lock(), comments, header, rows).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    match &cli.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<()> {
    let mut c = base_config(&cli)?;
    match cli.command {
        Command::Construct(a) => {
            if let Some(n) = a.n {
                c.n = n;
            }
            let params = ConstructionParams::new(a.target.unwrap_or(c.codec.target), a.eps.unwrap_or(c.codec.eps))?;
            let r = run_construct(c.n, &params, &a.out)?;
            println!(
                "n={} T={} eps={}: {} steps, {} GA evaluations, {:.2} s -> {}",
                c.n,
                params.target,
                params.eps,
                r.steps,
                r.ga_evaluations,
                r.seconds,
                a.out.display()
            );
        }
        Command::Swsim(a) => {
            a.codec_flags.apply(&mut c);
            if let Some(n) = a.n {
                c.n = n;
            }
            if let Some(al) = a.alpha {
                c.alphas = al;
            }
            if let Some(t) = a.trials {
                c.trials = t;
            }
            if let Some(b) = a.beta {
                c.swsim_beta = b;
            }
            if let Some(m) = a.mu {
                c.swsim_mu = m;
            }
            let codecs = a.codec.unwrap_or_else(|| vec![c.codec.codec]);
            let modes = a.llr_modes.unwrap_or_else(|| vec![c.codec.llr_mode]);
            c.validate()?;
            let points = run_swsim(&c, &codecs, &modes)?;
            let rows: Vec<Vec<String>> = points.iter().map(|p| p.csv_row()).collect();
            emit_csv(a.out.as_deref(), &provenance(&c), &SWSIM_HEADER, &rows)?;
        }
        Command::Encode(a) => {
            a.codec_flags.apply(&mut c);
            a.video.apply(&mut c);
            if let Some(k) = a.codec {
                c.codec.codec = k;
            }
            if let Some(f) = a.f {
                c.codec.f = f;
            }
            c.output = Some(a.out.clone());
            c.validate()?;
            let frames = load_input(&c)?;
            let session = SwSession::new(c.build_code(frames[0].block_count())?, c.codec.crc());
            let stream = encode_sequence(&session, &frames, &c.codec)?;
            stream.save(&a.out)?;
            println!(
                "encoded {} frames ({} WZ) with {} at f={} -> {}",
                stream.frames,
                stream.wz.len(),
                c.codec.codec,
                c.codec.f,
                a.out.display()
            );
        }
        Command::Decode(a) => {
            let stream = WzStream::load(&a.stream)?;
            c.codec = stream.config.clone();
            if a.cache_dir.is_some() {
                c.cache_dir = a.cache_dir.clone();
            }
            let n = stream.width * stream.height / 16;
            let mut session = SwSession::new(AnyCode::build(&stream.config, n, c.cache_dir.as_deref())?, stream.config.crc());
            let decoded = decode_sequence(&mut session, &stream)?;
            write_video(&a.out, &decoded.frames)?;
            let reference = match (&a.reference, a.synthetic_reference) {
                (Some(p), _) => Some(read_video(p, Some(stream.width), Some(stream.height), Some(stream.frames))?),
                (None, true) => Some(synthetic_sequence(stream.width, stream.height, stream.frames, c.seed)?),
                (None, false) => None,
            };
            let rows = frame_rows(&decoded, reference.as_deref())?;
            if let Some(p) = &a.frames_csv {
                emit_csv(Some(p), &provenance(&c), &FRAME_HEADER, &rows)?;
            }
            if let Some(p) = &a.transcript {
                let file = File::create(p).map_err(|e| Error::io(p, e))?;
                session
                    .transcript
                    .write_csv(BufWriter::new(file))
                    .map_err(|e| Error::io(p, e))?;
            }
            println!(
                "decoded {} frames: WZ {:.2} kbps, keys {:.2} kbps -> {}",
                decoded.frames.len(),
                decoded.kbps(decoded.wz_bits()),
                decoded.kbps(decoded.key_bits()),
                a.out.display()
            );
        }
        Command::RdSweep(a) => {
            a.codec_flags.apply(&mut c);
            a.video.apply(&mut c);
            if let Some(f) = a.f {
                c.f_list = f;
            }
            let codecs = a.codec.unwrap_or_else(|| vec![c.codec.codec]);
            let modes = a.llr_modes.unwrap_or_else(|| vec![c.codec.llr_mode]);
            c.output = a.out.clone();
            c.validate()?;
            let frames = load_input(&c)?;
            let rows = run_rd_sweep(&c, &frames, &codecs, &modes)?;
            let rows: Vec<Vec<String>> = rows.iter().map(|r| r.csv_row()).collect();
            emit_csv(a.out.as_deref(), &provenance(&c), &RD_HEADER, &rows)?;
        }
        Command::Bd(a) => {
            let ca = read_rd_csv(&a.curve_a, &a.filter_a)?;
            let cb = read_rd_csv(&a.curve_b, &a.filter_b)?;
            println!("{:.6}", bd_psnr(&ca, &cb)?);
        }
    }
    Ok(())
}

/// Entry point of the `dvc` binary.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::io("a", std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::Decode("x".into())), EXIT_DECODE);
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from([
            "dvc", "swsim", "--alpha", "0.5,1", "--trials", "3", "--gop", "4", "--llr-modes", "basic,proposed",
            "--codec", "polar,ldpca", "--polar-crc", "12",
        ])
        .unwrap();
        let Command::Swsim(a) = cli.command else { panic!() };
        let mut c = ExperimentConfig::default();
        a.codec_flags.apply(&mut c);
        assert_eq!(c.codec.gop, 4);
        assert_eq!(c.codec.polar_crc, CrcSpec::CRC12);
        assert_eq!(a.alpha, Some(vec![0.5, 1.0]));
        assert_eq!(a.codec, Some(vec![CodecKind::Polar, CodecKind::Ldpca]));
        assert_eq!(a.llr_modes, Some(vec![LlrMode::Basic, LlrMode::Proposed]));
    }

    #[test]
    fn rejects_unknown_values() {
        assert!(Cli::try_parse_from(["dvc", "swsim", "--codec", "turbo"]).is_err());
        assert!(Cli::try_parse_from(["dvc", "swsim", "--polar-crc", "16"]).is_err());
        assert!(Cli::try_parse_from(["dvc", "bd", "a.csv", "b.csv", "--filter-a", "nope"]).is_err());
    }
}
