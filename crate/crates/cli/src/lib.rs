//! Command implementations for the `marvin` tool.
//!
//! The cipher is a research design and has not been independently
//! audited. Do not use it to protect real data.

pub mod ctr;

use marvin::analysis::{self, AuditReport};
use marvin::kat::{self, Path as KatPath};
use marvin::{CipherParams, Key256, LBoxMatrix, PermutationTable};
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub use ctr::NONCE_BYTES;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Cipher(#[from] marvin::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Process exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Ran but found a failure (KAT mismatch, failed claim, invalid config).
    Failure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Failure => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_input(path: Option<&Path>) -> CliResult<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).map_err(io_err(p)),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(io_err(Path::new("<stdin>")))?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, data: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, data).map_err(io_err(p)),
        None => io::stdout()
            .write_all(data)
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn decode_hex(what: &str, text: &str, len: usize) -> CliResult<Vec<u8>> {
    let bytes = hex::decode(text.trim())
        .map_err(|e| CliError::Usage(format!("{what}: invalid hex ({e})")))?;
    if bytes.len() != len {
        return Err(CliError::Usage(format!(
            "{what}: expected {len} bytes, got {}",
            bytes.len()
        )));
    }
    Ok(bytes)
}

/// `--key` accepts 64 hex digits or `@path`. A key file holds either 32 raw
/// bytes or 64 hex digits.
pub fn parse_key(spec: &str) -> CliResult<Key256> {
    let bytes = match spec.strip_prefix('@') {
        Some(path) => {
            let p = Path::new(path);
            let raw = fs::read(p).map_err(io_err(p))?;
            if raw.len() == 32 {
                raw
            } else {
                let text = String::from_utf8(raw).map_err(|_| {
                    CliError::Usage(format!("{path}: key file is neither 32 raw bytes nor hex"))
                })?;
                decode_hex("key", &text, 32)?
            }
        }
        None => decode_hex("key", spec, 32)?,
    };
    Ok(Key256::from_slice(&bytes)?)
}

pub fn parse_nonce(text: &str) -> CliResult<[u8; NONCE_BYTES]> {
    let v = decode_hex("nonce", text, NONCE_BYTES)?;
    Ok(v.try_into().expect("length checked"))
}

/// Component configuration shared by every command.
#[derive(Clone, Debug, Default)]
pub struct ComponentConfig {
    pub rounds: Option<usize>,
    pub lbox: Option<PathBuf>,
    pub permute: Option<PathBuf>,
}

impl ComponentConfig {
    pub fn load_lbox(&self) -> CliResult<LBoxMatrix> {
        match &self.lbox {
            Some(p) => Ok(LBoxMatrix::load(
                &fs::read_to_string(p).map_err(io_err(p))?,
            )?),
            None => Ok(LBoxMatrix::default_matrix()),
        }
    }

    pub fn load_permute(&self) -> CliResult<PermutationTable> {
        match &self.permute {
            Some(p) => Ok(PermutationTable::load(
                &fs::read_to_string(p).map_err(io_err(p))?,
            )?),
            None => Ok(PermutationTable::default_table()),
        }
    }

    fn rounds(&self) -> usize {
        self.rounds.unwrap_or(marvin::DEFAULT_ROUNDS)
    }

    /// Parameters for encryption: every component must pass validation.
    pub fn strict_params(&self) -> CliResult<CipherParams> {
        Ok(CipherParams::validated(
            self.rounds(),
            self.load_lbox()?,
            self.load_permute()?,
        )?)
    }

    /// Parameters for auditing: only structurally usable components required.
    pub fn audit_params(&self) -> CliResult<CipherParams> {
        Ok(CipherParams::new(
            self.rounds(),
            self.load_lbox()?,
            self.load_permute()?,
        )?)
    }
}

#[derive(Clone, Debug)]
pub struct CryptConfig {
    pub components: ComponentConfig,
    pub key: Key256,
    pub nonce: Option<[u8; NONCE_BYTES]>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub raw_block: bool,
}

/// CTR encryption; output is the 16-byte nonce followed by the ciphertext.
/// With `raw_block`, encrypts exactly one 32-byte block and nothing else.
pub fn cmd_encrypt(cfg: &CryptConfig) -> CliResult<Outcome> {
    let params = cfg.components.strict_params()?;
    let data = read_input(cfg.input.as_deref())?;
    let out = if cfg.raw_block {
        params.encrypt_block(&cfg.key, &data)?.to_vec()
    } else {
        let nonce = cfg.nonce.ok_or_else(|| {
            CliError::Usage("encrypt needs --nonce (16 bytes hex) unless --raw-block".into())
        })?;
        let mut out = Vec::with_capacity(NONCE_BYTES + data.len());
        out.extend_from_slice(&nonce);
        out.extend_from_slice(&data);
        ctr::apply_keystream(&params, &cfg.key, &nonce, &mut out[NONCE_BYTES..]);
        out
    };
    write_output(cfg.output.as_deref(), &out)?;
    Ok(Outcome::Success)
}

/// Inverse of [`cmd_encrypt`]. The nonce comes from the file header; a
/// `--nonce` given on the command line must match it.
pub fn cmd_decrypt(cfg: &CryptConfig) -> CliResult<Outcome> {
    let params = cfg.components.strict_params()?;
    let data = read_input(cfg.input.as_deref())?;
    let out = if cfg.raw_block {
        params.decrypt_block(&cfg.key, &data)?.to_vec()
    } else {
        if data.len() < NONCE_BYTES {
            return Err(CliError::Usage(format!(
                "input is {} bytes, shorter than the {NONCE_BYTES}-byte nonce header",
                data.len()
            )));
        }
        let (header, body) = data.split_at(NONCE_BYTES);
        let nonce: [u8; NONCE_BYTES] = header.try_into().expect("split at header length");
        if let Some(given) = cfg.nonce {
            if given != nonce {
                return Err(CliError::Usage(
                    "--nonce does not match the file header".into(),
                ));
            }
        }
        let mut out = body.to_vec();
        ctr::apply_keystream(&params, &cfg.key, &nonce, &mut out);
        out
    };
    write_output(cfg.output.as_deref(), &out)?;
    Ok(Outcome::Success)
}

pub fn cmd_kat_generate(components: &ComponentConfig, output: Option<&Path>) -> CliResult<Outcome> {
    let params = components.strict_params()?;
    let text = kat::format(&kat::generate(&params));
    write_output(output, text.as_bytes())?;
    Ok(Outcome::Success)
}

/// Re-encrypts every record on both the reference and the bitsliced path.
/// Mismatches are reported on `log` with their line numbers.
pub fn cmd_kat_verify(
    components: &ComponentConfig,
    input: Option<&Path>,
    log: &mut dyn Write,
) -> CliResult<Outcome> {
    let params = components.strict_params()?;
    let raw = read_input(input)?;
    let text =
        String::from_utf8(raw).map_err(|_| CliError::Usage("KAT file is not UTF-8".into()))?;
    let records = kat::parse(&text)?;
    let mut bad = 0;
    for (path, label) in [
        (KatPath::Reference, "reference"),
        (KatPath::Bitsliced, "bitsliced"),
    ] {
        for r in kat::verify(&params, &records, path) {
            bad += 1;
            let _ = writeln!(log, "mismatch ({label}) in record at line {}", r.line);
        }
    }
    let _ = writeln!(log, "{} records, {} mismatches", records.len(), bad);
    Ok(if bad == 0 {
        Outcome::Success
    } else {
        Outcome::Failure
    })
}

/// Prints the audit report; `out` receives the JSON form.
pub fn cmd_audit(
    components: &ComponentConfig,
    out: Option<&Path>,
    log: &mut dyn Write,
) -> CliResult<(Outcome, AuditReport)> {
    let params = components.audit_params()?;
    let report = analysis::run_audit(&params)?;
    let _ = write!(log, "{}", report.to_text());
    if let Some(p) = out {
        fs::write(p, report.to_json()).map_err(io_err(p))?;
    }
    let outcome = if report.passed() {
        Outcome::Success
    } else {
        Outcome::Failure
    };
    Ok((outcome, report))
}

pub fn cmd_validate_config(
    components: &ComponentConfig,
    log: &mut dyn Write,
) -> CliResult<Outcome> {
    let l = components.load_lbox()?.validate();
    let p = components.load_permute()?.validate();
    let _ = writeln!(
        log,
        "lbox: invertible={} involutive={} branch_number={}",
        l.invertible, l.involutive, l.branch_number
    );
    let _ = writeln!(
        log,
        "permute: bijective={} block_spreading={} pair_splitting={}",
        p.bijective, p.block_spreading, p.pair_splitting
    );
    let ok = l.passes() && p.passes();
    let _ = writeln!(log, "{}", if ok { "OK" } else { "INVALID" });
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::Failure
    })
}
