use clap::{Args, Parser, Subcommand};
use marvin_cli::{
    cmd_audit, cmd_decrypt, cmd_encrypt, cmd_kat_generate, cmd_kat_verify, cmd_validate_config,
    parse_key, parse_nonce, CliResult, ComponentConfig, CryptConfig, Outcome,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Marvin-256 block cipher tool. Research cipher, not independently audited.
#[derive(Parser)]
#[command(name = "marvin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Components {
    /// Round count
    #[arg(long)]
    rounds: Option<usize>,
    /// L-box matrix file (16 lines of 16 binary digits)
    #[arg(long)]
    lbox: Option<PathBuf>,
    /// PermuteSets table file (64 integers)
    #[arg(long)]
    permute: Option<PathBuf>,
}

impl From<Components> for ComponentConfig {
    fn from(c: Components) -> Self {
        ComponentConfig {
            rounds: c.rounds,
            lbox: c.lbox,
            permute: c.permute,
        }
    }
}

#[derive(Args)]
struct Crypt {
    #[command(flatten)]
    components: Components,
    /// 64 hex digits, or @path to a key file
    #[arg(long)]
    key: String,
    /// 16-byte nonce as 32 hex digits
    #[arg(long)]
    nonce: Option<String>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Process exactly one 32-byte block without a mode
    #[arg(long)]
    raw_block: bool,
}

#[derive(Subcommand)]
enum Command {
    /// CTR-mode encryption; writes the nonce as a 16-byte header
    Encrypt(Crypt),
    /// CTR-mode decryption of a file produced by `encrypt`
    Decrypt(Crypt),
    /// Write the deterministic known-answer corpus
    KatGen {
        #[command(flatten)]
        components: Components,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Check a known-answer file on both implementation paths
    KatVerify {
        #[command(flatten)]
        components: Components,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Recompute component properties and wide-trail bounds
    Audit {
        #[command(flatten)]
        components: Components,
        /// Write the JSON report here
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Validate L-box and PermuteSets configuration files
    ValidateConfig {
        #[command(flatten)]
        components: Components,
    },
}

fn crypt_config(c: Crypt) -> CliResult<CryptConfig> {
    Ok(CryptConfig {
        key: parse_key(&c.key)?,
        nonce: c.nonce.as_deref().map(parse_nonce).transpose()?,
        components: c.components.into(),
        input: c.input,
        output: c.output,
        raw_block: c.raw_block,
    })
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let mut stderr = std::io::stderr();
    let mut stdout = std::io::stdout();
    match cli.command {
        Command::Encrypt(c) => cmd_encrypt(&crypt_config(c)?),
        Command::Decrypt(c) => cmd_decrypt(&crypt_config(c)?),
        Command::KatGen { components, output } => {
            cmd_kat_generate(&components.into(), output.as_deref())
        }
        Command::KatVerify { components, input } => {
            cmd_kat_verify(&components.into(), input.as_deref(), &mut stderr)
        }
        Command::Audit { components, output } => {
            cmd_audit(&components.into(), output.as_deref(), &mut stdout).map(|(o, _)| o)
        }
        Command::ValidateConfig { components } => {
            cmd_validate_config(&components.into(), &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("marvin: {e}");
            ExitCode::from(2)
        }
    }
}
