//! Command implementations behind the `duval` binary.

pub mod commands;
pub mod entry;

use clap::ValueEnum;
use duval::gf::FieldError;
use duval::grpscheme::SchemeError;
use duval::intlat::LatticeError;
use duval::mat2::MatError;
use duval::polyinv::PolyError;
use duval::singclass::ClassError;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Selects a scheme: a file, or a catalog type at a prime.
#[derive(clap::Args)]
pub struct Target {
    /// Scheme file (one block).
    #[arg(long, conflicts_with_all = ["ty", "p"])]
    pub input: Option<String>,
    /// Catalog type: A, D, E, or a full tag such as D5 or E8.
    #[arg(long = "type")]
    pub ty: Option<String>,
    /// Index for --type given as a bare letter.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<u64>,
}

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_GATE: u8 = 3;
pub const EXIT_CAP: u8 = 4;

fn field_code(e: &FieldError) -> u8 {
    match e {
        FieldError::FieldTooLarge { .. } => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn mat_code(e: &MatError) -> u8 {
    match e {
        MatError::CapExceeded { .. } => EXIT_CAP,
        MatError::Field(f) => field_code(f),
        _ => EXIT_INVALID,
    }
}

fn scheme_code(e: &SchemeError) -> u8 {
    match e {
        SchemeError::Gate { .. } => EXIT_GATE,
        e if e.is_cap() => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn poly_code(e: &PolyError) -> u8 {
    match e {
        PolyError::Field(f) => field_code(f),
        _ => EXIT_INVALID,
    }
}

/// Process exit status for a failed command.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(s) = cause.downcast_ref::<SchemeError>() {
            return scheme_code(s);
        }
        if let Some(c) = cause.downcast_ref::<ClassError>() {
            return match c {
                ClassError::Field(f) => field_code(f),
                ClassError::Mat(m) => mat_code(m),
                ClassError::Scheme(s) => scheme_code(s),
                ClassError::Poly(p) => poly_code(p),
                _ => EXIT_INVALID,
            };
        }
        if let Some(p) = cause.downcast_ref::<PolyError>() {
            return poly_code(p);
        }
        if let Some(m) = cause.downcast_ref::<MatError>() {
            return mat_code(m);
        }
        if let Some(f) = cause.downcast_ref::<FieldError>() {
            return field_code(f);
        }
        if let Some(LatticeError::Overflow) = cause.downcast_ref::<LatticeError>() {
            return EXIT_CAP;
        }
    }
    EXIT_INVALID
}
