use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_CNL_ABSENT: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] ehom_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    NotConverged(String),
    #[error("central nodal line absent")]
    CnlAbsent,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ehom_core::Error as E;
        match self {
            Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Core(E::QuadratureNotConverged { .. } | E::SeriesNotConverged { .. } | E::RoutesDisagree { .. }) => {
                EXIT_NUMERICAL
            }
            Self::Core(_) => EXIT_CONFIG,
            Self::NotConverged(_) => EXIT_NUMERICAL,
            Self::CnlAbsent => EXIT_CNL_ABSENT,
        }
    }
}
