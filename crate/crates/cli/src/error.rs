use apgen_core::gl2lab::Gl2Error;
use apgen_core::modsym::ModSymError;
use apgen_core::orbits::OrbitError;
use apgen_core::twists::TwistError;

/// Failures with their process exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("limit exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Verification(_) | AppError::Io(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Budget(_) => 3,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<OrbitError> for AppError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::ModSym(ModSymError::Algebra(_)) => AppError::Verification(e.to_string()),
            OrbitError::UnknownOrbit(_) | OrbitError::ModSym(_) => AppError::Usage(e.to_string()),
            OrbitError::Stuck { .. } => AppError::Budget(e.to_string()),
            _ => AppError::Verification(e.to_string()),
        }
    }
}

impl From<TwistError> for AppError {
    fn from(e: TwistError) -> Self {
        match e {
            TwistError::Orbit(o) => o.into(),
            _ => AppError::Verification(e.to_string()),
        }
    }
}

impl From<Gl2Error> for AppError {
    fn from(e: Gl2Error) -> Self {
        match e {
            Gl2Error::Budget(_) => AppError::Budget(e.to_string()),
            _ => AppError::Usage(e.to_string()),
        }
    }
}
