use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no non-coplanar K4 seed found")]
    NoSeed,
    #[error("seed distances are degenerate")]
    DegenerateDistances,
    #[error("anchors do not span the ambient space")]
    DegenerateAnchors,
    #[error("distances are inconsistent (residual {residual:e})")]
    InconsistentDistances { residual: f64 },
    #[error("no Hamiltonian path")]
    NoHamiltonianPath,
    #[error("chord {u}-{v} inconsistent: measured {measured}, embedded {embedded}")]
    ChordInconsistency {
        u: usize,
        v: usize,
        measured: f64,
        embedded: f64,
    },
    #[error("points are affinely dependent")]
    DegeneratePoints,
    #[error("support vertices are degenerate")]
    DegenerateSupports,
    #[error("correspondence is not isometric (mismatch {mismatch:e})")]
    NonIsometric { mismatch: f64 },
    #[error("group {group} admits more than one placement")]
    AmbiguousPlacement { group: usize },
    #[error("not localizable (group {group:?})")]
    NotLocalizable { group: Option<usize> },
    #[error("{what} exceeds size limit {limit}")]
    SizeLimit { what: &'static str, limit: usize },
    #[error("too few common points: {found} < {needed}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("{stage} (group {group:?}): {source}")]
    Stage {
        stage: &'static str,
        group: Option<usize>,
        #[source]
        source: Box<Error>,
    },
    #[error("timeout")]
    Timeout,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InvalidConfig(_) => "invalid-config",
            Error::NoSeed => "no-seed",
            Error::DegenerateDistances => "degenerate-distances",
            Error::DegenerateAnchors => "degenerate-anchors",
            Error::InconsistentDistances { .. } => "inconsistent-distances",
            Error::NoHamiltonianPath => "no-hamiltonian-path",
            Error::ChordInconsistency { .. } => "chord-inconsistency",
            Error::DegeneratePoints => "degenerate-points",
            Error::DegenerateSupports => "degenerate-supports",
            Error::NonIsometric { .. } => "non-isometric-correspondence",
            Error::AmbiguousPlacement { .. } => "ambiguous-placement",
            Error::NotLocalizable { .. } => "not-localizable",
            Error::SizeLimit { .. } => "size-cap",
            Error::TooFewPoints { .. } => "too-few-points",
            Error::Stage { source, .. } => source.code(),
            Error::Timeout => "timeout",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub fn in_stage(self, stage: &'static str, group: Option<usize>) -> Error {
        Error::Stage {
            stage,
            group,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
