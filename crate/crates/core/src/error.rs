use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample function returned a non-finite value at flat index {index}")]
    Sample { index: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("puncture too close to support on axis {axis}: distance {distance:.4} < {limit:.4}")]
    PunctureTooClose { axis: usize, distance: f64, limit: f64 },
    #[error("restriction of f to a line in direction {axis} is identically zero")]
    DegenerateLine { axis: usize },
    #[error("support touches the zero set on axis {axis}: separation {delta:.4} <= {limit:.4}")]
    SupportTouchesZ { axis: usize, delta: f64, limit: f64 },
    #[error("support radius {radius:.4} on axis {axis} is not inside the unit disc")]
    SupportNotCompact { axis: usize, radius: f64 },
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("moment obstruction: puncture {puncture}, order {order}, normalized value {value:.3e}")]
    MomentObstruction { puncture: usize, order: usize, value: f64 },
    #[error("structure obstruction at {spec}: normalized value {value:.3e}")]
    StructureObstruction { spec: String, value: f64 },
    #[error("form is not closed: normalized dbar {value:.3e} > {tol:.3e}")]
    NotClosed { value: f64, tol: f64 },
    #[error("support leak: tail {tail:.3e} > {tol:.3e} relative")]
    SupportLeak { tail: f64, tol: f64 },
    #[error("condition (*) fails: norm ratio {ratio:.3} under refinement for {what}")]
    StarCondition { what: String, ratio: f64 },
    #[error("recursion depth exceeded ({0})")]
    Depth(usize),
    #[error("format error: {0}")]
    Format(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class. Success is 0; 2 is reserved for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Sample { .. } => 10,
            Error::Domain(_) => 11,
            Error::Grid(_) => 12,
            Error::PunctureTooClose { .. } => 13,
            Error::DegenerateLine { .. } => 14,
            Error::SupportTouchesZ { .. } => 15,
            Error::SupportNotCompact { .. } => 16,
            Error::Geometry(_) => 17,
            Error::MomentObstruction { .. } => 20,
            Error::StructureObstruction { .. } => 21,
            Error::NotClosed { .. } => 22,
            Error::SupportLeak { .. } => 23,
            Error::StarCondition { .. } => 24,
            Error::Depth(_) => 25,
            Error::Format(_) => 30,
            Error::Parse(_) => 31,
            Error::Io(_) => 32,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            Error::Sample { .. } => "SampleError",
            Error::Domain(_) => "DomainError",
            Error::Grid(_) => "GridError",
            Error::PunctureTooClose { .. } => "PunctureTooCloseError",
            Error::DegenerateLine { .. } => "DegenerateLineError",
            Error::SupportTouchesZ { .. } => "SupportTouchesZError",
            Error::SupportNotCompact { .. } => "SupportNotCompactError",
            Error::Geometry(_) => "GeometryError",
            Error::MomentObstruction { .. } => "MomentObstructionError",
            Error::StructureObstruction { .. } => "StructureObstructionError",
            Error::NotClosed { .. } => "NotClosedError",
            Error::SupportLeak { .. } => "SupportLeakError",
            Error::StarCondition { .. } => "StarConditionError",
            Error::Depth(_) => "DepthError",
            Error::Format(_) => "FormatError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
