//! Error type shared by all solver modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the integrator, the shooting layers, and the oracle.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The adaptive integrator was forced below its minimum step size,
    /// typically by a near-singular field.
    #[error("step size underflow at t = {t:.6e} (step would fall below {floor:.3e})")]
    StepSizeUnderflow { t: f64, floor: f64 },

    /// The right-hand side returned NaN or infinity.
    #[error("field slope is non-finite at t = {t:.6e}")]
    NonFiniteField { t: f64 },

    /// A lift change could not be matched to any winding target within
    /// 0.3 rad; the shot is not a connector.
    #[error("lift change {delta_lift:.6} is not within 0.3 rad of a winding target")]
    NotNearTarget { delta_lift: f64 },

    /// Evaluation requested on the singular domain boundary.
    #[error("argument {value:.6e} lies on the domain boundary")]
    DomainBoundary { value: f64 },

    /// The lambda scan range contained no sign change for the requested
    /// winding; callers may widen the range.
    #[error("no lambda bracket for N_Theta = {n_theta} in [{lo:.4}, {hi:.4}]")]
    BracketNotFound { n_theta: i32, lo: f64, hi: f64 },

    /// The energy scan over the spectral gap found no sign change.
    #[error("no energy root in ({lo:.6}, {hi:.9}) at {points} scan points")]
    NoRootInGap { lo: f64, hi: f64, points: usize },

    /// More than one energy root was found for a single winding class.
    #[error("multiple energy roots for one winding class: {energies:?}")]
    MultipleRoots { energies: Vec<f64> },

    /// The doubling test failed: the radial cutoff is too small.
    #[error("cutoff too small: tail residual {residual:.3e} exceeds {limit:.3e}")]
    CutoffTooSmall { residual: f64, limit: f64 },

    /// Measured amplitude tail slope is incompatible with a bound state.
    #[error("radial tail log-slope {measured:.4} differs from -eta = {expected:.4} by more than 10%")]
    NonDecayingTail { measured: f64, expected: f64 },

    /// The hydrogenic state `k > 0, M = 0` does not exist.
    #[error("hydrogen state M = {m}, k = {k} is excluded")]
    ExcludedState { m: u32, k: i32 },

    /// Confluent hypergeometric series with non-terminating first parameter.
    #[error("confluent series F({alpha}, ..) does not terminate")]
    NonTerminating { alpha: i32 },

    /// The angular index N of the a = 0 operator must be nonzero.
    #[error("angular index N = 0 is not a valid eigenstate index")]
    ZeroN,

    /// The winding index maps to no valid spectroscopic label.
    #[error("winding index (N_Theta = {n_theta}, N_Omega = {n_omega}, 2kappa = {two_kappa}) has no spectroscopic label")]
    InvalidIndex {
        n_theta: i32,
        n_omega: i32,
        two_kappa: i32,
    },

    /// Inconsistent spectroscopic quantum numbers.
    #[error("invalid spectroscopic label: {reason}")]
    InvalidLabel { reason: String },

    /// Malformed input parameter.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}
