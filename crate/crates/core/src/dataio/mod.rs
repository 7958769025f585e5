//! Heat-capacity tables: loading, the condensate linear-law fit, the Debye
//! fit, and information-criterion model comparison.

mod compare;
mod fit;
mod series;

pub use compare::{
    compare_many, compare_models, Candidate, CandidateResult, Comparison, ModelSpec,
};
pub use fit::{
    fit_debye, fit_linear_law, DebyeOptions, FitReport, LinearLawOptions, Parameter, Residual,
    CONDENSATE_LINEAR_ID, DEBYE_ID,
};
pub use series::{
    load_series, parse_series, save_series, DataPoint, HeatCapacitySeries, SeriesFormat, HEADER,
};
