//! Monte Carlo aggregation: frequency tables, σ-gated comparison against
//! analytic distributions, CHSH values and report serialization.

mod chsh;
mod report;
mod table;

pub use chsh::{chsh, chsh_sampled, ChshConfig, ChshEstimate, ChshSetting};
pub use report::{format_f64, rows_to_csv, to_json_string, RunReport};
pub use table::{
    compare, compare_two_sample, tabulate, tabulate_stage, Comparison, ComparisonRow, FrequencyEntry, FrequencyTable,
};
