//! Time series data model, CSV ingestion, feature construction and
//! synthetic generators.

mod climate;
mod csv_io;
mod features;
mod period;
mod synthetic;
mod timeseries;

pub use climate::{align_climate, apply_aligned_climate};
pub use csv_io::{
    load_csv, load_monthly_csv, read_csv, read_monthly_csv, save_csv, write_csv, CsvSchema,
};
pub use features::{build_features, Design, DesignView, FeatureMap, FeatureVector};
pub use period::{Month, PeriodParseError, Quarter};
pub use synthetic::{
    gen_synthetic, simulate_values, synthetic_start, SyntheticFamily, SyntheticSpec, BURN_IN,
};
pub use timeseries::{GdpRow, TimeSeries, GDP_COLUMNS};
