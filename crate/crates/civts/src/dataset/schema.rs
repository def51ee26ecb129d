//! The hourly market CSV schema.
//!
//! Required columns (comma-delimited, header required):
//! - `timestamp`: local market time, `YYYY-MM-DD HH:MM:SS` (or with a `T`)
//! - `load`: demand in MWh/h
//! - `price`: day-ahead clearing price in EUR/MWh
//! - `wind`: wind generation in MWh/h
//!
//! Optional covariate columns, ingested as numbers and usable in the
//! conditioning stage: `solar`, `gas`, `coal`, `eua`, `heating_degrees`,
//! `cooling_degrees`, `holiday_fraction`, `school_holiday_fraction`,
//! `sunlight`. Daily-frequency inputs are expected to repeat their value on
//! every hour of the day. Unknown extra numeric columns are ingested as-is.

/// Column expectations for `load_csv`. The three main series are renamed to
/// the component names W (wind), P (price), and D (load) on ingestion so the
/// estimator catalogue applies directly.
#[derive(Debug, Clone)]
pub struct MarketSchema {
    pub timestamp_column: String,
    pub load_column: String,
    pub price_column: String,
    pub wind_column: String,
    pub known_covariates: Vec<String>,
}

impl Default for MarketSchema {
    fn default() -> Self {
        Self {
            timestamp_column: "timestamp".into(),
            load_column: "load".into(),
            price_column: "price".into(),
            wind_column: "wind".into(),
            known_covariates: Self::KNOWN_COVARIATES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl MarketSchema {
    pub const KNOWN_COVARIATES: [&'static str; 9] = [
        "solar",
        "gas",
        "coal",
        "eua",
        "heating_degrees",
        "cooling_degrees",
        "holiday_fraction",
        "school_holiday_fraction",
        "sunlight",
    ];
}
