//! Mining compact sets of multivariate sequential patterns by minimizing a
//! two-part description length.
//!
//! A dataset is a set of sequences of events, each event carrying one
//! categorical value per attribute. The miner grows patterns bottom-up from
//! single values, keeps a candidate only when it shortens the total encoding
//! of model plus data, and tolerates one substituted value per event through
//! dedicated miss codes. Candidate pairs can be pre-filtered by how often the
//! two patterns occur in the same segments, estimated with weighted MinHash.
//!
//! ```no_run
//! use mvpattern::{generate_dataset, mine, MinerConfig, SyntheticSpec};
//!
//! let (data, _truth) = generate_dataset(&SyntheticSpec::default())?;
//! let result = mine(&data, &MinerConfig::default())?;
//! for p in result.patterns() {
//!     println!("{}", p.display(data.schema()));
//! }
//! # Ok::<(), mvpattern::Error>(())
//! ```

pub mod candidates;
pub mod cli;
pub mod codetable;
pub mod cover;
pub mod error;
pub mod io;
pub mod lsh;
pub mod matcher;
pub mod miner;
pub mod model;
pub mod synth;

pub use codetable::{CodeTable, PatternId, UsageStats};
pub use cover::{cover_dataset, cover_sequence, decode, encode_cover, Cover};
pub use error::{Error, Result};
pub use matcher::{brute_force_occurrences, search_occurrences, Occurrence};
pub use miner::{mine, MinerConfig, MiningReport, MiningResult};
pub use model::{Event, EventDataset, Pattern, Schema, ValueId};
pub use synth::{evaluate, generate_dataset, PlantedTruth, SyntheticSpec};
