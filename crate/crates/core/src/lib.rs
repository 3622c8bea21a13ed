//! BB84 with a binary light-source side channel: state models, side-channel
//! measurements, soft filtering, cloning attacks, key rates and critical
//! error rates as a function of Hong-Ou-Mandel visibility.

pub mod channel;
pub mod cloners;
pub mod error;
pub mod filtering;
pub mod hom;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod optimize;
pub mod rates;
pub mod strategies;
pub mod sweep;

pub use channel::CpMap;
pub use cloners::{PhaseCovariantSpec, TwoStateSpec};
pub use error::{Error, Result};
pub use filtering::{GramOperator, SoftFilter};
pub use hom::VisibilityPoint;
pub use linalg::{DensityOperator, PureState};
pub use measure::{MeResult, Povm, UsdResult};
pub use model::{Basis, Label, SideChannelModel, SideOutcome, WeightedEnsemble};
pub use rates::{CriticalPoint, RateConvention, RateInputs, RateOptions, StrategyReport};
pub use strategies::{AttackOutcome, AttackRun, FailureAccounting, Strategy};
pub use sweep::{SweepRow, CSV_HEADER};
