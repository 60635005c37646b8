#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod dist;
pub mod entropy;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod gof;
pub mod modality;
pub mod quad;
pub mod report;
pub mod specfun;

pub use dataset::Dataset;
pub use dist::{BWeibull, ContinuousDistribution, ParamVector, TailRate};
pub use error::{Error, Result};
pub use exec::Exec;
pub use gof::{Convention, GofResult};
