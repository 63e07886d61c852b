mod generator;
mod measure;
mod multiscale;
mod rng;
mod space;

pub use generator::{fattening_mass, sample_empirical, Generator, GeneratorKind, GeneratorSpec, SampleInfo};
pub use measure::{DiscreteMeasure, MASS_TOL};
pub use multiscale::{DeltaSequence, MultiscaleMeasure};
pub use rng::{derive_seed, stream_rng, Rng};
pub use space::{GroundSpace, Norm};
