pub mod combinat;
pub mod error;
pub mod extrep;
pub mod forms;
pub mod liealg;
pub mod linalg;
pub mod normalizer;
pub mod ring;
pub mod sample;
pub mod verify;

pub use combinat::{Subset, SubsetIndex};
pub use error::{Error, Result};
pub use extrep::RepMatrix;
pub use forms::{MultilinearForm, Truth};
pub use linalg::{solve_homogeneous, Matrix, SolutionSpace};
pub use ring::{Ring, RingElem, RingKind};
