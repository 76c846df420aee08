//! Magic-simplex entanglement atlas for two qutrits and two ququarts.
//!
//! The crate builds the Q-parameterised density matrices, evaluates the
//! PPT, witness, realignment and correlation-matrix criteria on them, and
//! estimates Hilbert-Schmidt probabilities of boolean combinations of those
//! criteria by quasirandom volume sampling.

pub mod atlas;
pub mod criteria;
pub mod crosscheck;
pub mod geometry;
pub mod linalg;
pub mod liqiao;
pub mod optim;
pub mod parallel;
pub mod quasirandom;
pub mod states;
pub mod su_basis;

pub use criteria::{profile, CriteriaProfile, Mode, Predicate, Thresholds};
pub use states::{build_density, Family, QPoint};
