//! Exact-arithmetic engine for combinatorial Dyson-Schwinger equations in the
//! Connes-Kreimer Hopf algebra of decorated rooted trees.

pub mod algebra;
pub mod combinat;
pub mod error;
pub mod forest;
pub mod linalg;
pub mod prelie;
pub mod rational;
pub mod series;
pub mod solver;
pub mod sysfile;
pub mod systems;

pub use algebra::{ForestSum, TensorSum};
pub use error::{Error, Result};
pub use forest::{Catalog, Decoration, Forest, Tree};
pub use rational::Q;
pub use series::{SeriesExpr, TruncatedSeries};
pub use solver::{Mode, Sdse, Solution};
