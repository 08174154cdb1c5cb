//! Benchmark data: synthetic low-rank instances, evaluation metrics, and
//! readers/writers for the matrix, MovieLens and PNM image formats.

pub mod image;
pub mod io;
pub mod metrics;
pub mod movielens;
pub mod synthetic;

pub use image::{mask_uniform, Image};
pub use metrics::{nmae, psnr, rel_err};
pub use movielens::{load_movielens, MovieLensSplit};
pub use synthetic::{gen_lowrank, substream, trial_seed, SyntheticSpec};
