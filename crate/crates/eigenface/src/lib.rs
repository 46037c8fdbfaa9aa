//! Eigenfaces over an SVD backend of choice, and PERCLOS drowsiness scoring.
//!
//! ```
//! use svdlab_core::Algorithm;
//! use svdlab_eigenface::{dataset::synthetic_eyes, train};
//!
//! let samples = synthetic_eyes();
//! let model = train(&samples, None, Algorithm::DivideConquer).unwrap();
//! let c = model.classify(&samples[7].image).unwrap();
//! assert_eq!(c.label, "open");
//! ```

pub mod dataset;
pub mod error;
pub mod format;
pub mod model;
pub mod perclos;
pub mod pgm;

pub use error::{Error, Result};
pub use format::{load_model, save_model};
pub use model::{train, Classification, EigenfaceModel, LabeledImage};
pub use pgm::Image;
