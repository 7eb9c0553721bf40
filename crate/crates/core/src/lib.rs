// SPDX-License-Identifier: Apache-2.0

pub mod error;
pub mod experiment;
pub mod gauss;
pub mod leadlag;
pub mod linalg;
pub mod magnetic;
pub mod stats;
pub mod tensor2;

pub use error::{Error, Result};
pub use nalgebra;
