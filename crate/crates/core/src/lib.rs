//! Finite levels of towers of iterated semidirect products `V ⋊ G` built
//! from quotients of relation modules, with exact certificates.

pub mod analysis;
pub mod cert;
pub mod config;
pub mod error;
pub mod ff;
pub mod forge;
pub mod gmodule;
pub mod group;
pub mod relmod;
pub mod report;
pub mod serial;
pub mod tower;
pub mod words;

pub use error::{Error, Result};
