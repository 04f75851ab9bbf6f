//! Bayer-domain image compression and capsule-imaging analysis primitives.
//!
//! The codec operates directly on 8-bit RGGB mosaics: a reversible integer
//! color transform splits each frame into four half-resolution planes, a
//! fixed-point 4x4 DCT with power-of-two quantization compacts them, and an
//! adaptive Golomb-Rice coder packs the coefficients into 32-bit words.
//! Everything on the encode/decode path is integer arithmetic.
//!
//! On top of the codec sit three analysis components: a Hough-based bubble
//! detector that measures how much of the view is obscured, a frame-rate
//! controller driven by the compression ratio of the latest frame, and an
//! energy model that accounts capture, compression, transmission, and idle
//! costs per study.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file I/O, the CLI,
//! and corpus generation live in the companion `agrb-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bitio;
pub mod bubbles;
pub mod codec;
pub mod controller;
pub mod dct;
pub mod energy;
pub mod entropy;
pub mod error;
pub mod frame;
pub mod metrics;
pub mod quant;
pub mod rct;

pub use codec::{decode_frame, encode_frame, CompressedStream, FrameStats};
pub use error::{Error, Result};
pub use frame::{BayerFrame, PlaneSet};
pub use quant::QuantTable;
