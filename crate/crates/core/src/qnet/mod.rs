//! Convolutional Q-network over a single syndrome perspective.

mod adam;
mod config;
mod network;

pub use adam::{Adam, AdamConfig};
pub use config::{conv_out_len, ConvSpec, Layer, Layout, Precision, QNetworkConfig};
pub use network::{AnyNetwork, QFunction, QNetwork, Real};
