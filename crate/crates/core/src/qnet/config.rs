use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub filters: usize,
    pub kernel: usize,
    pub stride: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F64,
    F32,
}

/// Architecture of the Q-network: a stack of stride-2 convolutions with
/// circular padding, ReLU fully connected layers, and a linear 4-way head.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QNetworkConfig {
    pub d: usize,
    #[serde(default = "default_conv")]
    pub conv: Vec<ConvSpec>,
    #[serde(default = "default_fc")]
    pub fc: Vec<usize>,
    #[serde(default = "default_outputs")]
    pub outputs: usize,
    #[serde(default)]
    pub precision: Precision,
}

fn default_conv() -> Vec<ConvSpec> {
    vec![
        ConvSpec {
            filters: 512,
            kernel: 3,
            stride: 2,
        },
        ConvSpec {
            filters: 256,
            kernel: 3,
            stride: 2,
        },
        ConvSpec {
            filters: 256,
            kernel: 3,
            stride: 2,
        },
    ]
}

fn default_fc() -> Vec<usize> {
    vec![256, 128, 64, 32]
}

fn default_outputs() -> usize {
    4
}

impl QNetworkConfig {
    /// Default architecture for a d×d lattice.
    pub fn standard(d: usize) -> Self {
        Self {
            d,
            conv: default_conv(),
            fc: default_fc(),
            outputs: 4,
            precision: Precision::F64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 3 || self.d.is_multiple_of(2) {
            return Err(Error::InvalidDimension(self.d));
        }
        if self.outputs != 4 {
            return Err(Error::InvalidConfig(format!(
                "output layer must have 4 units, got {}",
                self.outputs
            )));
        }
        for c in &self.conv {
            if c.filters == 0 || c.stride == 0 || c.kernel % 2 == 0 {
                return Err(Error::InvalidConfig(format!(
                    "unsupported conv layer {c:?}: need filters>0, stride>0, odd kernel"
                )));
            }
        }
        if self.fc.contains(&0) {
            return Err(Error::InvalidConfig(
                "fully connected layers need at least one unit".into(),
            ));
        }
        Ok(())
    }
}

/// One layer's geometry and its slice of the flat parameter vector.
///
/// Convolution weights are a row-major `(k*k*C_in) × F` matrix whose row
/// index is `(ky*k + kx)*C_in + c`; dense weights are `inputs × outputs`.
/// Biases follow their weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Conv {
        in_h: usize,
        in_w: usize,
        in_c: usize,
        out_h: usize,
        out_w: usize,
        filters: usize,
        kernel: usize,
        stride: usize,
        w_off: usize,
        b_off: usize,
    },
    Dense {
        inputs: usize,
        outputs: usize,
        relu: bool,
        w_off: usize,
        b_off: usize,
    },
}

impl Layer {
    pub fn fan_in(&self) -> usize {
        match *self {
            Layer::Conv { in_c, kernel, .. } => kernel * kernel * in_c,
            Layer::Dense { inputs, .. } => inputs,
        }
    }

    pub fn weight_range(&self) -> std::ops::Range<usize> {
        match *self {
            Layer::Conv { w_off, b_off, .. } | Layer::Dense { w_off, b_off, .. } => w_off..b_off,
        }
    }

    pub fn bias_range(&self) -> std::ops::Range<usize> {
        match *self {
            Layer::Conv { b_off, filters, .. } => b_off..b_off + filters,
            Layer::Dense { b_off, outputs, .. } => b_off..b_off + outputs,
        }
    }

    /// Activations produced per sample.
    pub fn out_len(&self) -> usize {
        match *self {
            Layer::Conv {
                out_h,
                out_w,
                filters,
                ..
            } => out_h * out_w * filters,
            Layer::Dense { outputs, .. } => outputs,
        }
    }
}

/// Output side length of a stride-`s` convolution with circular "same"
/// padding: ceiling division, never below 1.
pub fn conv_out_len(len: usize, stride: usize) -> usize {
    len.div_ceil(stride).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub layers: Vec<Layer>,
    pub n_params: usize,
}

impl Layout {
    pub fn new(cfg: &QNetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let mut layers = Vec::new();
        let mut off = 0;
        let (mut h, mut w, mut c) = (cfg.d, cfg.d, 1);
        for spec in &cfg.conv {
            let (oh, ow) = (conv_out_len(h, spec.stride), conv_out_len(w, spec.stride));
            let w_off = off;
            let b_off = w_off + spec.kernel * spec.kernel * c * spec.filters;
            off = b_off + spec.filters;
            layers.push(Layer::Conv {
                in_h: h,
                in_w: w,
                in_c: c,
                out_h: oh,
                out_w: ow,
                filters: spec.filters,
                kernel: spec.kernel,
                stride: spec.stride,
                w_off,
                b_off,
            });
            (h, w, c) = (oh, ow, spec.filters);
        }
        let mut inputs = h * w * c;
        let widths = cfg
            .fc
            .iter()
            .map(|&n| (n, true))
            .chain(std::iter::once((cfg.outputs, false)));
        for (outputs, relu) in widths {
            let w_off = off;
            let b_off = w_off + inputs * outputs;
            off = b_off + outputs;
            layers.push(Layer::Dense {
                inputs,
                outputs,
                relu,
                w_off,
                b_off,
            });
            inputs = outputs;
        }
        Ok(Self {
            layers,
            n_params: off,
        })
    }
}
