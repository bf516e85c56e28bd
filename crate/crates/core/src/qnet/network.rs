use std::fmt::Debug;
use std::sync::Arc;

use num_traits::Float;
use rand::Rng;

use super::config::{Layer, Layout, QNetworkConfig};
use crate::error::{Error, Result};
use crate::perspective::ActionId;
use crate::rng;

/// Floating point type the network computes in.
pub trait Real: Float + Default + Debug + Send + Sync + 'static {
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;

    /// Row-major strided `C = alpha * A * B + beta * C` with `A: m×k`, `B: k×n`.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        a_t: bool,
        b: &[Self],
        b_t: bool,
        c: &mut [Self],
        beta: Self,
    );
}

macro_rules! impl_real {
    ($t:ty, $gemm:path) => {
        impl Real for $t {
            #[inline]
            fn of(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                a: &[Self],
                a_t: bool,
                b: &[Self],
                b_t: bool,
                c: &mut [Self],
                beta: Self,
            ) {
                assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
                // Stored shapes: A is m×k (or k×m if transposed), B is k×n (or n×k).
                let (rsa, csa) = if a_t {
                    (1, m as isize)
                } else {
                    (k as isize, 1)
                };
                let (rsb, csb) = if b_t {
                    (1, k as isize)
                } else {
                    (n as isize, 1)
                };
                // SAFETY: the length assertion above bounds every strided access.
                unsafe {
                    $gemm(
                        m,
                        k,
                        n,
                        1.0,
                        a.as_ptr(),
                        rsa,
                        csa,
                        b.as_ptr(),
                        rsb,
                        csb,
                        beta,
                        c.as_mut_ptr(),
                        n as isize,
                        1,
                    );
                }
            }
        }
    };
}

impl_real!(f64, matrixmultiply::dgemm);
impl_real!(f32, matrixmultiply::sgemm);

/// The Q-network: parameters plus the layout that interprets them.
#[derive(Clone, Debug)]
pub struct QNetwork<T: Real> {
    config: QNetworkConfig,
    layout: Arc<Layout>,
    params: Vec<T>,
}

/// Per-layer activations kept for the backward pass.
struct Tape<T> {
    /// Layer inputs: im2col matrices for convolutions, plain inputs for dense.
    inputs: Vec<Vec<T>>,
    /// Post-activation outputs.
    outputs: Vec<Vec<T>>,
}

impl<T: Real> QNetwork<T> {
    /// He-uniform weights (bound `sqrt(6 / fan_in)`), zero biases.
    pub fn new(config: QNetworkConfig, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(config)?;
        let mut rng = rng::seeded(seed);
        for layer in &net.layout.layers {
            let bound = (6.0 / layer.fan_in() as f64).sqrt();
            for w in &mut net.params[layer.weight_range()] {
                *w = T::of(rng.gen_range(-bound..bound));
            }
        }
        Ok(net)
    }

    pub fn zeros(config: QNetworkConfig) -> Result<Self> {
        let layout = Layout::new(&config)?;
        let params = vec![T::zero(); layout.n_params];
        Ok(Self {
            config,
            layout: Arc::new(layout),
            params,
        })
    }

    pub fn from_params(config: QNetworkConfig, params: Vec<T>) -> Result<Self> {
        let mut net = Self::zeros(config)?;
        if params.len() != net.params.len() {
            return Err(Error::ShapeMismatch {
                expected: net.params.len(),
                found: params.len(),
            });
        }
        net.params = params;
        Ok(net)
    }

    pub fn config(&self) -> &QNetworkConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn d(&self) -> usize {
        self.config.d
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    /// Overwrite parameters with those of `other` (same architecture).
    pub fn copy_from(&mut self, other: &QNetwork<T>) {
        assert_eq!(self.params.len(), other.params.len());
        self.params.copy_from_slice(&other.params);
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    fn check_input(&self, grids: &[u8]) -> Result<usize> {
        let cells = self.config.d * self.config.d;
        if grids.is_empty() || !grids.len().is_multiple_of(cells) {
            return Err(Error::ShapeMismatch {
                expected: cells,
                found: grids.len(),
            });
        }
        Ok(grids.len() / cells)
    }

    /// Q-values for a single d×d grid.
    pub fn forward(&self, grid: &[u8]) -> Result<[T; 4]> {
        let cells = self.config.d * self.config.d;
        if grid.len() != cells {
            return Err(Error::ShapeMismatch {
                expected: cells,
                found: grid.len(),
            });
        }
        Ok(self.forward_batch(grid)?[0])
    }

    /// Q-values for a batch of concatenated row-major grids.
    pub fn forward_batch(&self, grids: &[u8]) -> Result<Vec<[T; 4]>> {
        let batch = self.check_input(grids)?;
        let out = self.run(grids, batch, None);
        Ok(out
            .chunks_exact(4)
            .map(|q| [q[0], q[1], q[2], q[3]])
            .collect())
    }

    fn run(&self, grids: &[u8], batch: usize, mut tape: Option<&mut Tape<T>>) -> Vec<T> {
        let mut x: Vec<T> = grids
            .iter()
            .map(|&v| if v != 0 { T::one() } else { T::zero() })
            .collect();
        for layer in &self.layout.layers {
            let (input, out) = match *layer {
                Layer::Conv { filters, .. } => {
                    let cols = im2col(layer, &x, batch);
                    let rows = cols.len() / layer.fan_in();
                    let mut out = bias_rows(&self.params[layer.bias_range()], rows);
                    T::gemm(
                        rows,
                        layer.fan_in(),
                        filters,
                        &cols,
                        false,
                        &self.params[layer.weight_range()],
                        false,
                        &mut out,
                        T::one(),
                    );
                    relu(&mut out);
                    (cols, out)
                }
                Layer::Dense {
                    inputs,
                    outputs,
                    relu: act,
                    ..
                } => {
                    let mut out = bias_rows(&self.params[layer.bias_range()], batch);
                    T::gemm(
                        batch,
                        inputs,
                        outputs,
                        &x,
                        false,
                        &self.params[layer.weight_range()],
                        false,
                        &mut out,
                        T::one(),
                    );
                    if act {
                        relu(&mut out);
                    }
                    (std::mem::take(&mut x), out)
                }
            };
            match tape.as_deref_mut() {
                Some(t) => {
                    t.inputs.push(input);
                    t.outputs.push(out.clone());
                }
                None => drop(input),
            }
            x = out;
        }
        x
    }

    /// Gradient of `½ (target − q(s, a))²` for a single grid.
    pub fn backward(&self, grid: &[u8], action: ActionId, target: T) -> Result<Vec<T>> {
        let cells = self.config.d * self.config.d;
        if grid.len() != cells {
            return Err(Error::ShapeMismatch {
                expected: cells,
                found: grid.len(),
            });
        }
        let mut grads = vec![T::zero(); self.params.len()];
        self.backward_batch(grid, &[action], &[target], &mut grads)?;
        Ok(grads)
    }

    /// Accumulates into `grads` the gradient of the mean over the batch of
    /// `½ (target_i − q(s_i, a_i))²`. Returns that mean loss.
    pub fn backward_batch(
        &self,
        grids: &[u8],
        actions: &[ActionId],
        targets: &[T],
        grads: &mut [T],
    ) -> Result<T> {
        let batch = self.check_input(grids)?;
        if actions.len() != batch || targets.len() != batch {
            return Err(Error::ShapeMismatch {
                expected: batch,
                found: actions.len().min(targets.len()),
            });
        }
        if grads.len() != self.params.len() {
            return Err(Error::ShapeMismatch {
                expected: self.params.len(),
                found: grads.len(),
            });
        }
        let mut tape = Tape {
            inputs: Vec::new(),
            outputs: Vec::new(),
        };
        let q = self.run(grids, batch, Some(&mut tape));
        let scale = T::one() / T::of(batch as f64);
        let mut loss = T::zero();
        let mut delta = vec![T::zero(); batch * 4];
        for i in 0..batch {
            let a = actions[i].index();
            let residual = q[i * 4 + a] - targets[i];
            loss = loss + T::of(0.5) * residual * residual;
            delta[i * 4 + a] = residual * scale;
        }

        for (li, layer) in self.layout.layers.iter().enumerate().rev() {
            let input = &tape.inputs[li];
            let output = &tape.outputs[li];
            let has_relu = matches!(layer, Layer::Conv { .. } | Layer::Dense { relu: true, .. });
            if has_relu {
                for (g, &o) in delta.iter_mut().zip(output) {
                    if o <= T::zero() {
                        *g = T::zero();
                    }
                }
            }
            let fan_in = layer.fan_in();
            let width = match *layer {
                Layer::Conv { filters, .. } => filters,
                Layer::Dense { outputs, .. } => outputs,
            };
            let rows = delta.len() / width;
            // dW += inputᵀ · delta
            T::gemm(
                fan_in,
                rows,
                width,
                input,
                true,
                &delta,
                false,
                &mut grads[layer.weight_range()],
                T::one(),
            );
            let db = &mut grads[layer.bias_range()];
            for row in delta.chunks_exact(width) {
                for (g, &v) in db.iter_mut().zip(row) {
                    *g = *g + v;
                }
            }
            if li == 0 {
                break;
            }
            // d input = delta · Wᵀ
            let mut dinput = vec![T::zero(); rows * fan_in];
            T::gemm(
                rows,
                width,
                fan_in,
                &delta,
                false,
                &self.params[layer.weight_range()],
                true,
                &mut dinput,
                T::zero(),
            );
            delta = match *layer {
                Layer::Conv { .. } => col2im(layer, &dinput, batch),
                Layer::Dense { .. } => dinput,
            };
        }
        Ok(loss * scale)
    }
}

/// Anything that scores the four central edges of a batch of perspective grids.
pub trait QFunction: Sync {
    /// Lattice dimension the function expects.
    fn d(&self) -> usize;

    /// Q-values for concatenated row-major d×d grids.
    fn q_values(&self, grids: &[u8]) -> Result<Vec<[f64; 4]>>;
}

impl<T: Real> QFunction for QNetwork<T> {
    fn d(&self) -> usize {
        self.config.d
    }

    fn q_values(&self, grids: &[u8]) -> Result<Vec<[f64; 4]>> {
        Ok(self
            .forward_batch(grids)?
            .into_iter()
            .map(|q| q.map(T::as_f64))
            .collect())
    }
}

/// A network at either precision, as loaded from a checkpoint.
#[derive(Clone, Debug)]
pub enum AnyNetwork {
    F64(QNetwork<f64>),
    F32(QNetwork<f32>),
}

impl AnyNetwork {
    pub fn config(&self) -> &QNetworkConfig {
        match self {
            AnyNetwork::F64(n) => n.config(),
            AnyNetwork::F32(n) => n.config(),
        }
    }
}

impl QFunction for AnyNetwork {
    fn d(&self) -> usize {
        self.config().d
    }

    fn q_values(&self, grids: &[u8]) -> Result<Vec<[f64; 4]>> {
        match self {
            AnyNetwork::F64(n) => n.q_values(grids),
            AnyNetwork::F32(n) => n.q_values(grids),
        }
    }
}

fn relu<T: Real>(v: &mut [T]) {
    for x in v {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
}

fn bias_rows<T: Real>(bias: &[T], rows: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(bias.len() * rows);
    for _ in 0..rows {
        out.extend_from_slice(bias);
    }
    out
}

/// Source cell of kernel tap `tap` for output coordinate `o` (circular padding).
#[inline]
fn tap_source(o: usize, tap: usize, stride: usize, kernel: usize, len: usize) -> usize {
    (o * stride + tap + len * kernel - kernel / 2) % len
}

/// NHWC input → `(B*Ho*Wo) × (k*k*C)` patch matrix.
fn im2col<T: Real>(layer: &Layer, x: &[T], batch: usize) -> Vec<T> {
    let Layer::Conv {
        in_h,
        in_w,
        in_c,
        out_h,
        out_w,
        kernel,
        stride,
        ..
    } = *layer
    else {
        unreachable!()
    };
    let k2c = kernel * kernel * in_c;
    let mut cols = vec![T::zero(); batch * out_h * out_w * k2c];
    let mut row = 0;
    for b in 0..batch {
        let img = &x[b * in_h * in_w * in_c..(b + 1) * in_h * in_w * in_c];
        for oy in 0..out_h {
            for ox in 0..out_w {
                let dst = &mut cols[row * k2c..(row + 1) * k2c];
                for ky in 0..kernel {
                    let iy = tap_source(oy, ky, stride, kernel, in_h);
                    for kx in 0..kernel {
                        let ix = tap_source(ox, kx, stride, kernel, in_w);
                        let src = (iy * in_w + ix) * in_c;
                        let at = (ky * kernel + kx) * in_c;
                        dst[at..at + in_c].copy_from_slice(&img[src..src + in_c]);
                    }
                }
                row += 1;
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatter-add patch gradients back onto the input.
fn col2im<T: Real>(layer: &Layer, dcols: &[T], batch: usize) -> Vec<T> {
    let Layer::Conv {
        in_h,
        in_w,
        in_c,
        out_h,
        out_w,
        kernel,
        stride,
        ..
    } = *layer
    else {
        unreachable!()
    };
    let k2c = kernel * kernel * in_c;
    let mut dx = vec![T::zero(); batch * in_h * in_w * in_c];
    let mut row = 0;
    for b in 0..batch {
        let img = &mut dx[b * in_h * in_w * in_c..(b + 1) * in_h * in_w * in_c];
        for oy in 0..out_h {
            for ox in 0..out_w {
                let src = &dcols[row * k2c..(row + 1) * k2c];
                for ky in 0..kernel {
                    let iy = tap_source(oy, ky, stride, kernel, in_h);
                    for kx in 0..kernel {
                        let ix = tap_source(ox, kx, stride, kernel, in_w);
                        let dst = (iy * in_w + ix) * in_c;
                        let at = (ky * kernel + kx) * in_c;
                        for c in 0..in_c {
                            img[dst + c] = img[dst + c] + src[at + c];
                        }
                    }
                }
                row += 1;
            }
        }
    }
    dx
}
