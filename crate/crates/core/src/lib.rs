//! Numerical constructions around completeness of exponential systems in
//! weighted `L²` spaces on the circle with a deep zero at the origin.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadrature`]: adaptive Gauss–Kronrod integration on finite intervals,
//!   the left half-line and oscillatory kernels.
//! * [`frequency_sets`]: removed frequency sets `Γ`, sparseness diagnostics and
//!   counting-function checks.
//! * [`weights`]: weights with a deep right-hand zero at `t = 0`.
//! * [`blaschke`]: the slit-plane product `φ` vanishing on `Γ`, its boundary
//!   jump `g`, Cauchy representation and convolution identities.
//! * [`deep_zero`]: the entire function `h` and the odd-square lacunary sine
//!   series `H` with an exponentially deep zero at the origin.
//! * [`probe`]: weighted least-squares projections onto truncated exponential
//!   systems and annihilator tests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod deep_zero;
mod error;
pub mod frequency_sets;
pub mod probe;
pub mod quadrature;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use blaschke::{BlaschkeAnnihilator, JumpFunction};
pub use deep_zero::{DecayFit, DeepZeroSeries};
pub use frequency_sets::{FrequencySet, Generator, SparsityReport, Verdict};
pub use probe::{ProbeConfig, ResidualCurve, Target};
pub use quadrature::{QuadratureResult, Tolerance};
pub use weights::Weight;

/// `sin(x)/x`, accurate near zero for complex arguments.
pub(crate) fn sinc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
