//! The scaled Shepard operator and the quantities of its error estimate.

mod constants;
mod kernel;
mod model;
mod modulus;
mod study;

pub use constants::{constant_c_alpha_d, constant_c_star, constant_k_d, ConstantPair};
pub use kernel::{
    kernel_gaussian, kernel_inverse_multiquadric, KernelDescriptor, KernelKind, KernelSpec, RadialProfile,
};
pub use model::{
    error_budget, model_modulus, scaled_sum_extremes, sup_error, Dilation, ErrorBudget, ModelExport,
    SampledSup, ShepardModel, SumExtremes,
};
pub use modulus::{
    empirical_modulus, modulus_of_continuity, Modulus, ModulusKind, ModulusMode, TestFunction,
};
pub use study::{convergence_study, fit_slope, StudyOptions, StudyRecord, StudyRow, EXACT_TOLERANCE};
