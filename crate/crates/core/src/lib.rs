//! Supervised learning for single-layer spiking neurons by linear constraint
//! satisfaction.
//!
//! Every weight update solves a small linear program whose variables scale
//! the learning-window contribution of each desired and each erroneous output
//! spike, so that all threshold constraints of a pattern hold simultaneously.

pub mod neuron;
pub mod linsolve;
pub mod metrics;
pub mod datagen;
pub mod learning;
pub mod baselines;
