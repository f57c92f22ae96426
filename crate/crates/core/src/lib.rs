//! Axisymmetric stationary rotating drops.
//!
//! A stationary rotating surface is a compact surface whose mean curvature
//! obeys `2H(x) = a r^2 + b`, with `r` the distance from `x` to the rotation
//! axis. This crate solves the generating profile of the axisymmetric
//! members of that family, classifies them, integrates their geometric
//! quantities, checks the known inequalities against the computed profiles
//! and revolves them into triangle meshes.
//!
//! Module map:
//!
//! - [`analytic`]: closed-form scalars (first integral, curvature, type, `c0`).
//! - [`ode`]: arc-length integration of the profile and mirror closure.
//! - [`quantities`]: area, volume, height, energy and the `Q(N1)` indicator.
//! - [`bounds`]: inequality harness producing [`bounds::BoundReport`]s.
//! - [`mesh`]: revolved meshes, cotangent mean curvature, OBJ export.
//! - [`cli`]: the `rotadrop` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod mesh;
pub mod numeric;
pub mod ode;
pub mod quantities;

pub use analytic::{DropParams, SurfaceType};
pub use error::{DropError, Result};
pub use ode::{ClosedProfile, ProfileCurve, StepControl, StopCondition, StopReason};
