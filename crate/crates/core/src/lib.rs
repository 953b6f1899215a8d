//! Volumes enclosed by the flux surfaces of integrable magnetic fields.
//!
//! The crate provides two analytic field models (an axisymmetric tokamak and
//! a tokamak with one resonant helical perturbation), a field-line tracer with
//! return-time detection, flux-surface geometry on the poloidal section, and
//! five ways of computing the enclosed volume:
//!
//! * direct sampling of the section weighted by the transit time,
//! * a contour integral of the transit time over a level set,
//! * the return-time formula for axisymmetric fields,
//! * the lattice determinant divided by the harmonic mean of the density,
//! * the averaged return time times the magnetic flux through a u-line.

pub mod checks;
pub mod coords;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod io;
pub mod ode;
pub mod roots;
pub mod surfaces;
pub mod tables;
pub mod tracer;
pub mod volume;

pub use error::{Error, Result};
pub use fields::{AnyField, AxisymParams, Axisymmetric, Chart, FieldModel, Helical, HelicalParams, Rhs, State};
pub use ode::Tolerances;
pub use surfaces::{CriticalSet, LevelSetContour, Region};
pub use tracer::{CrossingEvent, Section, TraceSpec, Trajectory, UlineSearch};
pub use volume::{GridSpec, Method, MethodOptions, PsiLadder, VolumeProfile};
