//! Quadrature over loops, tori, spheres and volumes, and the integral operators built on it.

mod domain;
mod line;
mod operators;
mod quadrature;

pub use domain::{hopf_point, sphere_patch, BoundaryNode, DomainKind, DomainSpec};
pub use line::{cauchy_line, torus_cauchy_green, TorusResult, TorusSpec};
pub use operators::{
    bm_boundary, bm_volume, boundary_flux, BoundaryRule, boundary_operator, integrate_form, leray_l, leray_r, IntegralRecord, VolumeOptions,
};
pub use quadrature::{
    integrate_cube, mc_result, ordered_sum, rule_1d, sphere_area, sphere_samples, tensor_nodes, uniform_samples, CompensatedSum,
    QuadResult, QuadratureSpec, Scheme,
};
