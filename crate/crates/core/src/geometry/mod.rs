//! Strict convexity, plurisubharmonicity and hulls with separating exponentials.

mod convexity;
mod hull;

pub use convexity::{leray_margin, line_laplacian, min_hessian_eigenvalue, plurisubharmonic_check, strict_convexity, ConvexityReport, PshReport};
pub use hull::{closest_point, exponential_family, hull_estimate, separating_exponential, ClosestPoint, HullReport, SeparatingExponential};
