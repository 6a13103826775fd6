//! Special functions, bases, spectra and quadrature oracles on S² and SO(3).

mod legendre;
mod point;
mod quadrature;
mod rotation;
mod sphere;
mod wigner;

pub use legendre::{gauss_legendre, gegenbauer_half, legendre, legendre_series, legendre_table};
pub use point::SpherePoint;
pub use quadrature::{So3Quadrature, SphereQuadrature};
pub use rotation::{rot_x, rot_y, rot_z, rotation_angle, EulerRotation};
pub use sphere::{
    eval_all, eval_all_into, harmonic_dimension, project_sphere, sph_harm, sphere_len, HarmonicIndex, SphereSpectrum,
    DEFAULT_SPHERE_DEGREE, SPHERE_DEGREE_CAP,
};
pub use wigner::{
    complex_to_real, jacobi, little_d, little_d_element, project_so3, representation, representations, wigner_coeff,
    wigner_d_complex, So3Spectrum, DEFAULT_SO3_DEGREE,
};
