//! Differentiable mesh deformation that cannot produce self-intersections.
//!
//! Meshes deform through a sequence of steps. In each step every vertex moves
//! along one shared direction by a non-negative distance; the distances are
//! the solution of a small linear program whose constraints keep every pair
//! of overlapping faces in their original depth order. Gradients flow back
//! through the program's active constraints, so the whole chain can sit
//! inside a gradient-based fitting loop.
//!
//! Modules, bottom-up:
//!
//! - [`mesh`]: the mesh type, icosphere generation, OBJ I/O, smoothness energies
//! - [`geometry`]: projection frames, triangle clipping, barycentric
//!   coordinates, broad phase and the 3D self-intersection oracle
//! - [`lp`]: simplex solver, brute-force vertex enumeration and the backward pass
//! - [`pushing`]: constraint construction, pushing steps, multi-step deformation
//! - [`fit`]: Chamfer fitting of dense and pushing parametrizations, gradient checks
//! - [`cli`]: the `meshpush` command-line front end

pub mod mesh;
pub mod geometry;
pub mod lp;
pub mod pushing;
pub mod fit;
pub mod cli;
