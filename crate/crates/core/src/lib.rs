//! Exact symbolic computation for conformal-type algebras indexed by a group.
//!
//! The library is organized around a small tower of exact structures:
//!
//! * [`scalar`] — the coefficient field: rational functions of one formal
//!   parameter `q` over the rationals, with canonical forms so that equality
//!   is decidable.
//! * [`group`] — the index group Γ (free abelian, cyclic, `Z2 x Z^N`,
//!   infinite dihedral), its elements and its characters `χ: Γ -> Scalar^×`.
//! * [`conformal`] — free group-ring modules carrying a family of
//!   `α`-products (one bilinear product per group element), axiom checkers,
//!   and the universal rank-one algebra on group-labelled generators.
//! * [`modes`] — the Lie algebra spanned by the modes `g[n]` of the fields
//!   of a conformal algebra, obtained from a character; plus literal
//!   structure-constant tables kept for cross-checking.
//! * [`dist`] — window-truncated formal distributions in two variables:
//!   delta kernels, locality tests and the simple-pole residue
//!   decomposition of a bracket field.
//! * [`catalog`] — the concrete algebras (sin-algebra, its parity-twisted
//!   relatives, twisted affine sl2, `gc1(Γ)`, the vector sin-algebra) and
//!   three independent oracles: `gl∞` matrix arithmetic, the quantum torus,
//!   and differential operators on the circle.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod catalog;
pub mod conformal;
pub mod dist;
pub mod group;
pub mod modes;
pub mod report;
pub mod sample;
pub mod scalar;
