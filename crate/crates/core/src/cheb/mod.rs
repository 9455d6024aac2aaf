//! Polynomial expansions and basis transforms.

pub mod chebyshev;
pub mod hierarchical;
pub mod identities;
pub mod legendre;
pub mod multivariate;
pub mod transform;

pub use chebyshev::{chebyshev_t, chebyshev_table, lobatto_points, ChebExpansion};
pub use hierarchical::{chebyshev_to_hierarchical, hierarchical_basis, split_by_section, HierarchicalChebExpansion};
pub use identities::{cheb_expand_t, ChebIdentity, ProductSum, ProductTerm};
pub use legendre::{gauss_legendre, legendre_table, legendre_to_monomial_matrix, LegendreExpansion, MonomialExpansion};
pub use multivariate::MultiChebExpansion;
pub use transform::{build_s_matrix, build_s_matrix_general, h_matrix, parent_level, TransformKind, TransformMatrix};
