pub mod bubble;
pub mod catalog;
pub mod dofs;
pub mod local;

pub use bubble::{bubble_basis_div_t, bubble_count, BubbleBasis};
pub use catalog::{catalog, shape_space, Component, FamilyId, FamilyKind, FieldKind, ShapeSpaceSpec, Structure};
pub use dofs::{apply_dof, local_dofs, DofFunctional, DofKey, DofKind, LocalDof};
pub use local::{check_unisolvence, local_dof_matrix, LocalElement, UnisolvenceReport};
