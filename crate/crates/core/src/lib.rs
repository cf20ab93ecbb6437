//! Exact computation of the homotopy Mackey functors of the KU-local
//! equivariant sphere over finite abelian q-groups (q an odd prime): the
//! representation-ring Green functor, Adams operations, and kernels and
//! cokernels of psi^ell - 1, both in closed form and through an independent
//! Smith-normal-form route.

pub mod abgroup;
pub mod arith;
pub mod error;
pub mod exactla;
pub mod kulocal;
pub mod mackey;
pub mod qgroups;
pub mod repring;
pub mod verify;

pub use error::{Error, Result};
