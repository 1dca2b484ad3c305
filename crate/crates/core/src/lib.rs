// FieldCtx hashes only (p, k); its embedding cache never affects Eq or Hash.
#![allow(clippy::mutable_key_type)]

pub mod gf;
pub mod grpscheme;
pub mod intlat;
pub mod linalg;
pub mod mat2;
pub mod polyinv;
pub mod singclass;
pub mod text;
