//! Exact arithmetic for Brylinski-Deligne covering data of classical groups.

pub mod field;
pub mod lattice;
pub mod roots;
pub mod qform;
pub mod ext;
pub mod bd;
pub mod symbols;
pub mod geometry;
