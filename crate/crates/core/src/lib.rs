//! Exact-arithmetic verification of 3D R kernels against the RLLL and RRRR tetrahedron relations.

pub mod aqsl3;
pub mod exactnum;
pub mod kernels;
pub mod lops;
pub mod report;
pub mod rrrr;
pub mod verify;
pub mod weyl;
