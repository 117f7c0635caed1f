//! Real tropical plane quartics: unimodular triangulations of `4Δ₂`, regular
//! heights and secondary cones, patchworked real parts, and the lifting of
//! real bitangents.

pub mod bitangents;
pub mod curvegeom;
pub mod datastore;
pub mod heights;
pub mod lattice;
pub mod patchwork;
pub mod survey;
pub mod triangulation;
pub mod twist;
pub mod unionfind;
