pub mod circuit;
pub mod linalg;
pub mod normalizer;
pub mod relations;
pub mod rewrite;
pub mod ring;
pub mod rspresent;
pub mod selftest;
pub mod subgroups;
