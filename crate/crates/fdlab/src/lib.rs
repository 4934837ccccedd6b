//! Command-line front end for `fdlab-core`: JSON reports, CSV tables, OBJ
//! meshes and the acceptance check list.

pub mod cli;
pub mod mesh;
pub mod report;
pub mod table;
pub mod verify;
