//! A workbench for the λI-calculus: Ohana trees and approximants with
//! memory, the λI-resource calculus, Taylor expansion and multi-types.

pub mod cli;
pub mod lambda;
pub mod multitype;
pub mod names;
pub mod resource;
pub mod syntax;
pub mod taylor;
pub mod trees;
