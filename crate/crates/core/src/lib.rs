pub mod circuit;
pub mod cli;
pub mod dsl;
pub mod hopf;
pub mod tensor;
