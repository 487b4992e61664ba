pub mod dsl;
pub mod grammar;
pub mod grid;
pub mod learner;
