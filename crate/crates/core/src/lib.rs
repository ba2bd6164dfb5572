pub mod angle;
pub mod benchdsl;
pub mod chsh;
pub mod elements;
pub mod experiment;
pub mod parallel;
pub mod qstate;
