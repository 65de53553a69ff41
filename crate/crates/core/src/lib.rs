pub mod error;
pub mod gaussian;
pub mod harness;
pub mod parallel;
pub mod path;
pub mod rde;
pub mod signature;
pub mod tensor;
pub mod words;
pub mod young;
