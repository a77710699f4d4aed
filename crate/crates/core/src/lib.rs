//! Exact symbolic machinery for the area-preserving equivalence problem of
//! second-order ODEs `y'' = f(x, y, y')`.

pub mod expr;
pub mod forms;
pub mod linalg;
pub mod jet;
pub mod pipeline;
pub mod connection;
pub mod report;
