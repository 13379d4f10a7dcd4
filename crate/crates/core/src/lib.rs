pub mod bits;
pub mod corpus;
pub mod digits;
pub mod expr;
pub mod forms;
pub mod fraction;
pub mod hankel;
pub mod kernel;
pub mod linalg;
pub mod nc;
pub mod orbit;
pub mod poly;
pub mod ring;
pub mod scan;
pub mod series;
