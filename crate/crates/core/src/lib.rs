mod canon;
pub mod diagram;
pub mod format;
pub mod interp;
pub mod multiset;
pub mod rewrite;
pub mod termination;
