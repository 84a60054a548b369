pub mod cli;
pub mod norm_laws;
pub mod numerics;
pub mod postbqp;
pub mod protocols;
pub mod report;
pub mod sqrt;
pub mod state;
