pub mod constalg;
pub mod error;
pub mod indexcore;
pub mod logexpand;
pub mod numverify;
pub mod relgen;
pub mod seriesring;
pub mod solver;
