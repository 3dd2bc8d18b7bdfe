pub mod channels;
pub mod dynamics;
pub mod error;
pub mod state;
pub mod units;
pub mod crossing;
pub mod measures;
pub mod tomography;
pub mod fitting;
pub mod io;
pub mod cli;
