pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod geo;
pub mod imu;
pub mod navigator;
pub mod report;
pub mod scenario;
pub mod so3;
pub mod updates;
