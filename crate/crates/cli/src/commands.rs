pub mod burgers;
pub mod dea;
pub mod metrics;
pub mod oracle;
pub mod sine;
