//! Core library for the sdsim toolkit: an indicator kernel of closed-form
//! development formulas, a discrete-time stock-flow engine over population,
//! capital, land, and resources, least-squares parameter calibration, and
//! scenario loading/evaluation against convergence targets.

pub mod calibration;
pub mod engine;
pub mod kernel;
pub mod record;
pub mod scenario;
pub mod series;
