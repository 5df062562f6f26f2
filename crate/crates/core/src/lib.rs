//! Optimal AdaBoost as an iterated map on the probability simplex, with
//! cycle detection and exact Farey-map orbit analysis.

pub mod cli;
pub mod cycle;
pub mod engine;
pub mod farey;
pub mod figure;
pub mod learners;
pub mod scalar;
pub mod simplex;
pub mod tracefile;
