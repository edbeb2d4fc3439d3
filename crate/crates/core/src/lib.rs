pub mod classical_limit;
pub mod closure;
pub mod config;
pub mod covariant;
pub mod eckart_check;
pub mod expr;
pub mod main_field;
pub mod numeric;
pub mod report;
pub mod special_functions;
pub mod spline;
pub mod state_models;
pub mod sweep;
pub mod verify;
