//! Fibre-translation dynamics on `T*Q`: the quantum time development of a
//! closed one-form, the transported GNS data and the WKB transport equations.

mod form;
mod gns;
mod time;
mod wkb;

#[cfg(test)]
mod tests;

pub use form::ClosedOneForm;
pub use gns::{gns_transport, TransportReport};
pub use time::{group_checks, param_var, time_var, GroupReport, TimeDevelopment};
pub use wkb::{wkb_assemble, WkbOrder, WkbReport};
