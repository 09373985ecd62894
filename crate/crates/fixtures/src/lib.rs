//! Synthetic pages, scripted user sessions, attack injectors and the
//! oracles that say what a correct extraction looks like.

pub mod attack;
pub mod canvas;
pub mod page;
pub mod perturb;
pub mod scenario;
pub mod script;
pub mod session;
