//! Multi-layer graph modeling of video-on-demand delivery networks and
//! minimum occupied-bandwidth topology synthesis on the physical layer.

pub mod cli;
pub mod demand;
pub mod flow;
pub mod lp;
pub mod mlg;
pub mod report;
pub mod scenario;
pub mod synthesis;
pub mod validation;
