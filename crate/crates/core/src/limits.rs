//! Global guard against runaway expansions.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Environment variable holding the hard vertex cap.
pub const MAX_VERTICES_ENV: &str = "ENDS_UNIVERSAL_MAX_VERTICES";

pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

/// The vertex cap, read once from [`MAX_VERTICES_ENV`].
pub fn max_vertices() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_VERTICES_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_VERTICES)
    })
}

pub(crate) fn check_vertices(count: usize) -> Result<()> {
    let cap = max_vertices();
    if count > cap {
        return Err(Error::VertexCap { cap });
    }
    Ok(())
}
