//! Crate-level error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] crate::specfun::SpecFunError),
    #[error(transparent)]
    RootFind(#[from] crate::rootfind::RootFindError),
    #[error(transparent)]
    Disk(#[from] crate::diskmodel::DiskError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Wkb(#[from] crate::wkb::WkbError),
}

pub type Result<T> = std::result::Result<T, Error>;
