use thiserror::Error;

use crate::codefile::FileError;
use crate::evalset::PairError;
use crate::gf::GfError;
use crate::guard::TooLarge;
use crate::inner::InnerError;
use crate::lrc2::Lrc2Error;
use crate::lrc3::Lrc3Error;
use crate::matrix::MatrixError;
use crate::mpoly::PolyError;
use crate::repair::RepairError;
use crate::rm::RmError;
use crate::sim::SimError;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Rm(#[from] RmError),
    #[error(transparent)]
    Inner(#[from] InnerError),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Lrc2(#[from] Lrc2Error),
    #[error(transparent)]
    Lrc3(#[from] Lrc3Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}
