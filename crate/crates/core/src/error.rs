use core::fmt;

/// Every failure the algebra can report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    InvalidPrime(u64),
    PrecisionTooLarge { prime: u64, precision: u32 },
    PrecisionExhausted,
    NonUnitInverse,
    NonResidue,
    OddValuation,
    NotAdmissible(&'static str),
    DimensionMismatch(&'static str),
    NonCyclicCokernel,
    DegenerateInput,
    NotInImage,
    FloorInfeasible,
    NotHeisenbergH1,
    NotHeisenbergH2,
    InvalidModPSolution,
    SearchSpaceTooLarge { size: u128, budget: u64 },
    NotUnipotent,
    NotInvertible,
    NotAntisymmetric,
    NonCommuting,
    NotEquivariant,
    NotACocycle,
    FieldRequired,
    NotInvolution,
    DoesNotDescend,
    SummandsNotStable,
    BracketNotBlock,
    NotClassical,
    DegeneratePairing,
    NotOrthogonal,
    InvalidRank { n: usize, k: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPrime(p) => write!(f, "{p} is not an odd prime"),
            Error::PrecisionTooLarge { prime, precision } => {
                write!(f, "{prime}^{precision} does not fit the 120-bit residue budget")
            }
            Error::PrecisionExhausted => f.write_str("known precision exhausted"),
            Error::NonUnitInverse => f.write_str("inverse of a non-unit"),
            Error::NonResidue => f.write_str("not a square"),
            Error::OddValuation => f.write_str("odd valuation has no square root"),
            Error::NotAdmissible(why) => write!(f, "inadmissible input: {why}"),
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::NonCyclicCokernel => f.write_str("cokernel is not cyclic torsion"),
            Error::DegenerateInput => f.write_str("submodule is the whole module"),
            Error::NotInImage => f.write_str("vector is not in the image"),
            Error::FloorInfeasible => f.write_str("no preimage meets the valuation floor"),
            Error::NotHeisenbergH1 => f.write_str("condition H1 fails"),
            Error::NotHeisenbergH2 => f.write_str("condition H2 fails"),
            Error::InvalidModPSolution => f.write_str("not a solution mod p"),
            Error::SearchSpaceTooLarge { size, budget } => {
                write!(f, "search space {size} exceeds budget {budget}")
            }
            Error::NotUnipotent => f.write_str("matrix is not class-2 unipotent"),
            Error::NotInvertible => f.write_str("matrix is not invertible"),
            Error::NotAntisymmetric => f.write_str("bracket is not antisymmetric"),
            Error::NonCommuting => f.write_str("operators F and G do not commute"),
            Error::NotEquivariant => f.write_str("bracket is not equivariant"),
            Error::NotACocycle => f.write_str("cochain is not a cocycle"),
            Error::FieldRequired => f.write_str("operation needs coefficients in F_p"),
            Error::NotInvolution => f.write_str("map does not square to the identity"),
            Error::DoesNotDescend => f.write_str("involution does not commute with the differentials"),
            Error::SummandsNotStable => f.write_str("operators do not preserve the summands"),
            Error::BracketNotBlock => f.write_str("bracket does not vanish within summands"),
            Error::NotClassical => f.write_str("involution is not classical"),
            Error::DegeneratePairing => f.write_str("pairing is degenerate"),
            Error::NotOrthogonal => f.write_str("subspaces are not orthogonal"),
            Error::InvalidRank { n, k } => write!(f, "parabolic index {k} invalid for rank {n}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
