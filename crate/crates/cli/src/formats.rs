//! JSON file formats and their conversion to core types.

use serde::{Deserialize, Serialize};

use heislift_core::atlas::ParabolicData;
use heislift_core::cochain::{GradedActionPair, ToyPhiGammaModule};
use heislift_core::delta::DeltaAction;
use heislift_core::heisenberg::{HeisenbergSystem, ModPSolution};
use heislift_core::nilpotent::{BlockRealization, Class2Algebra};
use heislift_core::padic::{PadicRing, PadicScalar, Scalar};
use heislift_core::zmod::{ModMatrix, ResidueRing};

use crate::report::Failure;

/// `x^t Sigma_l x + (d y)_l = 0`, `l = 1..s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default)]
    pub prime: Option<u64>,
    #[serde(default)]
    pub precision: Option<u32>,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    /// `s` symmetric `r x r` matrices.
    #[serde(rename = "Sigma")]
    pub sigma: Vec<Vec<Vec<i128>>>,
    /// `s x t`; may be empty when `t = 0`.
    #[serde(default)]
    pub d: Vec<Vec<i128>>,
    #[serde(default)]
    pub solution: Option<SolutionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub xbar: Vec<u64>,
    pub ybar: Vec<u64>,
}

impl From<&ModPSolution> for SolutionDoc {
    fn from(s: &ModPSolution) -> Self {
        SolutionDoc { xbar: s.xbar.clone(), ybar: s.ybar.clone() }
    }
}

impl From<SolutionDoc> for ModPSolution {
    fn from(s: SolutionDoc) -> Self {
        ModPSolution { xbar: s.xbar, ybar: s.ybar }
    }
}

/// Resolve a value given both in the file and by a flag.
pub fn resolve<T: PartialEq + Copy + std::fmt::Display>(name: &str, file: Option<T>, flag: Option<T>, default: T) -> Result<T, Failure> {
    match (file, flag) {
        (Some(a), Some(b)) if a != b => Err(Failure::usage(format!("{name} {b} from flags conflicts with {a} in the input file"))),
        (Some(a), _) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Ok(default),
    }
}

impl SystemFile {
    pub fn to_system(&self, prime: u64, precision: u32) -> Result<HeisenbergSystem, Failure> {
        let ring = PadicRing::new(prime, precision)?;
        if self.sigma.len() != self.s {
            return Err(Failure::input("Sigma must hold s matrices"));
        }
        Ok(HeisenbergSystem::from_integers(ring, self.r, self.t, &self.sigma, &self.d)?)
    }
}

/// A p-adic scalar: residue modulo `p^known_prec`, in decimal since it may exceed 64 bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicDoc {
    pub residue: String,
    pub known_prec: u32,
}

impl From<&PadicScalar> for PadicDoc {
    fn from(s: &PadicScalar) -> Self {
        PadicDoc { residue: s.residue().to_string(), known_prec: s.known_prec() }
    }
}

/// `a0 + a1 theta` with `theta^2 + b theta + c = 0`, or a base scalar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Base(PadicDoc),
    Ext { a0: PadicDoc, a1: PadicDoc, b: PadicDoc, c: PadicDoc },
}

impl From<&Scalar> for ScalarDoc {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Base(a) => ScalarDoc::Base(a.into()),
            Scalar::Ext(e) => ScalarDoc::Ext { a0: (&e.a0).into(), a1: (&e.a1).into(), b: (&e.minpoly.b).into(), c: (&e.minpoly.c).into() },
        }
    }
}

/// Rows of integers, reduced into the ring on load.
pub type MatrixDoc = Vec<Vec<i64>>;

pub fn matrix_from_doc(ring: ResidueRing, rows: &MatrixDoc, cols: usize) -> Result<ModMatrix, Failure> {
    Ok(ModMatrix::from_rows(ring, cols, rows)?)
}

pub fn matrix_to_doc(m: &ModMatrix) -> Vec<Vec<u64>> {
    m.to_rows()
}

fn square(ring: ResidueRing, rows: &MatrixDoc, what: &str) -> Result<ModMatrix, Failure> {
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Failure::input(format!("{what} must be square")));
    }
    matrix_from_doc(ring, rows, rows.len())
}

/// A module with operators `F`, `G`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub dim: usize,
    #[serde(rename = "F")]
    pub f: MatrixDoc,
    #[serde(rename = "G")]
    pub g: MatrixDoc,
}

impl ModuleDoc {
    pub fn to_module(&self, ring: ResidueRing) -> Result<ToyPhiGammaModule, Failure> {
        if self.f.len() != self.dim || self.g.len() != self.dim {
            return Err(Failure::input("F and G must have dim rows"));
        }
        Ok(ToyPhiGammaModule::new(square(ring, &self.f, "F")?, square(ring, &self.g, "G")?)?)
    }
}

/// Coefficient ring `Z/p^precision`; `precision` 1 (the default) is the field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingDoc {
    pub prime: u64,
    #[serde(default = "one")]
    pub precision: u32,
}

fn one() -> u32 {
    1
}

impl RingDoc {
    pub fn ring(&self) -> Result<ResidueRing, Failure> {
        Ok(ResidueRing::new(self.prime, self.precision)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleFile {
    #[serde(flatten)]
    pub ring: RingDoc,
    #[serde(flatten)]
    pub module: ModuleDoc,
}

/// Block realization `(a, b, c)` with a Levi pair of block-diagonal matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationDoc {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub f: MatrixDoc,
    pub g: MatrixDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub j1: MatrixDoc,
    pub j0: MatrixDoc,
    pub summands: (usize, usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HlDoc {
    /// Cocycles of `M1` spanning the chosen submodule.
    pub h: Vec<Vec<i64>>,
    /// A cocycle of `M1` mod p.
    pub bar: Vec<i64>,
}

/// Either explicit `M1`, `M0`, bracket, or a block realization with a Levi pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairFile {
    #[serde(flatten)]
    pub ring: RingDoc,
    #[serde(default, rename = "M1")]
    pub m1: Option<ModuleDoc>,
    #[serde(default, rename = "M0")]
    pub m0: Option<ModuleDoc>,
    /// One antisymmetric `dim M1` square matrix per coordinate of `M0`.
    #[serde(default)]
    pub bracket: Option<Vec<MatrixDoc>>,
    #[serde(default)]
    pub realization: Option<RealizationDoc>,
    #[serde(default)]
    pub action: Option<ActionDoc>,
    #[serde(default)]
    pub hl: Option<HlDoc>,
}

pub struct LoadedPair {
    pub pair: GradedActionPair,
    /// Present when the pair came from a realization.
    pub realization: Option<(BlockRealization, ModMatrix, ModMatrix)>,
    pub action: Option<DeltaAction>,
}

fn reduce_vec(ring: ResidueRing, v: &[i64]) -> Vec<u64> {
    v.iter().map(|&x| ring.reduce(x)).collect()
}

impl PairFile {
    pub fn load(&self) -> Result<LoadedPair, Failure> {
        let ring = self.ring.ring()?;
        let (pair, realization) = match (&self.realization, &self.m1, &self.m0, &self.bracket) {
            (Some(rd), None, None, None) => {
                let real = BlockRealization::new(ring, rd.a, rd.b, rd.c);
                let f = square(ring, &rd.f, "f")?;
                let g = square(ring, &rd.g, "g")?;
                (GradedActionPair::from_realization(&real, &f, &g)?, Some((real, f, g)))
            }
            (None, Some(m1), Some(m0), bracket) => {
                let m1 = m1.to_module(ring)?;
                let m0 = m0.to_module(ring)?;
                let alg = match bracket {
                    Some(bs) => {
                        let mats = bs.iter().map(|b| square(ring, b, "bracket")).collect::<Result<Vec<_>, _>>()?;
                        Class2Algebra::new(ring, m1.dim(), m0.dim(), mats)?
                    }
                    None => Class2Algebra::abelian(ring, m1.dim(), m0.dim()),
                };
                (GradedActionPair::new(m1, m0, alg)?, None)
            }
            _ => return Err(Failure::input("give either a realization or M1, M0 and an optional bracket")),
        };
        let action = match &self.action {
            Some(a) => Some(DeltaAction::new(square(ring, &a.j1, "j1")?, square(ring, &a.j0, "j0")?, a.summands)?),
            None => None,
        };
        Ok(LoadedPair { pair, realization, action })
    }

    pub fn hl_vectors(&self) -> Result<Option<(Vec<Vec<u64>>, Vec<u64>)>, Failure> {
        let ring = self.ring.ring()?;
        Ok(self.hl.as_ref().map(|hl| {
            let h = hl.h.iter().map(|v| reduce_vec(ring, v)).collect();
            (h, reduce_vec(ring.residue_field(), &hl.bar))
        }))
    }
}

/// Everything a downstream module needs about one parabolic.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AtlasDump {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub prime: u64,
    pub blocks: (usize, usize, usize),
    pub gr1_dims: (usize, usize),
    pub gr0_dim: usize,
    pub gram: Vec<Vec<u64>>,
    pub bracket: Vec<Vec<Vec<u64>>>,
    pub j1: Vec<Vec<u64>>,
    pub j0: Vec<Vec<u64>>,
}

impl From<&ParabolicData> for AtlasDump {
    fn from(d: &ParabolicData) -> Self {
        let r = d.realization;
        AtlasDump {
            family: d.spec.family.name().to_string(),
            n: d.spec.n,
            k: d.spec.k,
            prime: d.spec.ring.prime(),
            blocks: (r.a, r.b, r.c),
            gr1_dims: d.gr1_dims(),
            gr0_dim: d.gr0_dim(),
            gram: matrix_to_doc(&d.spec.gram()),
            bracket: r.algebra().structure().iter().map(matrix_to_doc).collect(),
            j1: matrix_to_doc(&d.j1),
            j0: matrix_to_doc(&d.j0),
        }
    }
}
