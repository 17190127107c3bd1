//! JSON documents for modules, algebras, complexes, cap actions and
//! certificates. Basis elements are referred to by name throughout.
//!
//! [`to_canonical_json`] writes compact JSON with sorted object keys and a
//! trailing newline, so equal values always produce equal bytes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{BoundCertificate, CapAction, CapViolation, SqChain};
use crate::f2core::BitVec;
use crate::morse::{build_complex, ComplexError, Generator};
use crate::stmod::{
    validate, validate_algebra, Class, GradedAlgebra, ModuleError, UnstableModule, ValidationReport,
};
use crate::MorseComplex64;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("module fails validation: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("cap action fails validation: {} violation(s)", .0.len())]
    InvalidCap(Vec<CapViolation>),
}

/// Compact JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize to JSON");
    let mut s = serde_json::to_string(&v).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeBasis {
    pub degree: i64,
    pub names: Vec<String>,
}

/// `sq` lists `[j, x, y]` meaning `y` occurs in `Sq^j x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
    pub basis: Vec<DegreeBasis>,
    #[serde(default)]
    pub sq: Vec<(u32, String, String)>,
}

impl ModuleDoc {
    pub fn from_module(m: &UnstableModule) -> Self {
        let basis = m
            .basis()
            .iter()
            .map(|(&degree, names)| DegreeBasis {
                degree,
                names: names.clone(),
            })
            .collect();
        let mut sq = Vec::new();
        for (j, d, mat) in m.sq_blocks() {
            if j == 0 {
                continue;
            }
            let mut entries: Vec<(usize, usize)> = mat.entries().map(|(r, c)| (c, r)).collect();
            entries.sort_unstable();
            for (c, r) in entries {
                sq.push((j, m.names(d)[c].clone(), m.names(d + j as i64)[r].clone()));
            }
        }
        ModuleDoc {
            lo: Some(m.lo()),
            hi: Some(m.hi()),
            basis,
            sq,
        }
    }

    /// Builds the module without checking the axioms.
    pub fn to_module_unchecked(&self) -> Result<UnstableModule, IoError> {
        let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for b in &self.basis {
            basis
                .entry(b.degree)
                .or_default()
                .extend(b.names.iter().cloned());
        }
        let nonempty = || basis.iter().filter(|(_, n)| !n.is_empty()).map(|(&d, _)| d);
        let lo = self.lo.or_else(|| nonempty().min()).unwrap_or(0);
        let hi = self.hi.or_else(|| nonempty().max()).unwrap_or(lo - 1);
        let mut m = UnstableModule::new(lo, hi, basis)?;
        for (j, x, y) in &self.sq {
            if *j == 0 {
                return Err(IoError::Schema(format!(
                    "Sq^0 entry `{x}` -> `{y}`: Sq^0 is always the identity"
                )));
            }
            let (xd, xi) = m
                .find(x)
                .ok_or_else(|| ModuleError::UnknownName(x.clone()))?;
            let (yd, yi) = m
                .find(y)
                .ok_or_else(|| ModuleError::UnknownName(y.clone()))?;
            if yd != xd + *j as i64 {
                return Err(IoError::Schema(format!(
                    "Sq^{j} maps degree {xd} to {}, but `{y}` has degree {yd}",
                    xd + *j as i64
                )));
            }
            let mut block = m.sq(*j, xd);
            block.set(yi, xi, true);
            m.set_sq(*j, xd, block)?;
        }
        Ok(m)
    }

    /// Builds the module and checks the unstable-module axioms.
    pub fn to_module(&self) -> Result<UnstableModule, IoError> {
        let m = self.to_module_unchecked()?;
        let report = validate(&m);
        if report.is_valid() {
            Ok(m)
        } else {
            Err(IoError::Invalid(report))
        }
    }
}

/// A module document plus a unit name and products `[x, y, z]` meaning `z`
/// occurs in `x * y` (and in `y * x`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(flatten)]
    pub module: ModuleDoc,
    pub unit: String,
    #[serde(default)]
    pub products: Vec<(String, String, String)>,
}

impl AlgebraDoc {
    pub fn from_algebra(a: &GradedAlgebra) -> Self {
        let m = a.module();
        let unit = a.unit_name().to_string();
        let mut products = Vec::new();
        for (x, y, z) in a.products() {
            let (xn, yn) = (&m.names(x.0)[x.1], &m.names(y.0)[y.1]);
            if x > y || *xn == unit || *yn == unit {
                continue;
            }
            for i in z.ones() {
                products.push((xn.clone(), yn.clone(), m.names(x.0 + y.0)[i].clone()));
            }
        }
        AlgebraDoc {
            module: ModuleDoc::from_module(m),
            unit,
            products,
        }
    }

    pub fn to_algebra_unchecked(&self) -> Result<GradedAlgebra, IoError> {
        let mut a = GradedAlgebra::new(self.module.to_module_unchecked()?, &self.unit)?;
        for (x, y, z) in &self.products {
            a.add_product(x, y, z)?;
        }
        Ok(a)
    }

    /// Builds the algebra and checks the module and algebra axioms.
    pub fn to_algebra(&self) -> Result<GradedAlgebra, IoError> {
        let a = self.to_algebra_unchecked()?;
        let report = validate_algebra(&a);
        if report.is_valid() {
            Ok(a)
        } else {
            Err(IoError::Invalid(report))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub grading: i64,
    pub action: f64,
}

/// `incidence` lists `[x, y]` for each coefficient 1 of `y` in `d(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub incidence: Vec<(String, String)>,
}

impl ComplexDoc {
    pub fn from_complex(c: &MorseComplex64) -> Self {
        ComplexDoc {
            generators: c
                .generators()
                .iter()
                .map(|g| GeneratorDoc {
                    name: g.name.clone(),
                    grading: g.grading,
                    action: g.action,
                })
                .collect(),
            incidence: c
                .incidence()
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .collect(),
        }
    }

    pub fn to_complex(&self) -> Result<MorseComplex64, IoError> {
        let gens = self
            .generators
            .iter()
            .map(|g| Generator {
                name: g.name.clone(),
                grading: g.grading,
                action: g.action,
            })
            .collect();
        Ok(build_complex(gens, &self.incidence)?)
    }
}

/// `action` lists `[v, a, w]` meaning `w` occurs in `v * a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapActionDoc {
    pub algebra: AlgebraDoc,
    pub space: ModuleDoc,
    #[serde(default)]
    pub action: Vec<(String, String, String)>,
}

impl CapActionDoc {
    pub fn from_cap_action(c: &CapAction) -> Self {
        let (a, v) = (c.algebra().module(), c.space());
        let unit = c.algebra().unit_name();
        let mut action = Vec::new();
        for (x, y, w) in c.entries() {
            let an = &a.names(y.0)[y.1];
            if an == unit {
                continue;
            }
            for i in w.ones() {
                action.push((
                    v.names(x.0)[x.1].clone(),
                    an.clone(),
                    v.names(x.0 + y.0)[i].clone(),
                ));
            }
        }
        CapActionDoc {
            algebra: AlgebraDoc::from_algebra(c.algebra()),
            space: ModuleDoc::from_module(v),
            action,
        }
    }

    /// Builds and validates the action; the algebra is validated as well.
    pub fn to_cap_action(&self) -> Result<CapAction, IoError> {
        let mut c = CapAction::new(
            self.algebra.to_algebra()?,
            self.space.to_module_unchecked()?,
        );
        for (v, a, w) in &self.action {
            c.add_action(v, a, w)?;
        }
        let violations = c.validate();
        if violations.is_empty() {
            Ok(c)
        } else {
            Err(IoError::InvalidCap(violations))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub start_degree: i64,
    /// Basis names summed to form the start class.
    pub start: Vec<String>,
    pub exponents: Vec<u32>,
    pub end_degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub bound: usize,
    pub n: u32,
    pub allowed: BTreeSet<u32>,
    pub chains: Vec<ChainDoc>,
}

impl CertificateDoc {
    pub fn from_certificate(m: &UnstableModule, cert: &BoundCertificate) -> Self {
        let chains = cert
            .chains
            .iter()
            .map(|c| ChainDoc {
                start_degree: c.start_degree(),
                start: c
                    .start
                    .vector
                    .ones()
                    .map(|i| m.names(c.start.degree)[i].clone())
                    .collect(),
                exponents: c.exponents.clone(),
                end_degree: c.end_degree(),
            })
            .collect();
        CertificateDoc {
            bound: cert.bound,
            n: cert.n,
            allowed: cert.allowed.clone(),
            chains,
        }
    }

    /// Resolves names against `m`. Degrees are taken from the names; a
    /// stated degree that disagrees is a schema error.
    pub fn to_certificate(&self, m: &UnstableModule) -> Result<BoundCertificate, IoError> {
        let mut chains = Vec::new();
        for (s, c) in self.chains.iter().enumerate() {
            let dim = m.dim(c.start_degree);
            let mut v = BitVec::zeros(dim);
            for name in &c.start {
                let (d, i) = m
                    .find(name)
                    .ok_or_else(|| ModuleError::UnknownName(name.clone()))?;
                if d != c.start_degree {
                    return Err(IoError::Schema(format!(
                        "chain {s}: `{name}` has degree {d}, not {}",
                        c.start_degree
                    )));
                }
                v.flip(i);
            }
            let chain = SqChain {
                start: Class::new(c.start_degree, v),
                exponents: c.exponents.clone(),
            };
            if chain.end_degree() != c.end_degree {
                return Err(IoError::Schema(format!(
                    "chain {s}: end degree {} does not match exponents (expected {})",
                    c.end_degree,
                    chain.end_degree()
                )));
            }
            chains.push(chain);
        }
        Ok(BoundCertificate {
            n: self.n,
            allowed: self.allowed.clone(),
            chains,
            bound: self.bound,
        })
    }
}
