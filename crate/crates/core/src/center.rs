//! Center of the twisted group algebra of a finite abelian group.
//!
//! The center is free over the base ring on the monomials indexed by
//! `G_reg = {g : f(h, g) = 1 for all h}`. Its rank is computed three ways:
//!
//! * **theorem**: the center is trivial iff every diagonal block `A_{jj}` is
//!   invertible over `Z/p^{n_j}` (decides triviality only);
//! * **kernel**: `G_reg` is the solution set of `Ã·g ≡ 0` in lifted
//!   coordinates, modulo the lattice of lifts of the identity;
//! * **oracle**: enumerate `G` and test each element against every generator.
//!
//! Components for different primes are combined with [`tensor_combine`].

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairing::{NormalizedMatrix, PairingMatrix};
use crate::shape::{GroupElement, PGroupShape, DEFAULT_ENUMERATION_CAP};
use crate::solver::{self, DiagonalForm, KernelDescription};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Theorem,
    Kernel,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Theorem => "theorem",
            Method::Kernel => "kernel",
            Method::Oracle => "oracle",
        })
    }
}

/// Consolidated answer for one prime, or for several after [`tensor_combine`].
///
/// Generator coordinates are concatenated across `primes` in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterReport {
    pub primes: Vec<u64>,
    /// Length of the coordinate vectors in `greg_generators`.
    pub coordinates: usize,
    pub trivial: bool,
    /// `|G_reg|`, the free rank of the center.
    pub rank: u128,
    pub greg_generators: Vec<GroupElement>,
    pub methods_agreed: BTreeSet<Method>,
}

/// `G_reg` by generators; `elements` is filled in when it was enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularSubgroup {
    pub order: u128,
    pub generators: Vec<GroupElement>,
    pub elements: Option<Vec<GroupElement>>,
}

impl RegularSubgroup {
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}

/// Trivial center iff each diagonal block is invertible over its own ring,
/// which is the same as full rank modulo `p`.
pub fn center_trivial_by_theorem(a: &PairingMatrix) -> bool {
    (0..a.shape().blocks().len()).all(|j| a.diagonal_block(j).is_invertible())
}

/// `G_reg ≅ S / K₀`, where `S` is the lifted solution set and `K₀` the lifts
/// of the identity.
pub fn greg_from_kernel(k: &KernelDescription, shape: &PGroupShape) -> Result<RegularSubgroup> {
    let fiber = shape.fiber_order();
    if k.size % fiber != 0 {
        return Err(Error::InternalInconsistency(format!(
            "kernel size {} is not a multiple of the fiber order {}",
            k.size, fiber
        )));
    }
    let mut generators: Vec<GroupElement> = k
        .generators
        .iter()
        .map(|g| shape.project(g))
        .filter(|g| !g.is_identity())
        .collect();
    generators.sort();
    generators.dedup();
    Ok(RegularSubgroup {
        order: k.size / fiber,
        generators,
        elements: None,
    })
}

/// Enumerates `G` and keeps the elements whose commutation phase with every
/// generator vanishes.
pub fn greg_brute_force(norm: &NormalizedMatrix, cap: u64) -> Result<RegularSubgroup> {
    let shape = norm.shape();
    // validates the cap
    shape.enumerate(cap)?;
    let order = shape.order() as usize;
    let elements: Vec<GroupElement> = (0..order)
        .into_par_iter()
        .map(|i| shape.element_at(i))
        .filter(|g| norm.is_central(&shape.lift(g)))
        .collect();
    let generators = greedy_generators(shape, &elements);
    Ok(RegularSubgroup {
        order: elements.len() as u128,
        generators,
        elements: Some(elements),
    })
}

/// A generating set for the subgroup `elements` (sorted, identity first).
fn greedy_generators(shape: &PGroupShape, elements: &[GroupElement]) -> Vec<GroupElement> {
    let order = shape.order() as usize;
    let mut in_span = vec![false; order];
    let id = shape.identity();
    in_span[shape.index_of(&id)] = true;
    let mut members = vec![id];
    let mut gens = Vec::new();
    for g in elements {
        if in_span[shape.index_of(g)] {
            continue;
        }
        gens.push(g.clone());
        // span + <g> is the union of the cosets span + k·g until k·g re-enters span
        let base = members.clone();
        let mut shift = g.clone();
        while !in_span[shape.index_of(&shift)] {
            for s in &base {
                let x = shape.add(s, &shift);
                in_span[shape.index_of(&x)] = true;
                members.push(x);
            }
            shift = shape.add(&shift, g);
        }
    }
    gens
}

/// When to run the enumeration oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Run it when `|G|` is within the enumeration cap.
    #[default]
    Auto,
    /// Run it and fail if `|G|` exceeds the cap.
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub max_enumeration: u64,
    pub oracle: OracleMode,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            max_enumeration: DEFAULT_ENUMERATION_CAP,
            oracle: OracleMode::Auto,
        }
    }
}

/// Everything computed along the way by [`analyze_full`].
#[derive(Clone, Debug)]
pub struct Analysis {
    pub pairing: PairingMatrix,
    pub normalized: NormalizedMatrix,
    pub diagonal: DiagonalForm,
    pub kernel: KernelDescription,
    pub theorem_trivial: bool,
    pub from_kernel: RegularSubgroup,
    pub oracle: Option<RegularSubgroup>,
    pub report: CenterReport,
}

pub fn analyze(a: &PairingMatrix, options: &AnalyzeOptions) -> Result<CenterReport> {
    analyze_full(a, options).map(|x| x.report)
}

/// Runs the theorem and kernel routes, and the oracle as configured, and
/// fails with [`Error::MethodsDisagree`] unless all of them agree.
pub fn analyze_full(a: &PairingMatrix, options: &AnalyzeOptions) -> Result<Analysis> {
    let shape = a.shape();
    let normalized = a.normalize();

    let run_oracle = match options.oracle {
        OracleMode::Never => false,
        OracleMode::Always => true,
        OracleMode::Auto => shape.order() <= options.max_enumeration as u128,
    };

    let theorem_trivial = center_trivial_by_theorem(a);
    let diagonal = solver::diagonalize(normalized.matrix());
    let kernel = solver::kernel_from(normalized.matrix(), &diagonal);
    let from_kernel = greg_from_kernel(&kernel, shape)?;
    let oracle = if run_oracle {
        Some(greg_brute_force(&normalized, options.max_enumeration)?)
    } else {
        None
    };

    let mut disagreements = Vec::new();
    if theorem_trivial != from_kernel.is_trivial() {
        disagreements.push(format!(
            "theorem says trivial={theorem_trivial}, kernel route gives rank {}",
            from_kernel.order
        ));
    }
    if shape.order() % from_kernel.order != 0 {
        disagreements.push(format!(
            "kernel rank {} does not divide |G| = {}",
            from_kernel.order,
            shape.order()
        ));
    }
    if let Some(o) = &oracle {
        let elements = o.elements.as_deref().unwrap_or_default();
        if o.order != from_kernel.order {
            disagreements.push(format!(
                "oracle rank {} differs from kernel rank {}",
                o.order, from_kernel.order
            ));
        } else if shape.span(&from_kernel.generators) != elements {
            disagreements.push("kernel generators do not span the oracle's G_reg".into());
        }
        if theorem_trivial != o.is_trivial() {
            disagreements.push(format!(
                "theorem says trivial={theorem_trivial}, oracle finds {} central elements",
                o.order
            ));
        }
    }
    if !disagreements.is_empty() {
        return Err(Error::MethodsDisagree(format!(
            "p = {}, shape {}, A = {:?}: {}",
            shape.prime(),
            shape,
            a.to_rows(),
            disagreements.join("; ")
        )));
    }

    let mut methods_agreed = BTreeSet::from([Method::Theorem, Method::Kernel]);
    if oracle.is_some() {
        methods_agreed.insert(Method::Oracle);
    }
    let report = CenterReport {
        primes: vec![shape.prime()],
        coordinates: shape.generator_count(),
        trivial: theorem_trivial,
        rank: from_kernel.order,
        greg_generators: from_kernel.generators.clone(),
        methods_agreed,
    };
    Ok(Analysis {
        pairing: a.clone(),
        normalized,
        diagonal,
        kernel,
        theorem_trivial,
        from_kernel,
        oracle,
        report,
    })
}

/// Center of `A_{G_{p_1}} ⊗ … ⊗ A_{G_{p_t}}`: generators of coprime order
/// commute, so ranks multiply and `G_reg` is the direct sum.
pub fn tensor_combine(reports: &[CenterReport]) -> Result<CenterReport> {
    let mut seen = BTreeSet::new();
    for p in reports.iter().flat_map(|r| &r.primes) {
        if !seen.insert(*p) {
            return Err(Error::DuplicatePrime(*p));
        }
    }

    let total: usize = reports.iter().map(|r| r.coordinates).sum();
    let mut offset = 0;
    let mut greg_generators = Vec::new();
    for r in reports {
        for g in &r.greg_generators {
            let mut coords = vec![0; total];
            coords[offset..offset + r.coordinates].copy_from_slice(&g.0);
            greg_generators.push(GroupElement(coords));
        }
        offset += r.coordinates;
    }

    let methods_agreed = reports
        .iter()
        .map(|r| r.methods_agreed.clone())
        .reduce(|a, b| a.intersection(&b).copied().collect())
        .unwrap_or_default();

    Ok(CenterReport {
        primes: reports.iter().flat_map(|r| r.primes.clone()).collect(),
        coordinates: total,
        trivial: reports.iter().all(|r| r.trivial),
        rank: reports.iter().fold(1u128, |acc, r| acc.saturating_mul(r.rank)),
        greg_generators,
        methods_agreed,
    })
}
