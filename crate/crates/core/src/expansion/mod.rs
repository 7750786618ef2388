//! Eigenvalue data of an expansion map and the algebraic condition it must
//! satisfy to be the expansion of a self-affine tiling.
//!
//! For an eigenvalue `λ` of multiplicity `k`, every Galois conjugate `γ` of
//! `λ` must either be strictly smaller than `λ` in modulus or itself be an
//! eigenvalue of multiplicity at least `k`. All eigenvalues must also be
//! algebraic integers. Modulus ties are decided exactly.

mod witness;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::numbers::{char_poly, factor_rational, AlgebraicNumber, RatMatrix, RatPoly};
use crate::{Error, Result};

pub use witness::{build_companion_witness, check_growth_condition, Competitor, WitnessReport};

/// A conjugation-closed multiset of eigenvalues, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Spectrum {
    items: Vec<(AlgebraicNumber, u32)>,
}

impl Spectrum {
    /// Merges repeated entries; zero multiplicities are dropped.
    pub fn from_items(items: impl IntoIterator<Item = (AlgebraicNumber, u32)>) -> Spectrum {
        let mut map: BTreeMap<AlgebraicNumber, u32> = BTreeMap::new();
        for (a, m) in items {
            if m > 0 {
                *map.entry(a).or_default() += m;
            }
        }
        Spectrum { items: map.into_iter().collect() }
    }

    pub fn items(&self) -> &[(AlgebraicNumber, u32)] {
        &self.items
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn size(&self) -> usize {
        self.items.iter().map(|(_, m)| *m as usize).sum()
    }

    pub fn multiplicity(&self, a: &AlgebraicNumber) -> u32 {
        self.items.iter().find(|(b, _)| b == a).map_or(0, |(_, m)| *m)
    }

    pub fn is_conjugation_closed(&self) -> bool {
        self.items.iter().all(|(a, m)| self.multiplicity(&a.conj()) == *m)
    }

    /// Whether `self` is a sub-multiset of `other`.
    pub fn is_subset_of(&self, other: &Spectrum) -> bool {
        self.items.iter().all(|(a, m)| other.multiplicity(a) >= *m)
    }
}

/// One minimal polynomial and the roots selected from it.
#[derive(Clone, Debug)]
pub struct SpectralEntry {
    pub min_poly: RatPoly,
    pub roots: Vec<(AlgebraicNumber, u32)>,
}

/// Eigenvalue data given directly. A selected non-real root implies its
/// complex conjugate with the same multiplicity.
#[derive(Clone, Debug)]
pub struct SpectralSpec {
    entries: Vec<SpectralEntry>,
}

impl SpectralSpec {
    pub fn new(entries: Vec<SpectralEntry>) -> Result<SpectralSpec> {
        if entries.is_empty() {
            return Err(Error::Input("spectral spec has no blocks".into()));
        }
        let mut seen: Vec<AlgebraicNumber> = Vec::new();
        for e in &entries {
            if e.roots.is_empty() {
                return Err(Error::Input(format!("block for {} selects no roots", e.min_poly)));
            }
            for (r, m) in &e.roots {
                if r.min_poly() != &e.min_poly.monic() {
                    return Err(Error::Input(format!("root {r} does not belong to {}", e.min_poly)));
                }
                if *m == 0 {
                    return Err(Error::Input(format!("root {r} has multiplicity 0")));
                }
                if seen.contains(r) || seen.contains(&r.conj()) {
                    return Err(Error::Input(format!(
                        "root {r} is listed twice (a complex root already implies its conjugate)"
                    )));
                }
                seen.push(r.clone());
            }
        }
        Ok(SpectralSpec { entries })
    }

    /// Selects roots by numeric approximation.
    pub fn from_selectors(blocks: &[(RatPoly, Vec<((f64, f64), u32)>)]) -> Result<SpectralSpec> {
        let mut entries = Vec::new();
        for (p, sel) in blocks {
            let p = p.monic();
            let roots = sel
                .iter()
                .map(|(approx, m)| Ok((AlgebraicNumber::nearest(&p, *approx)?, *m)))
                .collect::<Result<Vec<_>>>()?;
            entries.push(SpectralEntry { min_poly: p, roots });
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[SpectralEntry] {
        &self.entries
    }

    /// Real dimension: complex roots count twice.
    pub fn dimension(&self) -> usize {
        self.spectrum().size()
    }

    /// The full conjugation-closed eigenvalue multiset.
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::from_items(self.entries.iter().flat_map(|e| {
            e.roots.iter().flat_map(|(r, m)| {
                let c = r.conj();
                if c == *r {
                    vec![(r.clone(), *m)]
                } else {
                    vec![(r.clone(), *m), (c, *m)]
                }
            })
        }))
    }
}

/// A candidate expansion map.
#[derive(Clone, Debug)]
pub enum ExpansionMap {
    Rational(RatMatrix),
    /// Block-diagonal real canonical form of the given eigenvalues.
    BlockSpectral(SpectralSpec),
}

impl ExpansionMap {
    pub fn dimension(&self) -> usize {
        match self {
            ExpansionMap::Rational(m) => m.nrows(),
            ExpansionMap::BlockSpectral(s) => s.dimension(),
        }
    }
}

/// `true` iff the minimal polynomial of `a` is squarefree, certified by
/// checking `rad(χ_a)(a) = 0` exactly.
pub fn is_diagonalizable(a: &RatMatrix) -> Result<bool> {
    let cp = char_poly(a)?;
    Ok(a.eval_poly(&cp.squarefree_part())?.is_zero())
}

/// Eigenvalues of a rational matrix with algebraic multiplicities, without
/// any expansion or diagonalizability check.
pub fn matrix_spectrum(a: &RatMatrix) -> Result<Spectrum> {
    let cp = char_poly(a)?;
    let mut items = Vec::new();
    for (f, e) in factor_rational(&cp)? {
        for r in AlgebraicNumber::all_roots(&f)? {
            items.push((r, e as u32));
        }
    }
    Ok(Spectrum::from_items(items))
}

/// Rejects eigenvalues of modulus at most one.
pub fn require_expanding(spec: &Spectrum) -> Result<()> {
    for (a, _) in spec.items() {
        if !a.is_expanding()? {
            let (re, im) = a.approx();
            return Err(Error::Domain(format!(
                "eigenvalue {a} has modulus {:.6} <= 1, the map is not expanding",
                re.hypot(im)
            )));
        }
    }
    Ok(())
}

/// Eigenvalue multiset of an expansion map.
pub fn eigen_data(phi: &ExpansionMap) -> Result<Spectrum> {
    let spec = match phi {
        ExpansionMap::Rational(a) => {
            a.require_square()?;
            if !is_diagonalizable(a)? {
                return Err(Error::Precondition(
                    "the matrix is not diagonalizable over C; the criterion only applies to \
                     diagonalizable expanding maps (the Jordan-block case is an open conjecture)"
                        .into(),
                ));
            }
            matrix_spectrum(a)?
        }
        ExpansionMap::BlockSpectral(s) => s.spectrum(),
    };
    require_expanding(&spec)?;
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PerronClass {
    Perron,
    ComplexPerron,
    Neither,
}

/// Perron: real and strictly larger in modulus than every other conjugate.
/// Complex Perron: non-real and strictly larger than every conjugate other
/// than its complex conjugate.
pub fn classify_perron(lambda: &AlgebraicNumber) -> Result<PerronClass> {
    if !lambda.is_algebraic_integer() {
        return Err(Error::Domain(format!("{lambda} is not an algebraic integer")));
    }
    if !lambda.is_expanding()? {
        return Err(Error::Domain(format!("{lambda} does not have modulus greater than 1")));
    }
    let bar = lambda.conj();
    for g in AlgebraicNumber::all_roots(lambda.min_poly())? {
        if g == *lambda || g == bar {
            continue;
        }
        if g.cmp_modulus(lambda)? != Ordering::Less {
            return Ok(PerronClass::Neither);
        }
    }
    Ok(if lambda.is_real() { PerronClass::Perron } else { PerronClass::ComplexPerron })
}

/// Outcome for one Galois conjugate of an eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugateReport {
    pub conjugate: AlgebraicNumber,
    /// `|γ|` compared with `|λ|`.
    #[serde(serialize_with = "witness::ser_ordering")]
    pub modulus: Ordering,
    /// Multiplicity of `γ` in the spectrum.
    pub multiplicity: u32,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenReport {
    pub eigenvalue: AlgebraicNumber,
    pub multiplicity: u32,
    pub algebraic_integer: bool,
    pub conjugates: Vec<ConjugateReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub reports: Vec<EigenReport>,
    pub failures: Vec<String>,
}

/// Checks integrality and the conjugate-multiplicity condition.
pub fn check_theorem_condition(spec: &Spectrum) -> Result<Verdict> {
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (lambda, k) in spec.items() {
        let integral = lambda.is_algebraic_integer();
        if !integral {
            failures.push(format!(
                "eigenvalue {lambda} is not an algebraic integer (every eigenvalue must be one)"
            ));
        }
        let mut conjugates = Vec::new();
        for g in AlgebraicNumber::all_roots(lambda.min_poly())? {
            if g == *lambda {
                continue;
            }
            let modulus = g.cmp_modulus(lambda)?;
            let found = spec.multiplicity(&g);
            let ok = modulus == Ordering::Less || found >= *k;
            if !ok {
                failures.push(format!(
                    "conjugate {g} of eigenvalue {lambda} (multiplicity {k}) has modulus {} and multiplicity {found} < {k}",
                    if modulus == Ordering::Equal { "equal" } else { "larger" }
                ));
            }
            conjugates.push(ConjugateReport { conjugate: g, modulus, multiplicity: found, ok });
        }
        reports.push(EigenReport { eigenvalue: lambda.clone(), multiplicity: *k, algebraic_integer: integral, conjugates });
    }
    Ok(Verdict { pass: failures.is_empty(), reports, failures })
}
