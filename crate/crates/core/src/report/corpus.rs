use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::{
    double_extension, flat_kahler_abelian, flat_kahler_abelian_with_metric, flat_kahler_euclidean,
    heisenberg_tilted_structure, hopf_surface_structure, inoue_type_structure, kodaira_structure,
    ot_solvable_structure, pair_rotation, random_ratio, random_unitary_derivation, DoubleExtensionSpec,
    FlatKahlerAlgebra,
};
use crate::error::Result;
use crate::hermitian::HermitianStructure;
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Kodaira,
    Ot,
    DoubleExtension,
    HopfSurface,
    InoueType,
    Heisenberg,
    FlatKahler,
    File,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: EntryKind,
    pub structure: HermitianStructure<Rational>,
    /// Flat Kähler base for double extensions.
    pub base: Option<FlatKahlerAlgebra<Rational>>,
}

impl CorpusEntry {
    fn new(name: impl Into<String>, kind: EntryKind, structure: HermitianStructure<Rational>) -> Self {
        Self {
            name: name.into(),
            kind,
            structure,
            base: None,
        }
    }
}

pub const DOUBLE_EXTENSION_SEEDS: u64 = 20;

type Q = Rational;

fn positive_weight(rng: &mut ChaCha8Rng) -> Q {
    let w: Q = random_ratio(rng, 4, 3);
    w.abs() + Q::ratio(1, 2)
}

/// Flat Kähler base family for random double extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    /// Abelian `ℝ^{2p}` with random pair weights and a random `u(p)` derivation.
    Abelian,
    /// `e(2) ⊕ ℝ^{2p-4}` with random rotations of the central pairs.
    Euclidean,
}

/// Random admissible double extension over a base of complex dimension
/// `pairs`, from a ChaCha8 stream seeded with `seed`.
pub fn random_double_extension_on(
    kind: BaseKind,
    pairs: usize,
    seed: u64,
) -> Result<(HermitianStructure<Q>, FlatKahlerAlgebra<Q>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (base, d) = match kind {
        BaseKind::Abelian => {
            let weights: Vec<Q> = (0..pairs).map(|_| positive_weight(&mut rng)).collect();
            let base = flat_kahler_abelian_with_metric(2 * pairs, &weights)?;
            let d = random_unitary_derivation(&mut rng, &weights);
            (base, d)
        }
        BaseKind::Euclidean => {
            let weights: Vec<Q> = (0..pairs).map(|_| positive_weight(&mut rng)).collect();
            let base = flat_kahler_euclidean(&weights)?;
            let m = base.dim();
            let mut d = Matrix::zeros(m, m);
            for pair in 1..pairs {
                let c: Q = random_ratio(&mut rng, 3, 2);
                d = d.add(&pair_rotation(m, 2 * pair, c));
            }
            (base, d)
        }
    };
    let spec = DoubleExtensionSpec::on_base(base.clone(), d)?;
    Ok((double_extension(&spec)?, base))
}

/// Corpus double extension number `seed`: seeds below 15 use abelian bases
/// of complex dimension `1 + seed % 3`, the rest `e(2)` bases of complex
/// dimension `2 + seed % 2`.
pub fn random_double_extension(seed: u64) -> Result<(HermitianStructure<Q>, FlatKahlerAlgebra<Q>)> {
    if seed < 15 {
        random_double_extension_on(BaseKind::Abelian, 1 + (seed % 3) as usize, seed)
    } else {
        random_double_extension_on(BaseKind::Euclidean, 2 + (seed % 2) as usize, seed)
    }
}

/// The built-in corpus, sorted by name.
pub fn builtin_corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push(CorpusEntry::new(
            format!("kodaira_n{n}"),
            EntryKind::Kodaira,
            kodaira_structure(n)?,
        ));
    }
    for s in 1..=3usize {
        out.push(CorpusEntry::new(
            format!("ot_s{s}"),
            EntryKind::Ot,
            ot_solvable_structure(s, None)?,
        ));
        let angles: Vec<Q> = (0..s).map(|j| Q::ratio(2 * j as i64 + 1, 3)).collect();
        out.push(CorpusEntry::new(
            format!("ot_s{s}_rotated"),
            EntryKind::Ot,
            ot_solvable_structure(s, Some(&angles))?,
        ));
    }
    for seed in 0..DOUBLE_EXTENSION_SEEDS {
        let (h, base) = random_double_extension(seed)?;
        let label = if seed < 15 { "abelian" } else { "euclidean" };
        let mut e = CorpusEntry::new(
            format!("double_extension_{label}_{seed:02}"),
            EntryKind::DoubleExtension,
            h,
        );
        e.base = Some(base);
        out.push(e);
    }
    out.push(CorpusEntry::new(
        "hopf_surface",
        EntryKind::HopfSurface,
        hopf_surface_structure()?,
    ));
    for (name, c) in [
        ("inoue_type_c1", Q::from_int(1)),
        ("inoue_type_cm1", Q::from_int(-1)),
        ("inoue_type_c2_3", Q::ratio(2, 3)),
    ] {
        out.push(CorpusEntry::new(name, EntryKind::InoueType, inoue_type_structure(c)?));
    }
    out.push(CorpusEntry::new(
        "heisenberg_3",
        EntryKind::Heisenberg,
        heisenberg_tilted_structure(Q::ratio(1, 3))?,
    ));
    let flat = flat_kahler_abelian::<Q>(4)?;
    out.push(CorpusEntry::new(
        "abelian_kahler_4",
        EntryKind::FlatKahler,
        HermitianStructure::new(flat.alg, flat.j.matrix().clone(), flat.g.matrix().clone())?,
    ));
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
