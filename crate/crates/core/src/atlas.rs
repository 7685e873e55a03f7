//! Exact idempotent-index computation over `M_n(GF(p))` by exhaustive
//! breadth-first closure of the semigroup generated by the idempotents.
//!
//! Layer `t` holds the matrices of index exactly `t`: `S_1` is the idempotent
//! set itself (with `0` and `I` assigned index one by convention), and
//! `S_t = S_{t−1}·E` minus everything already reached. The cumulative set
//! `E^t` is the union of the first `t` layers. Matrices are interned to
//! base-`p` packed integer keys; iteration is in ascending key order and
//! witness ties break toward the smallest `(prefix, factor)` pair, so the
//! atlas — and any parallel construction of it — reproduces the sequential
//! result exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::decomp::local_block_rep;
use crate::douglas::range_included;
use crate::field::{Gf, Scalar};
use crate::matrix::Matrix;

/// Scalars of a small prime field, with residue packing for interning.
pub trait PrimeField: Scalar {
    const P: u64;

    fn from_residue(r: u64) -> Self;
    fn residue(&self) -> u64;
}

impl<const P: u64> PrimeField for Gf<P>
where
    Gf<P>: Scalar,
{
    const P: u64 = P;

    fn from_residue(r: u64) -> Self {
        Gf::new(r)
    }

    fn residue(&self) -> u64 {
        Gf::residue(*self)
    }
}

pub type MatKey = u64;

const MAX_SPACE: u64 = 2_000_000;
const UNREACHED: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtlasError {
    TooLarge { n: usize, p: u64, space: u64 },
}

impl fmt::Display for AtlasError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtlasError::TooLarge { n, p, space } => write!(
                f,
                "M_{n}(GF({p})) has {space} elements, beyond the exhaustive-search budget of {MAX_SPACE}"
            ),
        }
    }
}

impl std::error::Error for AtlasError {}

/// Idempotent index of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpIndex {
    Finite(u32),
    Infinite,
}

impl fmt::Display for OpIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpIndex::Finite(t) => write!(f, "{t}"),
            OpIndex::Infinite => write!(f, "infinity"),
        }
    }
}

pub fn pack<F: PrimeField>(m: &Matrix<F>) -> MatKey {
    m.entries()
        .iter()
        .rev()
        .fold(0u64, |acc, e| acc * F::P + e.residue())
}

pub fn unpack<F: PrimeField>(mut key: MatKey, n: usize) -> Matrix<F> {
    let entries = (0..n * n)
        .map(|_| {
            let digit = key % F::P;
            key /= F::P;
            F::from_residue(digit)
        })
        .collect();
    Matrix::new(n, n, entries)
}

fn space_size<F: PrimeField>(n: usize) -> Result<u64, AtlasError> {
    let space = (F::P as u128).checked_pow((n * n) as u32);
    match space {
        Some(s) if s <= MAX_SPACE as u128 && n <= 3 => Ok(s as u64),
        _ => Err(AtlasError::TooLarge {
            n,
            p: F::P,
            space: space
                .map(|s| s.min(u64::MAX as u128) as u64)
                .unwrap_or(u64::MAX),
        }),
    }
}

/// Exactly the set `{ M : M² = M }` in `M_n(GF(p))`, in ascending key order.
pub fn enumerate_idempotents<F: PrimeField>(n: usize) -> Result<Vec<Matrix<F>>, AtlasError> {
    let space = space_size::<F>(n)?;
    Ok((0..space)
        .map(|key| unpack::<F>(key, n))
        .filter(|m| m.mul(m) == *m)
        .collect())
}

/// The full index atlas of `M_n(GF(p))`: layers, index map, and one minimal
/// factorization witness per reachable matrix.
pub struct IndexAtlas<F: PrimeField> {
    n: usize,
    t_max: usize,
    closed: bool,
    idempotent_keys: Vec<MatKey>,
    layers: Vec<Vec<MatKey>>,
    index_of: Vec<u8>,
    /// Parent chain for witness reconstruction: `witness(m) = witness(parent) ++ [factor]`.
    parent: Vec<u32>,
    last_factor: Vec<u32>,
    _marker: PhantomData<F>,
}

/// Build the atlas by BFS over product layers until closure or `t_max`.
/// `threads > 1` partitions each frontier across workers; the merge keeps the
/// smallest `(prefix, factor)` pair per new element, which is exactly the
/// sequential result.
pub fn build_atlas<F: PrimeField>(
    n: usize,
    t_max: usize,
    threads: usize,
) -> Result<IndexAtlas<F>, AtlasError> {
    let space = space_size::<F>(n)? as usize;
    let t_max = t_max.clamp(1, 250);
    let idempotents = enumerate_idempotents::<F>(n)?;
    let idempotent_keys: Vec<MatKey> = idempotents.iter().map(pack).collect();
    let idem_mats: Vec<Matrix<F>> = idempotents;

    let mut index_of = vec![UNREACHED; space];
    let mut parent = vec![u32::MAX; space];
    let mut last_factor = vec![u32::MAX; space];
    for &k in &idempotent_keys {
        index_of[k as usize] = 1;
        last_factor[k as usize] = k as u32;
    }

    let mut layers = vec![idempotent_keys.clone()];
    let mut frontier: Vec<MatKey> = idempotent_keys.clone();
    let mut closed = false;

    for t in 2..=t_max {
        let frontier_mats: Vec<(MatKey, Matrix<F>)> =
            frontier.iter().map(|&k| (k, unpack::<F>(k, n))).collect();
        // Candidate products w·e with the smallest (w, e) kept per result.
        let mut best: BTreeMap<MatKey, (MatKey, MatKey)> = BTreeMap::new();
        let chunks: Vec<&[(MatKey, Matrix<F>)]> = if threads > 1 {
            frontier_mats
                .chunks(frontier_mats.len().div_ceil(threads))
                .collect()
        } else {
            vec![&frontier_mats[..]]
        };
        let partials: Vec<Vec<(MatKey, MatKey, MatKey)>> = if chunks.len() > 1 {
            std::thread::scope(|scope| {
                let handles: Vec<_> = chunks
                    .iter()
                    .map(|chunk| {
                        let idem = &idem_mats;
                        let keys = &idempotent_keys;
                        let index_of = &index_of;
                        scope.spawn(move || expand_chunk::<F>(chunk, idem, keys, index_of))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker"))
                    .collect()
            })
        } else {
            vec![expand_chunk::<F>(
                &frontier_mats,
                &idem_mats,
                &idempotent_keys,
                &index_of,
            )]
        };
        for partial in partials {
            for (m_key, w_key, e_key) in partial {
                best.entry(m_key)
                    .and_modify(|cur| {
                        if (w_key, e_key) < *cur {
                            *cur = (w_key, e_key);
                        }
                    })
                    .or_insert((w_key, e_key));
            }
        }

        let mut new_layer = Vec::with_capacity(best.len());
        for (m_key, (w_key, e_key)) in best {
            index_of[m_key as usize] = t as u8;
            parent[m_key as usize] = w_key as u32;
            last_factor[m_key as usize] = e_key as u32;
            new_layer.push(m_key);
        }
        if new_layer.is_empty() {
            closed = true;
            break;
        }
        frontier = new_layer.clone();
        layers.push(new_layer);
    }

    Ok(IndexAtlas {
        n,
        t_max,
        closed,
        idempotent_keys,
        layers,
        index_of,
        parent,
        last_factor,
        _marker: PhantomData,
    })
}

fn expand_chunk<F: PrimeField>(
    chunk: &[(MatKey, Matrix<F>)],
    idempotents: &[Matrix<F>],
    idempotent_keys: &[MatKey],
    index_of: &[u8],
) -> Vec<(MatKey, MatKey, MatKey)> {
    let mut out = Vec::new();
    for (w_key, w) in chunk {
        for (e, &e_key) in idempotents.iter().zip(idempotent_keys) {
            let m = w.mul(e);
            let m_key = pack(&m);
            if index_of[m_key as usize] == UNREACHED {
                out.push((m_key, *w_key, e_key));
            }
        }
    }
    out
}

/// Structural audit of every stored minimal witness of length at least two.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub witnesses_checked: usize,
    pub violations: Vec<String>,
}

impl<F: PrimeField> IndexAtlas<F> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        F::P
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    /// True when the BFS reached closure before `t_max`.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn idempotent_count(&self) -> usize {
        self.idempotent_keys.len()
    }

    pub fn idempotent_keys(&self) -> &[MatKey] {
        &self.idempotent_keys
    }

    /// `S_t` as packed keys, ascending; `t` is 1-based.
    pub fn layer(&self, t: usize) -> Option<&[MatKey]> {
        self.layers.get(t - 1).map(Vec::as_slice)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Matrices with a finite index.
    pub fn reachable_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// The cumulative product set at depth `t`: every matrix expressible as
    /// a product of at most `t` idempotents, i.e. the union of the first `t`
    /// layers. The exact-index layer `S_t` is a proper subset whenever an
    /// earlier layer is non-empty.
    pub fn cumulative(&self, t: usize) -> Vec<MatKey> {
        let mut keys: Vec<MatKey> = self
            .layers
            .iter()
            .take(t)
            .flat_map(|l| l.iter().copied())
            .collect();
        keys.sort_unstable();
        keys
    }

    /// `|S_t|` per index `t`.
    pub fn histogram(&self) -> BTreeMap<u32, usize> {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| (i as u32 + 1, l.len()))
            .collect()
    }

    pub fn index_of(&self, m: &Matrix<F>) -> OpIndex {
        let key = pack(m) as usize;
        match self.index_of[key] {
            UNREACHED => OpIndex::Infinite,
            t => OpIndex::Finite(t as u32),
        }
    }

    pub fn index_of_key(&self, key: MatKey) -> OpIndex {
        match self.index_of[key as usize] {
            UNREACHED => OpIndex::Infinite,
            t => OpIndex::Finite(t as u32),
        }
    }

    /// The zero and identity matrices carry index one by convention even
    /// though they are excluded from the non-trivial product set.
    pub fn is_trivial(&self, m: &Matrix<F>) -> bool {
        m.is_zero_matrix() || m.is_identity_matrix()
    }

    /// One minimal idempotent factorization, reconstructed from the parent
    /// chain. Length equals the index.
    pub fn witness_of(&self, m: &Matrix<F>) -> Option<Vec<Matrix<F>>> {
        let key = pack(m);
        if self.index_of[key as usize] == UNREACHED {
            return None;
        }
        let mut factors: Vec<MatKey> = Vec::new();
        let mut cur = key;
        loop {
            factors.push(self.last_factor[cur as usize] as MatKey);
            let p = self.parent[cur as usize];
            if p == u32::MAX {
                break;
            }
            cur = p as MatKey;
        }
        factors.reverse();
        Some(
            factors
                .into_iter()
                .map(|k| unpack::<F>(k, self.n))
                .collect(),
        )
    }

    /// `S_{s+t} ⊆ S_s·S_t`.
    pub fn layer_product_contains(&self, s: usize, t: usize) -> bool {
        let (Some(ls), Some(lt), Some(lst)) = (self.layer(s), self.layer(t), self.layer(s + t))
        else {
            // An empty later layer is contained in anything.
            return self.layer(s + t).is_none_or(|l| l.is_empty());
        };
        let mut products = std::collections::HashSet::new();
        for &a in ls {
            let ma = unpack::<F>(a, self.n);
            for &b in lt {
                let mb = unpack::<F>(b, self.n);
                products.insert(pack(&ma.mul(&mb)));
            }
        }
        lst.iter().all(|k| products.contains(k))
    }

    /// Check every minimal witness of length `t ≥ 2` against the structure
    /// theory: consecutive ranges mutually non-containing, the peeled tail of
    /// index exactly `t−1` and rank at least `rank(T)`, and the head factor
    /// of the form `[I, B; 0, 0]` in the block coordinates of its own range.
    pub fn verify_minimal_structure(&self) -> StructureReport {
        let mut violations = Vec::new();
        let mut checked = 0usize;
        for layer in self.layers.iter().skip(1) {
            for &key in layer {
                let m = unpack::<F>(key, self.n);
                let t = match self.index_of_key(key) {
                    OpIndex::Finite(t) => t as usize,
                    OpIndex::Infinite => unreachable!("layer member is reachable"),
                };
                let factors = self.witness_of(&m).expect("reachable matrix has a witness");
                checked += 1;

                if factors.len() != t {
                    violations.push(format!(
                        "key {key}: witness length {} != index {t}",
                        factors.len()
                    ));
                    continue;
                }
                if factors.iter().any(|f| f.mul(f) != *f) {
                    violations.push(format!("key {key}: non-idempotent witness factor"));
                }
                if Matrix::product(&factors) != m {
                    violations.push(format!("key {key}: witness product mismatch"));
                }

                for j in 0..factors.len() - 1 {
                    let ra = factors[j].colspace_basis();
                    let rb = factors[j + 1].colspace_basis();
                    let ab = range_included(&ra, &rb).expect("square factors");
                    let ba = range_included(&rb, &ra).expect("square factors");
                    if ab || ba {
                        violations.push(format!(
                            "key {key}: consecutive witness ranges at {j} are nested"
                        ));
                    }
                }

                let tail = Matrix::product(&factors[1..]);
                match self.index_of(&tail) {
                    OpIndex::Finite(ti) if ti as usize == t - 1 => {}
                    other => violations.push(format!(
                        "key {key}: peeled tail has index {other}, expected {}",
                        t - 1
                    )),
                }
                if tail.rank() < m.rank() {
                    violations.push(format!("key {key}: peeled tail rank dropped below rank(T)"));
                }

                match local_block_rep(&factors[0]) {
                    Ok(rep) => {
                        if !rep.t1().is_identity_matrix() {
                            violations.push(format!(
                                "key {key}: head factor is not [I, B; 0, 0] on its range"
                            ));
                        }
                    }
                    Err(e) => violations.push(format!(
                        "key {key}: head factor has no local representation: {e}"
                    )),
                }
            }
        }
        StructureReport {
            witnesses_checked: checked,
            violations,
        }
    }
}
