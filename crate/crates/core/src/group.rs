//! Finite groups as dense multiplication tables.
//!
//! Every group in this crate lives here: a validated order x order Cayley
//! table over canonically indexed elements, with the identity pinned at
//! index 0. Construction validates the table (exhaustive associativity up
//! to order 512, seeded sampling above), and everything downstream --
//! centralizers, products, quotients, series -- is a pure function on the
//! immutable table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;

/// Order above which associativity is checked by sampling instead of all
/// `order^3` triples (unless `strict_associativity` forces exhaustive).
pub const EXHAUSTIVE_ASSOC_LIMIT: usize = 512;

/// Order above which construction is considered expensive; the CLI warns.
pub const WARN_ORDER: usize = 512;

/// Default hard cap on group order (dense tables are O(n^2) memory).
pub const DEFAULT_MAX_ORDER: usize = 2048;

/// Construction-time limits.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_order: usize,
    pub strict_associativity: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: DEFAULT_MAX_ORDER,
            strict_associativity: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("table is not {expected}x{expected}: row {row} has length {got}")]
    BadDimensions {
        expected: usize,
        row: usize,
        got: usize,
    },
    #[error("not a group: {reason}")]
    NotAGroup { reason: String },
    #[error("generator {index} is not a permutation of 1..={degree}: {reason}")]
    NotAPermutation {
        index: usize,
        degree: usize,
        reason: String,
    },
    #[error("order cap exceeded: order {order} > cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("subgroup is not normal: conjugate of member {member} by {conjugator} falls outside")]
    NotNormal { member: usize, conjugator: usize },
    #[error("element {element} is not central in its group")]
    NotCentral { element: usize },
    #[error("central elements have different orders: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("order {order} is not a prime power")]
    NotPGroup { order: usize },
    #[error("not a subgroup of this group: {reason}")]
    NotASubgroup { reason: String },
}

/// A subgroup of a parent group, stored as a membership bit-vector over the
/// parent's element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    parent_order: usize,
    members: BitSet,
    size: usize,
}

impl Subgroup {
    pub(crate) fn from_bits(members: BitSet) -> Self {
        let size = members.count();
        Subgroup {
            parent_order: members.len(),
            members,
            size,
        }
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.to_vec()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset_of(&other.members)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_bits(self.members.intersection(&other.members))
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    /// Canonical order: by size, then lexicographically by member indices.
    pub fn canonical_cmp(&self, other: &Subgroup) -> std::cmp::Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.members.cmp_lex(&other.members))
    }
}

impl std::fmt::Debug for Subgroup {
    fmt_debug_subgroup!();
}

macro_rules! fmt_debug_subgroup {
    () => {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            write!(f, "Subgroup(|H|={}, {:?})", self.size, self.members)
        }
    };
}
use fmt_debug_subgroup;

/// Structural invariants of a p-group: exponent, minimal generator count,
/// nilpotency class and the lower central series.
#[derive(Debug, Clone)]
pub struct StructureScalars {
    pub exponent: u64,
    pub min_generators: u32,
    pub nilpotency_class: u32,
    /// G = G_1 >= G_2 >= ... down to (and including) the trivial subgroup.
    pub lower_central_series: Vec<Subgroup>,
}

/// A finite group on elements `0..order` with identity at index 0.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    element_names: Option<Vec<String>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn conjugate(&self, g: usize, by: usize) -> usize {
        self.mul(self.mul(self.inv(by), g), by)
    }

    /// [a, b] = a^-1 b^-1 a b.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    pub fn element_name(&self, g: usize) -> String {
        match &self.element_names {
            Some(names) => names[g].clone(),
            None => g.to_string(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn table_row(&self, g: usize) -> &[u16] {
        &self.table[g * self.order..(g + 1) * self.order]
    }

    // ---- construction ----------------------------------------------------

    pub fn from_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_table_with(table, &Limits::default())
    }

    pub fn from_table_with(table: &[Vec<usize>], limits: &Limits) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::NotAGroup {
                reason: "empty table".into(),
            });
        }
        if order > limits.max_order {
            return Err(GroupError::OrderCapExceeded {
                order,
                cap: limits.max_order,
            });
        }
        let mut flat = Vec::with_capacity(order * order);
        for (row, r) in table.iter().enumerate() {
            if r.len() != order {
                return Err(GroupError::BadDimensions {
                    expected: order,
                    row,
                    got: r.len(),
                });
            }
            for &e in r {
                if e >= order {
                    return Err(GroupError::NotAGroup {
                        reason: format!("entry {e} out of range in row {row}"),
                    });
                }
                flat.push(e as u16);
            }
        }
        Self::validated(order, flat, None, limits)
    }

    /// Builds and validates a table from a multiplication function on
    /// indices. Used by the normal-form family constructors.
    pub(crate) fn from_mul_fn(
        order: usize,
        names: Option<Vec<String>>,
        f: impl Fn(usize, usize) -> usize,
        limits: &Limits,
    ) -> Result<Self, GroupError> {
        if order > limits.max_order {
            return Err(GroupError::OrderCapExceeded {
                order,
                cap: limits.max_order,
            });
        }
        let mut flat = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                let p = f(a, b);
                debug_assert!(p < order);
                flat.push(p as u16);
            }
        }
        Self::validated(order, flat, names, limits)
    }

    /// Full validation pipeline: identity (relabelled to 0 if found
    /// elsewhere), Latin-square rows/columns, inverses, associativity.
    fn validated(
        order: usize,
        mut flat: Vec<u16>,
        mut names: Option<Vec<String>>,
        limits: &Limits,
    ) -> Result<Self, GroupError> {
        let at = |t: &[u16], a: usize, b: usize| t[a * order + b] as usize;

        // Locate the two-sided identity.
        let identity = (0..order).find(|&e| {
            (0..order).all(|h| at(&flat, e, h) == h) && (0..order).all(|g| at(&flat, g, e) == g)
        });
        let identity = identity.ok_or_else(|| GroupError::NotAGroup {
            reason: "no two-sided identity element".into(),
        })?;

        if identity != 0 {
            // Relabel by the transposition swapping 0 and the identity.
            let sigma = |x: usize| {
                if x == identity {
                    0
                } else if x == 0 {
                    identity
                } else {
                    x
                }
            };
            let mut relabelled = vec![0u16; order * order];
            for a in 0..order {
                for b in 0..order {
                    relabelled[sigma(a) * order + sigma(b)] = sigma(at(&flat, a, b)) as u16;
                }
            }
            flat = relabelled;
            if let Some(n) = names.as_mut() {
                n.swap(0, identity);
            }
        }

        // Rows and columns must be permutations (cancellation).
        let mut seen = vec![false; order];
        for a in 0..order {
            seen.fill(false);
            for b in 0..order {
                let p = at(&flat, a, b);
                if seen[p] {
                    return Err(GroupError::NotAGroup {
                        reason: format!("row {a} repeats product {p}"),
                    });
                }
                seen[p] = true;
            }
        }
        for b in 0..order {
            seen.fill(false);
            for a in 0..order {
                let p = at(&flat, a, b);
                if seen[p] {
                    return Err(GroupError::NotAGroup {
                        reason: format!("column {b} repeats product {p}"),
                    });
                }
                seen[p] = true;
            }
        }

        // Two-sided inverses.
        let mut inverse = vec![0u16; order];
        for g in 0..order {
            let h = (0..order)
                .find(|&h| at(&flat, g, h) == 0)
                .ok_or_else(|| GroupError::NotAGroup {
                    reason: format!("element {g} has no right inverse"),
                })?;
            if at(&flat, h, g) != 0 {
                return Err(GroupError::NotAGroup {
                    reason: format!("right inverse {h} of {g} is not a left inverse"),
                });
            }
            inverse[g] = h as u16;
        }

        // Associativity: exhaustive at small orders, seeded sampling above.
        let check = |a: usize, b: usize, c: usize| -> Result<(), GroupError> {
            let left = at(&flat, at(&flat, a, b), c);
            let right = at(&flat, a, at(&flat, b, c));
            if left != right {
                return Err(GroupError::NotAGroup {
                    reason: format!("associativity fails at triple ({a}, {b}, {c})"),
                });
            }
            Ok(())
        };
        if order <= EXHAUSTIVE_ASSOC_LIMIT || limits.strict_associativity {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0xCD1A7 ^ order as u64);
            for _ in 0..10 * order * order {
                let a = rng.gen_range(0..order);
                let b = rng.gen_range(0..order);
                let c = rng.gen_range(0..order);
                check(a, b, c)?;
            }
        }

        Ok(FiniteGroup {
            order,
            table: flat,
            inverse,
            element_names: names,
        })
    }

    pub fn from_permutation_generators(
        degree: usize,
        generators: &[Permutation],
    ) -> Result<Self, GroupError> {
        Self::from_permutation_generators_with(degree, generators, &Limits::default())
    }

    /// Breadth-first closure of the generated permutation group. Elements
    /// are indexed by discovery order: identity first, then products in BFS
    /// order over the generators as given.
    pub fn from_permutation_generators_with(
        degree: usize,
        generators: &[Permutation],
        limits: &Limits,
    ) -> Result<Self, GroupError> {
        for (index, g) in generators.iter().enumerate() {
            if let Err(reason) = g.check(degree) {
                return Err(GroupError::NotAPermutation {
                    index,
                    degree,
                    reason,
                });
            }
        }

        let identity = Permutation::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut index_of = std::collections::HashMap::new();
        index_of.insert(identity.images.clone(), 0usize);

        let mut head = 0;
        while head < elements.len() {
            let current = elements[head].clone();
            for gen in generators {
                let next = current.compose(gen);
                if !index_of.contains_key(&next.images) {
                    if elements.len() >= limits.max_order {
                        return Err(GroupError::OrderCapExceeded {
                            order: elements.len() + 1,
                            cap: limits.max_order,
                        });
                    }
                    index_of.insert(next.images.clone(), elements.len());
                    elements.push(next);
                }
            }
            head += 1;
        }

        let order = elements.len();
        let names = elements.iter().map(|p| p.cycle_notation()).collect();
        let mut flat = Vec::with_capacity(order * order);
        for a in &elements {
            for b in &elements {
                let p = a.compose(b);
                flat.push(index_of[&p.images] as u16);
            }
        }
        Self::validated(order, flat, Some(names), limits)
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> Result<Self, GroupError> {
        self.direct_product_with(other, &Limits::default())
    }

    /// Componentwise product; element (g, h) gets index g*|H| + h.
    pub fn direct_product_with(
        &self,
        other: &FiniteGroup,
        limits: &Limits,
    ) -> Result<Self, GroupError> {
        let m = other.order;
        let order = self.order * m;
        FiniteGroup::from_mul_fn(
            order,
            None,
            |a, b| {
                let (g1, h1) = (a / m, a % m);
                let (g2, h2) = (b / m, b % m);
                self.mul(g1, g2) * m + other.mul(h1, h2)
            },
            limits,
        )
    }

    /// Quotient by a normal subgroup; cosets are represented by their least
    /// element index and reindexed in ascending representative order.
    pub fn quotient(&self, n: &Subgroup) -> Result<Self, GroupError> {
        Ok(self.quotient_with_map(n)?.0)
    }

    /// Quotient plus the projection map from element index to coset index.
    pub fn quotient_with_map(&self, n: &Subgroup) -> Result<(Self, Vec<usize>), GroupError> {
        self.check_subgroup(n)?;
        let members = n.elements();
        // Normality, with a conjugation witness on failure.
        for &x in &members {
            for g in 0..self.order {
                if !n.contains(self.conjugate(x, g)) {
                    return Err(GroupError::NotNormal {
                        member: x,
                        conjugator: g,
                    });
                }
            }
        }

        // Left-coset representative = least member index.
        let mut rep = vec![usize::MAX; self.order];
        for g in 0..self.order {
            let r = members.iter().map(|&x| self.mul(g, x)).min().unwrap();
            rep[g] = r;
        }
        let mut reps: Vec<usize> = rep.iter().copied().collect();
        reps.sort_unstable();
        reps.dedup();
        let coset_index: std::collections::HashMap<usize, usize> =
            reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let projection: Vec<usize> = (0..self.order).map(|g| coset_index[&rep[g]]).collect();

        let q_order = reps.len();
        let q = FiniteGroup::from_mul_fn(
            q_order,
            None,
            |a, b| projection[self.mul(reps[a], reps[b])],
            &Limits {
                max_order: self.order,
                strict_associativity: false,
            },
        )?;
        Ok((q, projection))
    }

    /// Central product (G x H) / <(zg, zh^-1)>, identifying the two given
    /// central elements of equal order o > 1. Order is |G|*|H|/o.
    pub fn central_product(
        g: &FiniteGroup,
        h: &FiniteGroup,
        zg: usize,
        zh: usize,
    ) -> Result<Self, GroupError> {
        Self::central_product_with(g, h, zg, zh, &Limits::default())
    }

    pub fn central_product_with(
        g: &FiniteGroup,
        h: &FiniteGroup,
        zg: usize,
        zh: usize,
        limits: &Limits,
    ) -> Result<Self, GroupError> {
        let central = |grp: &FiniteGroup, z: usize| (0..grp.order).all(|x| grp.mul(z, x) == grp.mul(x, z));
        if !central(g, zg) {
            return Err(GroupError::NotCentral { element: zg });
        }
        if !central(h, zh) {
            return Err(GroupError::NotCentral { element: zh });
        }
        let og = g.element_order(zg);
        let oh = h.element_order(zh);
        if og != oh || og == 1 {
            return Err(GroupError::OrderMismatch {
                left: og,
                right: oh,
            });
        }

        let product = g.direct_product_with(h, limits)?;
        // Diagonal <(zg, zh^-1)> in the product indexing.
        let mut diag = BitSet::new(product.order);
        let (mut x, mut y) = (0usize, 0usize);
        loop {
            diag.insert(x * h.order + y);
            x = g.mul(x, zg);
            y = h.mul(y, h.inv(zh));
            if x == 0 && y == 0 {
                break;
            }
        }
        product.quotient(&Subgroup::from_bits(diag))
    }

    // ---- subgroup machinery ------------------------------------------------

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut bits = BitSet::new(self.order);
        bits.insert(0);
        Subgroup::from_bits(bits)
    }

    pub fn full_subgroup(&self) -> Subgroup {
        let mut bits = BitSet::new(self.order);
        for g in 0..self.order {
            bits.insert(g);
        }
        Subgroup::from_bits(bits)
    }

    pub fn cyclic_subgroup(&self, g: usize) -> Subgroup {
        let mut bits = BitSet::new(self.order);
        let mut x = 0;
        loop {
            bits.insert(x);
            x = self.mul(x, g);
            if x == 0 {
                break;
            }
        }
        Subgroup::from_bits(bits)
    }

    /// Product-closure of a seed set (which must contain the identity).
    /// Finite order makes closure under products imply closure under
    /// inverses.
    pub fn closure(&self, seed: &BitSet) -> Subgroup {
        debug_assert!(seed.contains(0));
        let mut bits = seed.clone();
        let mut list = bits.to_vec();
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for j in 0..=i {
                let y = list[j];
                for p in [self.mul(x, y), self.mul(y, x)] {
                    if !bits.contains(p) {
                        bits.insert(p);
                        list.push(p);
                    }
                }
            }
            i += 1;
        }
        Subgroup::from_bits(bits)
    }

    /// Greedy generating sequence for a subgroup: repeatedly adjoin the
    /// least member not yet generated.
    pub fn generating_set(&self, h: &Subgroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.trivial_subgroup();
        while span.size() < h.size() {
            let next = h
                .members()
                .iter()
                .find(|&g| !span.contains(g))
                .expect("span is a proper subset of h");
            gens.push(next);
            let mut seed = span.members().clone();
            seed.insert(next);
            span = self.closure(&seed);
        }
        gens
    }

    /// C_G(H) = {g : gh = hg for all h in H}, computed against a generating
    /// set of H (identical to the all-members definition).
    pub fn centralizer(&self, h: &Subgroup) -> Subgroup {
        let gens = self.generating_set(h);
        let mut bits = BitSet::new(self.order);
        for g in 0..self.order {
            if gens.iter().all(|&x| self.mul(g, x) == self.mul(x, g)) {
                bits.insert(g);
            }
        }
        Subgroup::from_bits(bits)
    }

    pub fn center(&self) -> Subgroup {
        self.centralizer(&self.full_subgroup())
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        h.elements()
            .iter()
            .all(|&x| (0..self.order).all(|g| h.contains(self.conjugate(x, g))))
    }

    pub fn is_cyclic_subgroup(&self, h: &Subgroup) -> bool {
        h.members().iter().any(|g| self.element_order(g) == h.size())
    }

    pub fn subgroup_is_abelian(&self, h: &Subgroup) -> bool {
        let elems = h.elements();
        elems
            .iter()
            .all(|&a| elems.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    fn check_subgroup(&self, h: &Subgroup) -> Result<(), GroupError> {
        if h.parent_order() != self.order {
            return Err(GroupError::NotASubgroup {
                reason: format!(
                    "parent order {} does not match group order {}",
                    h.parent_order(),
                    self.order
                ),
            });
        }
        if !h.contains(0) {
            return Err(GroupError::NotASubgroup {
                reason: "identity missing".into(),
            });
        }
        Ok(())
    }

    /// Reindexes a subgroup as a standalone group (members in ascending
    /// index order become 0..|H|). Returns the group and the member list
    /// mapping local index -> parent index.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        self.check_subgroup(h)?;
        let members = h.elements();
        let mut local = std::collections::HashMap::new();
        for (i, &g) in members.iter().enumerate() {
            local.insert(g, i);
        }
        let group = FiniteGroup::from_mul_fn(
            members.len(),
            self.element_names
                .as_ref()
                .map(|n| members.iter().map(|&g| n[g].clone()).collect()),
            |a, b| {
                let p = self.mul(members[a], members[b]);
                *local.get(&p).unwrap_or(&usize::MAX)
            },
            &Limits {
                max_order: self.order,
                strict_associativity: false,
            },
        )?;
        Ok((group, members))
    }

    // ---- series and scalars ------------------------------------------------

    /// Exponent, d(G), nilpotency class, and the lower central series.
    /// d(G) comes from the Frattini quotient, so the order must be a prime
    /// power (or 1).
    pub fn structure(&self) -> Result<StructureScalars, GroupError> {
        if self.order == 1 {
            return Ok(StructureScalars {
                exponent: 1,
                min_generators: 0,
                nilpotency_class: 0,
                lower_central_series: vec![self.trivial_subgroup()],
            });
        }
        let (p, _) = prime_power(self.order).ok_or(GroupError::NotPGroup { order: self.order })?;

        let exponent = (0..self.order)
            .map(|g| self.element_order(g) as u64)
            .fold(1u64, lcm);

        // Lower central series: G_2 = <[g, x]>, G_{i+1} = <[G_i, G]>.
        let mut series = vec![self.full_subgroup()];
        loop {
            let prev = series.last().unwrap();
            let mut seed = BitSet::new(self.order);
            seed.insert(0);
            for a in prev.members().iter() {
                for b in 0..self.order {
                    seed.insert(self.commutator(a, b));
                }
            }
            let next = self.closure(&seed);
            if next.size() == prev.size() {
                break;
            }
            series.push(next);
            if series.last().unwrap().is_trivial() {
                break;
            }
        }
        if !series.last().unwrap().is_trivial() {
            // Cannot happen for prime-power orders (p-groups are nilpotent);
            // kept as a guard for corrupted tables.
            return Err(GroupError::NotAGroup {
                reason: "lower central series does not reach the trivial subgroup".into(),
            });
        }
        let nilpotency_class = (series.len() - 1) as u32;

        // Frattini subgroup of a p-group: G' * {g^p}.
        let mut seed = series[1.min(series.len() - 1)].members().clone();
        if series.len() == 1 {
            seed = self.trivial_subgroup().members().clone();
        }
        for g in 0..self.order {
            seed.insert(self.power(g, p as u64));
        }
        let frattini = self.closure(&seed);
        let index = self.order / frattini.size();
        let min_generators = ilog_base(index as u64, p as u64);

        Ok(StructureScalars {
            exponent,
            min_generators,
            nilpotency_class,
            lower_central_series: series,
        })
    }

    pub fn power(&self, g: usize, mut e: u64) -> usize {
        let mut acc = 0usize;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order)
    }
}

/// A permutation of {1..degree}, stored 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<u16>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u16).collect(),
        }
    }

    /// From 0-indexed images.
    pub fn from_images(images: Vec<usize>) -> Self {
        Permutation {
            images: images.into_iter().map(|i| i as u16).collect(),
        }
    }

    /// From disjoint cycles over 1-based points, e.g. `&[vec![1,2,3], vec![4,5]]`.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Self {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w] - 1;
                let to = cycle[(w + 1) % cycle.len()] - 1;
                images[from] = to as u16;
            }
        }
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    fn check(&self, degree: usize) -> Result<(), String> {
        if self.images.len() != degree {
            return Err(format!("acts on {} points, not {degree}", self.images.len()));
        }
        let mut seen = vec![false; degree];
        for &img in &self.images {
            let img = img as usize;
            if img >= degree {
                return Err(format!("image {} out of range", img + 1));
            }
            if seen[img] {
                return Err(format!("image {} repeated", img + 1));
            }
            seen[img] = true;
        }
        Ok(())
    }

    /// Left-to-right composition: (self * other)(i) = other(self(i)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    /// Cycle notation over 1-based points; "()" for the identity.
    pub fn cycle_notation(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.images[start] as usize;
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.images[next] as usize;
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// order = p^n with p prime, n >= 1.
pub fn prime_power(order: usize) -> Option<(usize, u32)> {
    if order < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= order {
        if order % p == 0 {
            let mut rest = order;
            let mut n = 0;
            while rest % p == 0 {
                rest /= p;
                n += 1;
            }
            return if rest == 1 { Some((p, n)) } else { None };
        }
        p += 1;
    }
    Some((order, 1))
}

fn ilog_base(mut value: u64, base: u64) -> u32 {
    let mut log = 0;
    while value > 1 {
        debug_assert_eq!(value % base, 0);
        value /= base;
        log += 1;
    }
    log
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup::from_mul_fn(n, None, |a, b| (a + b) % n, &Limits::default()).unwrap()
    }

    fn quaternion8() -> FiniteGroup {
        // (i, e) with i mod 4, e in {0,1}; y^2 = x^2, y x = x^-1 y.
        FiniteGroup::from_mul_fn(
            8,
            None,
            |a, b| {
                let (i, e) = (a / 2, a % 2);
                let (j, f) = (b / 2, b % 2);
                if e == 0 {
                    ((i + j) % 4) * 2 + f
                } else {
                    let q = if f == 1 { 2 } else { 0 };
                    ((i + 4 - j + q) % 4) * 2 + (1 - f)
                }
            },
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_group_from_table() {
        let g = FiniteGroup::from_table(&[vec![0]]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn c2_from_table() {
        let g = FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(0), 0);
        assert_eq!(g.inv(1), 1);
    }

    #[test]
    fn identity_gets_relabelled_to_zero() {
        // Addition mod 3 with labels shifted so the identity sits at index 2.
        // Element k here represents the residue k+1 mod 3, i.e. table entry
        // (a+1)+(b+1)-1 mod 3.
        let table: Vec<Vec<usize>> = (0..3)
            .map(|a| (0..3).map(|b| (a + b + 1) % 3).collect())
            .collect();
        let g = FiniteGroup::from_table(&table).unwrap();
        assert_eq!(g.mul(0, 1), 1);
        assert_eq!(g.mul(1, 0), 1);
        assert_eq!(g.element_order(1), 3);
    }

    #[test]
    fn rejects_non_associative_table() {
        // A quasigroup that is not a group: subtraction mod 3 has no
        // two-sided identity.
        let table: Vec<Vec<usize>> = (0..3)
            .map(|a: usize| (0..3).map(|b: usize| (a + 3 - b) % 3).collect())
            .collect();
        let err = FiniteGroup::from_table(&table).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup { .. }));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let err = FiniteGroup::from_table(&[vec![0, 1], vec![1]]).unwrap_err();
        assert!(matches!(err, GroupError::BadDimensions { row: 1, .. }));
    }

    #[test]
    fn perm_generators_cyclic3() {
        let g = FiniteGroup::from_permutation_generators(
            3,
            &[Permutation::from_cycles(3, &[vec![1, 2, 3]])],
        )
        .unwrap();
        assert_eq!(g.order(), 3);
    }

    #[test]
    fn perm_generators_wreath_order_81() {
        let g = FiniteGroup::from_permutation_generators(
            9,
            &[
                Permutation::from_cycles(9, &[vec![1, 2, 3]]),
                Permutation::from_cycles(9, &[vec![1, 4, 7], vec![2, 5, 8], vec![3, 6, 9]]),
            ],
        )
        .unwrap();
        assert_eq!(g.order(), 81);
    }

    #[test]
    fn perm_generators_d8_has_five_involutions() {
        let g = FiniteGroup::from_permutation_generators(
            4,
            &[
                Permutation::from_cycles(4, &[vec![1, 2, 3, 4]]),
                Permutation::from_cycles(4, &[vec![1, 3]]),
            ],
        )
        .unwrap();
        assert_eq!(g.order(), 8);
        let involutions = (0..8).filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(involutions, 5);
    }

    #[test]
    fn perm_generator_validation() {
        let bad = Permutation::from_images(vec![0, 0, 2]);
        let err = FiniteGroup::from_permutation_generators(3, &[bad]).unwrap_err();
        assert!(matches!(err, GroupError::NotAPermutation { index: 0, .. }));
    }

    #[test]
    fn perm_closure_respects_order_cap() {
        let limits = Limits {
            max_order: 50,
            strict_associativity: false,
        };
        let err = FiniteGroup::from_permutation_generators_with(
            9,
            &[
                Permutation::from_cycles(9, &[vec![1, 2, 3]]),
                Permutation::from_cycles(9, &[vec![1, 4, 7], vec![2, 5, 8], vec![3, 6, 9]]),
            ],
            &limits,
        )
        .unwrap_err();
        assert!(matches!(err, GroupError::OrderCapExceeded { .. }));
    }

    #[test]
    fn direct_product_c2_c2() {
        let c2 = cyclic(2);
        let v = c2.direct_product(&c2).unwrap();
        assert_eq!(v.order(), 4);
        assert!(v.is_abelian());
        assert_eq!(v.structure().unwrap().exponent, 2);
    }

    #[test]
    fn direct_product_exponent_is_lcm() {
        let g = cyclic(4).direct_product(&cyclic(6)).unwrap();
        // Non-p-group: exponent via element orders directly.
        let exp = (0..g.order())
            .map(|x| g.element_order(x) as u64)
            .fold(1, lcm);
        assert_eq!(exp, 12);
    }

    #[test]
    fn quotient_by_whole_group_is_trivial() {
        let g = quaternion8();
        let q = g.quotient(&g.full_subgroup()).unwrap();
        assert_eq!(q.order(), 1);
    }

    #[test]
    fn quotient_q8_by_center_is_klein() {
        let g = quaternion8();
        let z = g.center();
        assert_eq!(z.size(), 2);
        let q = g.quotient(&z).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.is_abelian());
        assert!((0..4).all(|x| q.mul(x, x) == 0));
    }

    #[test]
    fn quotient_rejects_non_normal() {
        // S3 via permutations; a point stabilizer is not normal.
        let s3 = FiniteGroup::from_permutation_generators(
            3,
            &[
                Permutation::from_cycles(3, &[vec![1, 2, 3]]),
                Permutation::from_cycles(3, &[vec![1, 2]]),
            ],
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        let transposition = (0..6)
            .find(|&x| s3.element_order(x) == 2)
            .expect("s3 has an involution");
        let h = s3.cyclic_subgroup(transposition);
        let err = s3.quotient(&h).unwrap_err();
        assert!(matches!(err, GroupError::NotNormal { .. }));
    }

    #[test]
    fn central_product_rejects_mismatched_orders() {
        let c2 = cyclic(2);
        let c4 = cyclic(4);
        // Identity on the left has order 1: rejected.
        let err = FiniteGroup::central_product(&c2, &c4, 0, 2).unwrap_err();
        assert!(matches!(err, GroupError::OrderMismatch { .. }));
    }

    #[test]
    fn central_product_c4_c4_identifying_involutions() {
        let c4 = cyclic(4);
        let g = FiniteGroup::central_product(&c4, &c4, 2, 2).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.is_abelian());
    }

    #[test]
    fn centralizer_of_trivial_is_whole_group() {
        let g = quaternion8();
        let c = g.centralizer(&g.trivial_subgroup());
        assert_eq!(c.size(), 8);
    }

    #[test]
    fn centralizer_of_i_in_q8() {
        let g = quaternion8();
        // x = (1, 0) -> index 2 has order 4.
        let i = g.cyclic_subgroup(2);
        assert_eq!(i.size(), 4);
        let c = g.centralizer(&i);
        assert_eq!(c.size(), 4);
        assert_eq!(c, i);
    }

    #[test]
    fn centralizer_of_group_is_center() {
        let g = quaternion8();
        assert_eq!(g.centralizer(&g.full_subgroup()), g.center());
    }

    #[test]
    fn centralizer_matches_all_members_definition() {
        let g = quaternion8();
        for seed in 0..g.order() {
            let h = g.cyclic_subgroup(seed);
            let by_gens = g.centralizer(&h);
            let mut bits = BitSet::new(g.order());
            for x in 0..g.order() {
                if h.elements().iter().all(|&m| g.mul(x, m) == g.mul(m, x)) {
                    bits.insert(x);
                }
            }
            assert_eq!(by_gens, Subgroup::from_bits(bits));
        }
    }

    #[test]
    fn q8_structure() {
        let g = quaternion8();
        let s = g.structure().unwrap();
        assert_eq!(s.nilpotency_class, 2);
        assert_eq!(s.exponent, 4);
        assert_eq!(s.min_generators, 2);
        assert_eq!(s.lower_central_series[1], g.center());
    }

    #[test]
    fn abelian_structure_is_class_one() {
        let g = cyclic(9);
        let s = g.structure().unwrap();
        assert_eq!(s.nilpotency_class, 1);
        assert_eq!(s.exponent, 9);
        assert_eq!(s.min_generators, 1);
        assert!(s.lower_central_series[1].is_trivial());
    }

    #[test]
    fn trivial_structure() {
        let g = cyclic(1);
        let s = g.structure().unwrap();
        assert_eq!(s.nilpotency_class, 0);
        assert_eq!(s.min_generators, 0);
    }

    #[test]
    fn structure_rejects_non_p_group() {
        let g = cyclic(6);
        assert!(matches!(
            g.structure().unwrap_err(),
            GroupError::NotPGroup { order: 6 }
        ));
    }

    #[test]
    fn d16_has_maximal_class() {
        let d16 = FiniteGroup::from_permutation_generators(
            8,
            &[
                Permutation::from_cycles(8, &[vec![1, 2, 3, 4, 5, 6, 7, 8]]),
                Permutation::from_cycles(8, &[vec![2, 8], vec![3, 7], vec![4, 6]]),
            ],
        )
        .unwrap();
        assert_eq!(d16.order(), 16);
        assert_eq!(d16.structure().unwrap().nilpotency_class, 3);
    }

    #[test]
    fn subgroup_as_group_roundtrip() {
        let g = quaternion8();
        let h = g.cyclic_subgroup(2);
        let (hg, members) = g.subgroup_as_group(&h).unwrap();
        assert_eq!(hg.order(), 4);
        assert_eq!(members.len(), 4);
        for a in 0..4 {
            for b in 0..4 {
                let parent = g.mul(members[a], members[b]);
                assert_eq!(members[hg.mul(a, b)], parent);
            }
        }
    }

    #[test]
    fn triple_centralizer_identity() {
        let g = quaternion8();
        for seed in 0..g.order() {
            let h = g.cyclic_subgroup(seed);
            let c1 = g.centralizer(&h);
            let c2 = g.centralizer(&c1);
            let c3 = g.centralizer(&c2);
            assert!(h.is_subset_of(&c2));
            assert_eq!(c1, c3);
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
