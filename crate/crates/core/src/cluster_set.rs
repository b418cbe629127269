//! Disjoint-set partition over a universe of patch ids.

use std::collections::BTreeMap;

use crate::model::PatchId;

/// A partition of a set of patch ids, backed by union-find.
///
/// Each cluster is named by its minimum member under the canonical id order,
/// which makes the output independent of union order.
#[derive(Debug, Clone, Default)]
pub struct ClusterSet {
    ids: Vec<PatchId>,
    index: BTreeMap<PatchId, usize>,
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl ClusterSet {
    /// Every id starts as a singleton. Duplicates are collapsed.
    pub fn singletons<I: IntoIterator<Item = PatchId>>(universe: I) -> Self {
        let mut ids: Vec<PatchId> = universe.into_iter().collect();
        ids.sort();
        ids.dedup();
        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let n = ids.len();
        ClusterSet { ids, index, parent: (0..n).collect(), rank: vec![0; n] }
    }

    /// Builds a partition from explicit clusters.
    pub fn from_clusters<I, C>(clusters: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = PatchId>,
    {
        let clusters: Vec<Vec<PatchId>> = clusters.into_iter().map(|c| c.into_iter().collect()).collect();
        let mut set = ClusterSet::singletons(clusters.iter().flatten().cloned());
        for c in &clusters {
            for pair in c.windows(2) {
                set.union(&pair[0], &pair[1]);
            }
        }
        set
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &PatchId) -> bool {
        self.index.contains_key(id)
    }

    pub fn universe(&self) -> impl Iterator<Item = &PatchId> + '_ {
        self.ids.iter()
    }

    pub fn position(&self, id: &PatchId) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn root(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn find_mut(&mut self, mut i: usize) -> usize {
        let root = self.root(i);
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    /// Root of the set containing dense position `i`.
    pub fn find_index(&self, i: usize) -> usize {
        self.root(i)
    }

    /// Merges two dense positions; returns true when they were apart.
    pub fn union_index(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find_mut(a), self.find_mut(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] = self.rank[ra].saturating_add(1);
        }
        true
    }

    /// Merges the clusters of `a` and `b`. Unknown ids are ignored and return false.
    pub fn union(&mut self, a: &PatchId, b: &PatchId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(x), Some(y)) => self.union_index(x, y),
            _ => false,
        }
    }

    pub fn same(&self, a: &PatchId, b: &PatchId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(x), Some(y)) => self.root(x) == self.root(y),
            _ => false,
        }
    }

    /// Canonical id (minimum member) of the cluster containing `id`.
    pub fn canonical(&self, id: &PatchId) -> Option<&PatchId> {
        let root = self.root(self.position(id)?);
        // ids are sorted, so the first position with this root is the minimum
        (0..self.ids.len()).find(|&i| self.root(i) == root).map(|i| &self.ids[i])
    }

    /// Cluster label per dense position: the position of the minimum member.
    pub fn labels(&self) -> Vec<usize> {
        let mut first_of_root: Vec<usize> = vec![usize::MAX; self.ids.len()];
        let mut labels = Vec::with_capacity(self.ids.len());
        for i in 0..self.ids.len() {
            let r = self.root(i);
            if first_of_root[r] == usize::MAX {
                first_of_root[r] = i;
            }
            labels.push(first_of_root[r]);
        }
        labels
    }

    /// All clusters, members sorted, clusters ordered by canonical id.
    pub fn clusters(&self) -> Vec<Vec<PatchId>> {
        let labels = self.labels();
        let mut groups: BTreeMap<usize, Vec<PatchId>> = BTreeMap::new();
        for (i, label) in labels.into_iter().enumerate() {
            groups.entry(label).or_default().push(self.ids[i].clone());
        }
        groups.into_values().collect()
    }

    pub fn cluster_count(&self) -> usize {
        (0..self.ids.len()).filter(|&i| self.parent[i] == i).count()
    }

    /// Cluster sizes in canonical cluster order.
    pub fn shape(&self) -> Vec<usize> {
        self.clusters().iter().map(Vec::len).collect()
    }

    /// Restricts the partition to `keep`, preserving co-membership.
    pub fn restrict<'a, I: IntoIterator<Item = &'a PatchId>>(&self, keep: I) -> ClusterSet {
        let keep: Vec<PatchId> = keep.into_iter().filter(|id| self.contains(id)).cloned().collect();
        let mut out = ClusterSet::singletons(keep.iter().cloned());
        let mut first: BTreeMap<usize, PatchId> = BTreeMap::new();
        for id in &keep {
            let root = self.root(self.index[id]);
            match first.get(&root) {
                Some(head) => {
                    let head = head.clone();
                    out.union(&head, id);
                }
                None => {
                    first.insert(root, id.clone());
                }
            }
        }
        out
    }
}

impl PartialEq for ClusterSet {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.labels() == other.labels()
    }
}

impl Eq for ClusterSet {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(i: usize) -> PatchId {
        PatchId::mail(format!("<{i}@x>")).unwrap()
    }

    #[test]
    fn canonical_is_minimum_member() {
        let mut cs = ClusterSet::singletons((0..5).map(m));
        cs.union(&m(4), &m(2));
        cs.union(&m(2), &m(3));
        assert_eq!(cs.canonical(&m(4)), Some(&m(2)));
        assert_eq!(cs.clusters(), vec![vec![m(0)], vec![m(1)], vec![m(2), m(3), m(4)]]);
        assert_eq!(cs.cluster_count(), 3);
    }

    #[test]
    fn union_is_idempotent() {
        let mut cs = ClusterSet::singletons((0..3).map(m));
        assert!(cs.union(&m(0), &m(1)));
        assert!(!cs.union(&m(1), &m(0)));
        assert!(!cs.union(&m(0), &m(0)));
        assert_eq!(cs.cluster_count(), 2);
    }

    #[test]
    fn restrict_keeps_comembership() {
        let cs = ClusterSet::from_clusters(vec![vec![m(0), m(1), m(2)], vec![m(3), m(4)]]);
        let r = cs.restrict(&[m(0), m(2), m(4)]);
        assert_eq!(r.clusters(), vec![vec![m(0), m(2)], vec![m(4)]]);
    }

    proptest! {
        #[test]
        fn partition_property(merges in proptest::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let mut cs = ClusterSet::singletons((0..30).map(m));
            for (a, b) in &merges {
                cs.union(&m(*a), &m(*b));
            }
            let clusters = cs.clusters();
            let mut seen: Vec<PatchId> = clusters.iter().flatten().cloned().collect();
            seen.sort();
            let mut expected: Vec<PatchId> = (0..30).map(m).collect();
            expected.sort();
            prop_assert_eq!(seen, expected);
        }

        #[test]
        fn union_order_independent(merges in proptest::collection::vec((0usize..20, 0usize..20), 0..40)) {
            let mut forward = ClusterSet::singletons((0..20).map(m));
            for (a, b) in &merges {
                forward.union(&m(*a), &m(*b));
            }
            let mut backward = ClusterSet::singletons((0..20).map(m));
            for (a, b) in merges.iter().rev() {
                backward.union(&m(*b), &m(*a));
            }
            prop_assert_eq!(forward.clusters(), backward.clusters());
            prop_assert!(forward == backward);
        }
    }
}
