/// Disjoint sets over `0..n` with path compression and union by size.
///
/// When two roots of equal size are merged the smaller index becomes the
/// parent, so the forest shape is a function of the union sequence alone.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already one set.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (sa, sb) = (self.size[ra as usize], self.size[rb as usize]);
        let (root, child) = if sa > sb || (sa == sb && ra < rb) {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[child as usize] = root;
        self.size[root as usize] = sa + sb;
        self.components -= 1;
        true
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_merges() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.connected(0, 1));
        assert!(!uf.connected(1, 3));
        assert_eq!(uf.components(), 3);
        assert!(uf.union(1, 4));
        assert!(uf.connected(0, 3));
        assert_eq!(uf.components(), 2);
    }

    #[test]
    fn equal_size_tie_goes_to_smaller_root() {
        let mut uf = UnionFind::new(4);
        uf.union(3, 2);
        assert_eq!(uf.find(3), 2);
        uf.union(1, 0);
        uf.union(2, 1);
        assert_eq!(uf.find(3), 0);
    }

    proptest! {
        #[test]
        fn agrees_with_naive_labelling(edges in prop::collection::vec((0u32..30, 0u32..30), 0..80)) {
            let mut uf = UnionFind::new(30);
            let mut label: Vec<u32> = (0..30).collect();
            for (a, b) in edges {
                let merged = uf.union(a, b);
                let (la, lb) = (label[a as usize], label[b as usize]);
                prop_assert_eq!(merged, la != lb);
                for l in label.iter_mut() {
                    if *l == lb { *l = la; }
                }
            }
            for a in 0..30u32 {
                for b in 0..30u32 {
                    prop_assert_eq!(uf.connected(a, b), label[a as usize] == label[b as usize]);
                }
            }
            let distinct: std::collections::BTreeSet<_> = label.iter().collect();
            prop_assert_eq!(uf.components(), distinct.len());
        }
    }
}
