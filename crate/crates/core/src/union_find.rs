/// Disjoint-set forest with an optional parity bit per element, used to merge
/// oriented simplices (edges) whose identifications may reverse direction.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    // parity of the element relative to its parent
    parity: Vec<bool>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            parity: vec![false; n],
        }
    }

    /// Returns the root of `x` and the parity of `x` relative to that root.
    pub(crate) fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // compress from the top down so each parity accumulates correctly
        let mut acc = false;
        for &node in path.iter().rev() {
            acc ^= self.parity[node];
            self.parity[node] = acc;
            self.parent[node] = root;
        }
        (root, if path.is_empty() { false } else { self.parity[x] })
    }

    /// Merges `a` and `b` asserting `parity(a) ^ parity(b) == flip`.
    /// Returns `false` when the sets were already merged with the opposite
    /// relative parity.
    pub(crate) fn union(&mut self, a: usize, b: usize, flip: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == flip;
        }
        let rel = pa ^ pb ^ flip;
        if self.rank[ra] < self.rank[rb] {
            self.parent[ra] = rb;
            self.parity[ra] = rel;
        } else {
            self.parent[rb] = ra;
            self.parity[rb] = rel;
            if self.rank[ra] == self.rank[rb] {
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub(crate) fn root(&mut self, x: usize) -> usize {
        self.find(x).0
    }
}

#[cfg(test)]
mod tests {
    use super::UnionFind;

    #[test]
    fn parity_tracking() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1, true));
        assert!(uf.union(1, 2, true));
        assert_eq!(uf.find(0).0, uf.find(2).0);
        assert_eq!(uf.find(0).1 ^ uf.find(2).1, false);
        assert!(!uf.union(0, 2, true));
        assert!(uf.union(0, 2, false));
        assert_ne!(uf.root(3), uf.root(0));
    }
}
