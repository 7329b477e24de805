use crate::error::{Error, Result};

/// Validated rooted forest given by a parent array.
#[derive(Clone, Debug)]
pub struct Forest {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
    /// Parents before children.
    pub preorder: Vec<usize>,
    /// Number of strict ancestors.
    pub level: Vec<usize>,
}

impl Forest {
    pub fn new(parent: &[Option<usize>]) -> Result<Forest> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (v, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p >= n => return Err(Error::invalid(format!("node {v} has parent {p} out of range"))),
                Some(p) if p == v => return Err(Error::invalid(format!("node {v} is its own parent"))),
                Some(p) => children[p].push(v),
                None => roots.push(v),
            }
        }
        let mut preorder = Vec::with_capacity(n);
        let mut level = vec![usize::MAX; n];
        let mut stack: Vec<usize> = roots.iter().rev().copied().collect();
        for &r in &roots {
            level[r] = 0;
        }
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &c in children[v].iter().rev() {
                level[c] = level[v] + 1;
                stack.push(c);
            }
        }
        if preorder.len() != n {
            return Err(Error::invalid("parent array contains a cycle"));
        }
        Ok(Forest { parent: parent.to_vec(), children, roots, preorder, level })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// `u ⪯ v`: `u` lies on the path from `v` to its root.
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == u {
                return true;
            }
            if self.level[c] <= self.level[u] {
                return false;
            }
            cur = self.parent[c];
        }
        false
    }

    pub fn comparable(&self, u: usize, v: usize) -> bool {
        self.is_ancestor(u, v) || self.is_ancestor(v, u)
    }

    /// `v` and its ancestors, from `v` upwards.
    pub fn ancestors(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = self.parent[v];
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent[c];
        }
        out
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.children[v].is_empty()).collect()
    }

    /// Number of nodes on a longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.level.iter().map(|l| l + 1).max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.children.iter().all(|c| c.len() <= 1)
    }

    /// Nodes of the subtree rooted at `v`.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().copied());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_forest() {
        let f = Forest::new(&[None, Some(0), Some(0), Some(1), None]).unwrap();
        assert_eq!(f.roots, vec![0, 4]);
        assert!(f.is_ancestor(0, 3));
        assert!(!f.is_ancestor(2, 3));
        assert_eq!(f.height(), 3);
        assert_eq!(f.leaves(), vec![2, 3, 4]);
        assert!(Forest::new(&[Some(1), Some(0)]).is_err());
        assert!(Forest::new(&[Some(5)]).is_err());
    }
}
