use num_complex::Complex64;

/// A group of nearby values: member indices and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub mean: Complex64,
}

/// Transitive-closure grouping: values within `tol` of each other (directly
/// or through a chain) share a group. Groups are ordered by their first
/// member's index.
pub fn cluster(values: &[Complex64], tol: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut dsu = Dsu::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                dsu.union(i, j);
            }
        }
    }
    dsu.groups()
        .into_iter()
        .map(|members| {
            let mean = members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64;
            Cluster { members, mean }
        })
        .collect()
}

/// Real-line variant, used for spectra of self-adjoint matrices.
pub fn cluster_real(values: &[f64], tol: f64) -> Vec<Cluster> {
    let z: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    cluster(&z, tol)
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        a
    }

    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Option<usize>> = vec![None; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            match by_root[r] {
                Some(g) => out[g].push(i),
                None => {
                    by_root[r] = Some(out.len());
                    out.push(vec![i]);
                }
            }
        }
        out
    }
}
