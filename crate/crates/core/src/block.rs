//! Stacked decision variable addressed per node.

use nalgebra::{DVector, DVectorView, DVectorViewMut};

/// `y` in R^{np}: `n` node blocks of dimension `p`, stored contiguously so
/// block `i` occupies entries `i*p .. (i+1)*p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    n: usize,
    p: usize,
    data: DVector<f64>,
}

impl BlockVector {
    pub fn zeros(n: usize, p: usize) -> Self {
        Self { n, p, data: DVector::zeros(n * p) }
    }

    /// Builds a block vector by evaluating `f` at each node index.
    ///
    /// Panics if a returned block has the wrong dimension.
    pub fn from_block_fn(n: usize, p: usize, mut f: impl FnMut(usize) -> DVector<f64>) -> Self {
        let mut out = Self::zeros(n, p);
        for i in 0..n {
            let b = f(i);
            assert_eq!(b.len(), p, "block {i} has dimension {} instead of {p}", b.len());
            out.block_mut(i).copy_from(&b);
        }
        out
    }

    /// Wraps a stacked vector. Panics unless `data.len() == n * p`.
    pub fn from_vector(n: usize, p: usize, data: DVector<f64>) -> Self {
        assert_eq!(data.len(), n * p, "stacked length {} is not n*p = {}", data.len(), n * p);
        Self { n, p, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, i: usize) -> DVectorView<'_, f64> {
        self.data.rows(i * self.p, self.p)
    }

    pub fn block_mut(&mut self, i: usize) -> DVectorViewMut<'_, f64> {
        self.data.rows_mut(i * self.p, self.p)
    }

    pub fn block_owned(&self, i: usize) -> DVector<f64> {
        self.block(i).into_owned()
    }

    pub fn set_block(&mut self, i: usize, b: &DVector<f64>) {
        assert_eq!(b.len(), self.p);
        self.block_mut(i).copy_from(b);
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &BlockVector) {
        assert_eq!(self.data.len(), x.data.len());
        self.data.axpy(a, &x.data, 1.0);
    }

    pub fn scale_mut(&mut self, a: f64) {
        self.data *= a;
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.data.iter()
    }
}

impl std::ops::Add<&BlockVector> for &BlockVector {
    type Output = BlockVector;
    fn add(self, rhs: &BlockVector) -> BlockVector {
        assert_eq!((self.n, self.p), (rhs.n, rhs.p));
        BlockVector { n: self.n, p: self.p, data: &self.data + &rhs.data }
    }
}

impl std::ops::Sub<&BlockVector> for &BlockVector {
    type Output = BlockVector;
    fn sub(self, rhs: &BlockVector) -> BlockVector {
        assert_eq!((self.n, self.p), (rhs.n, rhs.p));
        BlockVector { n: self.n, p: self.p, data: &self.data - &rhs.data }
    }
}

impl std::ops::Mul<f64> for &BlockVector {
    type Output = BlockVector;
    fn mul(self, a: f64) -> BlockVector {
        BlockVector { n: self.n, p: self.p, data: &self.data * a }
    }
}
