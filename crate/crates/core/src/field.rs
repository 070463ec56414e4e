//! Scalar and vector fields sampled on a [`Grid`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Scalars that can live on a grid and pass through the FFT.
pub trait FieldScalar: Copy + Default + Send + Sync + std::fmt::Debug + 'static {
    fn to_complex(self) -> Complex64;
    fn from_complex(z: Complex64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
}

impl FieldScalar for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
}

impl FieldScalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    values: Vec<T>,
}

pub type RealField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: FieldScalar> Field<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![T::default(); grid.len()] }
    }

    /// Samples `f(x, y)` at every grid point (`y = 0` in 1D).
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> T) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.position(k);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U: FieldScalar>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map<U: FieldScalar, V: FieldScalar>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Result<Field<V>> {
        self.check_same_grid(other.grid())?;
        Ok(Field { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn check_same_grid(&self, other: &Grid) -> Result<()> {
        if &self.grid != other {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other)));
        }
        Ok(())
    }
}

/// One field per spatial axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    grid: Grid,
    components: Vec<Vec<T>>,
}

impl<T: FieldScalar> VectorField<T> {
    pub fn new(grid: Grid, components: Vec<Vec<T>>) -> Result<Self> {
        if components.len() != grid.dims() {
            return Err(Error::GridMismatch(format!(
                "vector field has {} components on a {}D grid",
                components.len(),
                grid.dims()
            )));
        }
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch("vector component length mismatch".into()));
        }
        Ok(Self { grid, components })
    }

    pub fn from_fields(fields: Vec<Field<T>>) -> Result<Self> {
        let grid = match fields.first() {
            Some(f) => *f.grid(),
            None => return Err(Error::GridMismatch("empty vector field".into())),
        };
        for f in &fields {
            f.check_same_grid(&grid)?;
        }
        Self::new(grid, fields.into_iter().map(Field::into_values).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, axis: usize) -> &[T] {
        &self.components[axis]
    }

    pub fn component_field(&self, axis: usize) -> Field<T> {
        Field { grid: self.grid, values: self.components[axis].clone() }
    }

    pub fn components(&self) -> &[Vec<T>] {
        &self.components
    }

    pub fn map<U: FieldScalar>(&self, f: impl Fn(T) -> U) -> VectorField<U> {
        VectorField {
            grid: self.grid,
            components: self.components.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect(),
        }
    }
}

impl VectorField<f64> {
    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField<f64>) -> Result<RealField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("dot product of fields on different grids".into()));
        }
        let n = self.grid.len();
        let values =
            (0..n).map(|k| (0..self.dims()).map(|a| self.components[a][k] * other.components[a][k]).sum()).collect();
        Field::new(self.grid, values)
    }
}
