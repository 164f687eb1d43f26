use super::atlas::ChartAtlas;
use crate::linalg::{Mat2, Sym2};
use crate::{Error, Result};
use num_complex::Complex64 as C;
use std::sync::Arc;

/// Per-sample values of one tensor type over every chart of an atlas.
#[derive(Clone, Debug)]
pub struct Field<T> {
    pub role: String,
    pub atlas: Arc<ChartAtlas>,
    /// `values[chart][sample]`, samples in row-major grid order.
    pub values: Vec<Vec<T>>,
}

/// Symmetric (0,2)-tensor field; positive definite when used as a metric.
pub type MetricField = Field<Sym2>;
/// (1,1)-tensor field.
pub type OperatorField = Field<Mat2>;
pub type ScalarField = Field<f64>;
pub type ComplexField = Field<C>;

/// Component access and change of coordinates for sampled tensors.
pub trait Tensorial: Copy {
    const COMPONENTS: usize;
    fn components(&self) -> Vec<f64>;
    fn from_components(c: &[f64]) -> Self;
    /// Value in the source chart given the value in the target chart and the
    /// Jacobian ∂(target)/∂(source).
    fn pull_back(&self, jac: &[[f64; 2]; 2]) -> Self;
    fn norm(&self) -> f64;
}

fn jac_mat(jac: &[[f64; 2]; 2]) -> Mat2 {
    Mat2(*jac)
}

impl Tensorial for f64 {
    const COMPONENTS: usize = 1;
    fn components(&self) -> Vec<f64> {
        vec![*self]
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
    fn pull_back(&self, _: &[[f64; 2]; 2]) -> Self {
        *self
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Tensorial for Sym2 {
    const COMPONENTS: usize = 3;
    fn components(&self) -> Vec<f64> {
        vec![self.xx, self.xy, self.yy]
    }
    fn from_components(c: &[f64]) -> Self {
        Sym2::new(c[0], c[1], c[2])
    }
    fn pull_back(&self, jac: &[[f64; 2]; 2]) -> Self {
        self.pullback(&jac_mat(jac))
    }
    fn norm(&self) -> f64 {
        self.max_abs()
    }
}

impl Tensorial for Mat2 {
    const COMPONENTS: usize = 4;
    fn components(&self) -> Vec<f64> {
        vec![self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }
    fn from_components(c: &[f64]) -> Self {
        Mat2::new(c[0], c[1], c[2], c[3])
    }
    fn pull_back(&self, jac: &[[f64; 2]; 2]) -> Self {
        let j = jac_mat(jac);
        match j.inverse() {
            Some(ji) => ji * *self * j,
            None => Mat2::scalar(f64::NAN),
        }
    }
    fn norm(&self) -> f64 {
        self.max_abs()
    }
}

impl<T: Copy> Field<T> {
    pub fn from_fn(atlas: &Arc<ChartAtlas>, role: &str, f: impl Fn(usize, usize, [f64; 2]) -> T) -> Self {
        let values = atlas
            .charts
            .iter()
            .enumerate()
            .map(|(k, c)| (0..c.grid.len()).map(|i| f(k, i, c.grid.coord(i))).collect())
            .collect();
        Field { role: role.to_string(), atlas: atlas.clone(), values }
    }

    pub fn constant(atlas: &Arc<ChartAtlas>, role: &str, v: T) -> Self {
        Field::from_fn(atlas, role, |_, _, _| v)
    }

    pub fn from_values(atlas: &Arc<ChartAtlas>, role: &str, values: Vec<Vec<T>>) -> Result<Self> {
        if values.len() != atlas.charts.len() || values.iter().zip(&atlas.charts).any(|(v, c)| v.len() != c.grid.len())
        {
            return Err(Error::AtlasMismatch(format!("field {role} does not match the atlas sample counts")));
        }
        Ok(Field { role: role.to_string(), atlas: atlas.clone(), values })
    }

    pub fn with_role(mut self, role: &str) -> Self {
        self.role = role.to_string();
        self
    }

    pub fn map<U>(&self, role: &str, f: impl Fn(&T) -> U) -> Field<U> {
        Field {
            role: role.to_string(),
            atlas: self.atlas.clone(),
            values: self.values.iter().map(|v| v.iter().map(&f).collect()).collect(),
        }
    }

    pub fn same_atlas<U>(&self, other: &Field<U>) -> bool {
        Arc::ptr_eq(&self.atlas, &other.atlas) || *self.atlas == *other.atlas
    }

    pub fn check_atlas<U>(&self, other: &Field<U>) -> Result<()> {
        if self.same_atlas(other) {
            Ok(())
        } else {
            Err(Error::AtlasMismatch(format!("fields {} and {} live on different atlases", self.role, other.role)))
        }
    }

    pub fn zip_map<U: Copy, V>(&self, other: &Field<U>, role: &str, f: impl Fn(&T, &U) -> V) -> Result<Field<V>> {
        self.check_atlas(other)?;
        Ok(Field {
            role: role.to_string(),
            atlas: self.atlas.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        })
    }

    /// Like `zip_map` with a fallible per-sample map that knows its location.
    pub fn try_zip_map<U: Copy, V>(
        &self,
        other: &Field<U>,
        role: &str,
        f: impl Fn(usize, usize, &T, &U) -> Result<V>,
    ) -> Result<Field<V>> {
        self.check_atlas(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(k, (a, b))| a.iter().zip(b).enumerate().map(|(i, (x, y))| f(k, i, x, y)).collect())
            .collect::<Result<Vec<Vec<V>>>>()?;
        Ok(Field { role: role.to_string(), atlas: self.atlas.clone(), values })
    }

    /// The field restricted to every second sample, on the coarsened atlas.
    pub fn coarsen_onto(&self, coarse: &Arc<ChartAtlas>) -> Field<T> {
        let values = self
            .atlas
            .charts
            .iter()
            .zip(&coarse.charts)
            .zip(&self.values)
            .map(|((fc, cc), v)| {
                (0..cc.grid.len())
                    .map(|idx| {
                        let (i, j) = cc.grid.ij(idx);
                        v[fc.grid.index(2 * i, 2 * j)]
                    })
                    .collect()
            })
            .collect();
        Field { role: self.role.clone(), atlas: coarse.clone(), values }
    }

    pub fn coarsen(&self) -> Result<Field<T>> {
        let coarse = Arc::new(self.atlas.coarsen()?);
        Ok(self.coarsen_onto(&coarse))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.values.iter().enumerate().flat_map(|(k, v)| v.iter().enumerate().map(move |(i, x)| (k, i, x)))
    }

    pub fn chart_id(&self, k: usize) -> &str {
        &self.atlas.charts[k].id
    }
}

impl<T: Tensorial> Field<T> {
    /// Component `c` of chart `k` as a flat array.
    pub fn component(&self, k: usize, c: usize) -> Vec<f64> {
        self.values[k].iter().map(|v| v.components()[c]).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.iter().fold(0.0f64, |m, (_, _, v)| m.max(v.norm()))
    }
}

impl ScalarField {
    pub fn max(&self) -> f64 {
        self.iter().fold(f64::NEG_INFINITY, |m, (_, _, v)| m.max(*v))
    }

    pub fn min(&self) -> f64 {
        self.iter().fold(f64::INFINITY, |m, (_, _, v)| m.min(*v))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        let n = self.atlas.total_samples() as f64;
        self.iter().map(|(_, _, v)| *v).sum::<f64>() / n
    }

    pub fn all_finite(&self) -> bool {
        self.iter().all(|(_, _, v)| v.is_finite())
    }
}

impl MetricField {
    /// Fails on the first sample that is not positive definite.
    pub fn ensure_positive_definite(&self) -> Result<()> {
        for (k, i, g) in self.iter() {
            if !g.is_positive_definite() {
                return Err(Error::NotPositiveDefinite { chart: self.chart_id(k).to_string(), index: i });
            }
        }
        Ok(())
    }

    /// g(A·, A·) sample by sample.
    pub fn pullback_by(&self, a: &OperatorField, role: &str) -> Result<MetricField> {
        self.zip_map(a, role, |g, m| g.pullback(m))
    }

    /// Scales every sample by c.
    pub fn scaled(&self, c: f64, role: &str) -> MetricField {
        self.map(role, |g| g.scale(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn coarsen_picks_even_samples() {
        let atlas = Arc::new(ChartAtlas::single("a", Grid::rect([0.0, 0.0], [1.0, 1.0], [13, 13])).unwrap());
        let f = ScalarField::from_fn(&atlas, "x", |_, _, p| p[0] + 10.0 * p[1]);
        let c = f.coarsen().unwrap();
        let g = &c.atlas.charts[0].grid;
        for (_, i, v) in c.iter() {
            let p = g.coord(i);
            assert_eq!(*v, p[0] + 10.0 * p[1]);
        }
    }

    #[test]
    fn atlas_mismatch_detected() {
        let a1 = Arc::new(ChartAtlas::single("a", Grid::rect([0.0, 0.0], [1.0, 1.0], [7, 7])).unwrap());
        let a2 = Arc::new(ChartAtlas::single("a", Grid::rect([0.0, 0.0], [1.0, 1.0], [8, 7])).unwrap());
        let f = ScalarField::constant(&a1, "f", 1.0);
        let g = ScalarField::constant(&a2, "g", 1.0);
        assert!(f.zip_map(&g, "h", |a, b| a + b).is_err());
    }

    #[test]
    fn operator_transforms_by_similarity() {
        let j = [[2.0, 0.0], [0.0, 1.0]];
        let a = Mat2::new(1.0, 3.0, 0.0, 1.0);
        let p = a.pull_back(&j);
        // J⁻¹ A J
        assert_eq!(p, Mat2::new(1.0, 1.5, 0.0, 1.0));
        assert_eq!(Sym2::scalar(1.0).pull_back(&j), Sym2::new(4.0, 0.0, 1.0));
    }
}
