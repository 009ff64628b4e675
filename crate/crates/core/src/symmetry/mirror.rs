use std::f64::consts::FRAC_1_SQRT_2;

use super::layout::ParamLayout;
use crate::error::{check_dim, Error, Result};
use crate::numerics::{dot, norm, orthonormalize, sym_eig, Matrix};

/// A mirror reflection symmetry `w ↦ (I − 2OOᵀ)w`.
///
/// Only `O` (d×k, orthonormal columns) is stored. `P = OOᵀ` and
/// `R = I − 2P` are applied through `O` and materialized on request.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSymmetry {
    o: Matrix,
    label: String,
}

impl MirrorSymmetry {
    pub fn o(&self) -> &Matrix {
        &self.o
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.o.rows()
    }

    /// Number of mirror directions, `rank(P)`.
    pub fn rank(&self) -> usize {
        self.o.cols()
    }

    /// Dense `P = OOᵀ`.
    pub fn projection(&self) -> Matrix {
        self.o
            .matmul(&self.o.transpose())
            .expect("O·Oᵀ is always conformable")
    }

    /// Dense `R = I − 2OOᵀ`.
    pub fn reflection(&self) -> Matrix {
        let p = self.projection();
        Matrix::identity(self.dim())
            .sub(&p.scale(2.0))
            .expect("same shape")
    }

    /// `Oᵀw`, the order parameter of the mirror.
    pub fn order_parameter(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim("mirror dimension", self.dim(), w.len())?;
        self.o.tr_matvec(w)
    }

    /// `Pw`
    pub fn apply_projection(&self, w: &[f64]) -> Result<Vec<f64>> {
        let c = self.order_parameter(w)?;
        self.o.matvec(&c)
    }

    /// `Rw`
    pub fn reflect(&self, w: &[f64]) -> Result<Vec<f64>> {
        let pw = self.apply_projection(w)?;
        Ok(w.iter().zip(&pw).map(|(a, p)| a - 2.0 * p).collect())
    }

    /// `(I − P)w`, the symmetric solution associated with `w`.
    pub fn project_symmetric(&self, w: &[f64]) -> Result<Vec<f64>> {
        let pw = self.apply_projection(w)?;
        Ok(w.iter().zip(&pw).map(|(a, p)| a - p).collect())
    }

    /// `‖Oᵀw‖₂`
    pub fn mirror_residual(&self, w: &[f64]) -> Result<f64> {
        Ok(norm(&self.order_parameter(w)?))
    }

    /// Text matrix form of `O` (one row per line).
    pub fn to_text(&self) -> String {
        self.o.to_text()
    }
}

/// Builds a mirror from arbitrary full-rank columns spanning the mirror
/// directions. Columns are orthonormalized and sign-canonicalized so that the
/// first nonzero entry of each column is positive.
pub fn make_mirror(cols: &Matrix) -> Result<MirrorSymmetry> {
    let (d, k) = (cols.rows(), cols.cols());
    if k > d {
        return Err(Error::contract(format!(
            "mirror with {k} directions in dimension {d}"
        )));
    }
    let mut o = orthonormalize(cols)?;
    for j in 0..k {
        let first = (0..d).map(|i| o[(i, j)]).find(|v| v.abs() > 1e-12);
        if first.is_some_and(|v| v < 0.0) {
            for i in 0..d {
                o[(i, j)] = -o[(i, j)];
            }
        }
    }
    Ok(MirrorSymmetry {
        o,
        label: String::from("mirror"),
    })
}

/// Sign of the second coordinate of a scalar-pair mirror direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSign {
    /// `n = (1, 1)/√2`; symmetric set `a = −b`.
    Plus,
    /// `n = (1, −1)/√2`; symmetric set `a = b`.
    Minus,
}

/// Which index of a matrix block a rotation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `W ↦ (I − 2Π)W`
    Rows,
    /// `W ↦ W(I − 2Π)`
    Cols,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationTarget {
    pub block: String,
    pub side: Side,
}

/// The mirrors implied by rescaling, rotation and permutation symmetries.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardMirrorKind {
    /// Simultaneous sign flip of every coordinate of the named blocks (`O = I`
    /// on those blocks).
    RescalingSignFlip { blocks: Vec<String> },
    /// Sign flip of an explicit coordinate set.
    SignFlip { indices: Vec<usize> },
    /// Single direction `(e_a ± e_b)/√2`.
    RescalingScalarPair { a: usize, b: usize, sign: PairSign },
    /// Exchange of two equal-length blocks; symmetric set `θ_a = θ_b`.
    PermutationSwap { a: String, b: String },
    /// `I − 2Π` applied to the given matrix blocks. With several targets this
    /// is the paired (double) rotation reflection.
    RotationReflection {
        projection: Matrix,
        targets: Vec<RotationTarget>,
    },
}

pub fn make_standard_mirror(
    kind: &StandardMirrorKind,
    layout: &ParamLayout,
) -> Result<MirrorSymmetry> {
    let d = layout.dim();
    let unit = |i: usize| {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        e
    };
    let (cols, label): (Vec<Vec<f64>>, String) = match kind {
        StandardMirrorKind::RescalingSignFlip { blocks } => {
            let mut cols = Vec::new();
            for name in blocks {
                cols.extend(layout.block(name)?.range().map(unit));
            }
            (cols, format!("sign_flip({})", blocks.join(",")))
        }
        StandardMirrorKind::SignFlip { indices } => {
            if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
                return Err(Error::contract(format!(
                    "coordinate {bad} out of range {d}"
                )));
            }
            let names: Vec<String> = indices.iter().map(usize::to_string).collect();
            (
                indices.iter().copied().map(unit).collect(),
                format!("sign_flip[{}]", names.join(",")),
            )
        }
        StandardMirrorKind::RescalingScalarPair { a, b, sign } => {
            if a == b || *a >= d || *b >= d {
                return Err(Error::contract(format!("invalid scalar pair ({a}, {b})")));
            }
            let mut n = vec![0.0; d];
            n[*a] = FRAC_1_SQRT_2;
            n[*b] = match sign {
                PairSign::Plus => FRAC_1_SQRT_2,
                PairSign::Minus => -FRAC_1_SQRT_2,
            };
            let s = if *sign == PairSign::Plus { '+' } else { '-' };
            (vec![n], format!("pair[{a}{s}{b}]"))
        }
        StandardMirrorKind::PermutationSwap { a, b } => {
            let (ba, bb) = (layout.block(a)?, layout.block(b)?);
            if ba.len != bb.len {
                return Err(Error::contract(format!(
                    "permutation blocks {a} and {b} differ in length ({} vs {})",
                    ba.len, bb.len
                )));
            }
            if ba.offset == bb.offset {
                return Err(Error::contract("permutation of a block with itself"));
            }
            let cols = (0..ba.len)
                .map(|k| {
                    let mut c = vec![0.0; d];
                    c[ba.offset + k] = FRAC_1_SQRT_2;
                    c[bb.offset + k] = -FRAC_1_SQRT_2;
                    c
                })
                .collect();
            (cols, format!("swap({a},{b})"))
        }
        StandardMirrorKind::RotationReflection {
            projection,
            targets,
        } => rotation_columns(projection, targets, layout)?,
    };
    let o = Matrix::from_columns(d, &cols);
    Ok(make_mirror(&o)?.with_label(label))
}

fn rotation_columns(
    projection: &Matrix,
    targets: &[RotationTarget],
    layout: &ParamLayout,
) -> Result<(Vec<Vec<f64>>, String)> {
    let p = projection;
    let n = p.rows();
    let pp = p.matmul(p)?;
    if !p.is_square() || p.asymmetry() > 1e-10 || pp.sub(p)?.max_abs() > 1e-10 {
        return Err(Error::contract(
            "rotation mirror needs a symmetric idempotent Π",
        ));
    }
    let eig = sym_eig(p)?;
    let basis: Vec<Vec<f64>> = (0..n)
        .filter(|&i| eig.values[i] > 0.5)
        .map(|i| eig.vector(i))
        .collect();

    let d = layout.dim();
    let mut cols = Vec::new();
    let mut names = Vec::new();
    for t in targets {
        let block = layout.block(&t.block)?;
        let (rows, ncols) = block.shape.ok_or_else(|| {
            Error::contract(format!("rotation target {} is not a matrix block", t.block))
        })?;
        let acted = match t.side {
            Side::Rows => rows,
            Side::Cols => ncols,
        };
        check_dim("rotation projection size", acted, n)?;
        for q in &basis {
            match t.side {
                Side::Rows => {
                    for j in 0..ncols {
                        let mut c = vec![0.0; d];
                        for (a, qa) in q.iter().enumerate() {
                            c[block.offset + a * ncols + j] = *qa;
                        }
                        cols.push(c);
                    }
                }
                Side::Cols => {
                    for i in 0..rows {
                        let mut c = vec![0.0; d];
                        for (b, qb) in q.iter().enumerate() {
                            c[block.offset + i * ncols + b] = *qb;
                        }
                        cols.push(c);
                    }
                }
            }
        }
        names.push(format!(
            "{}{}",
            t.block,
            if t.side == Side::Rows {
                ".rows"
            } else {
                ".cols"
            }
        ));
    }
    let tag = if basis.len() == 1 {
        let q = &basis[0];
        let lead = q
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        match lead {
            Some((i, v)) if (v.abs() - 1.0).abs() < 1e-12 => format!("e{i}"),
            _ => format!("rank{}", basis.len()),
        }
    } else {
        format!("rank{}", basis.len())
    };
    Ok((cols, format!("rotation[{tag}]({})", names.join(","))))
}

/// `Q^T Q ≈ I` check used by tests and assertions.
pub fn is_orthonormal(o: &Matrix, tol: f64) -> bool {
    let k = o.cols();
    (0..k).all(|i| {
        (0..k).all(|j| {
            let g = dot(&o.column(i), &o.column(j));
            let target = if i == j { 1.0 } else { 0.0 };
            (g - target).abs() <= tol
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.sub(b).unwrap().max_abs() <= tol
    }

    #[test]
    fn axis_mirror() {
        let m = make_mirror(&Matrix::from_columns(2, &[vec![1.0, 0.0]])).unwrap();
        assert!(close(&m.projection(), &Matrix::diag(&[1.0, 0.0]), 0.0));
        assert!(close(&m.reflection(), &Matrix::diag(&[-1.0, 1.0]), 0.0));
        assert_eq!(m.reflect(&[3.0, 4.0]).unwrap(), vec![-3.0, 4.0]);
        assert_eq!(m.project_symmetric(&[3.0, 4.0]).unwrap(), vec![0.0, 4.0]);
        assert_eq!(m.mirror_residual(&[3.0, 4.0]).unwrap(), 3.0);
        assert_eq!(m.reflect(&[0.0, 4.0]).unwrap(), vec![0.0, 4.0]);
    }

    #[test]
    fn full_identity_mirror_is_sign_flip() {
        let m = make_mirror(&Matrix::identity(3)).unwrap();
        assert!(close(&m.projection(), &Matrix::identity(3), 0.0));
        assert!(close(
            &m.reflection(),
            &Matrix::identity(3).scale(-1.0),
            0.0
        ));
    }

    #[test]
    fn swap_mirror() {
        let s = FRAC_1_SQRT_2;
        let m = make_mirror(&Matrix::from_columns(2, &[vec![s, -s]])).unwrap();
        let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(close(&m.reflection(), &swap, 1e-15));
        let r = m.reflect(&[2.0, 5.0]).unwrap();
        assert!((r[0] - 5.0).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
        let p = m.project_symmetric(&[2.0, 5.0]).unwrap();
        assert!((p[0] - 3.5).abs() < 1e-14 && (p[1] - 3.5).abs() < 1e-14);
        // |n^T w| = |2 − 5|/√2
        assert!((m.mirror_residual(&[2.0, 5.0]).unwrap() - 3.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sign_canonicalization() {
        let m = make_mirror(&Matrix::from_columns(2, &[vec![-1.0, 1.0]])).unwrap();
        assert!(m.o()[(0, 0)] > 0.0);
        assert!(matches!(
            make_mirror(&Matrix::from_columns(2, &[vec![1.0, 1.0], vec![2.0, 2.0]])),
            Err(Error::DependentColumns(1))
        ));
    }

    #[test]
    fn empty_mirror_is_identity() {
        let m = make_mirror(&Matrix::zeros(3, 0)).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(m.reflect(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(m.mirror_residual(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let m = make_mirror(&Matrix::identity(2)).unwrap();
        assert!(matches!(
            m.reflect(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permutation_projection() {
        let layout = ParamLayout::new().with_vector("a", 2).with_vector("b", 2);
        let kind = StandardMirrorKind::PermutationSwap {
            a: "a".into(),
            b: "b".into(),
        };
        let m = make_standard_mirror(&kind, &layout).unwrap();
        let expected = Matrix::from_rows(&[
            vec![0.5, 0.0, -0.5, 0.0],
            vec![0.0, 0.5, 0.0, -0.5],
            vec![-0.5, 0.0, 0.5, 0.0],
            vec![0.0, -0.5, 0.0, 0.5],
        ]);
        assert!(close(&m.projection(), &expected, 1e-15));

        let bad = ParamLayout::new().with_vector("a", 2).with_vector("b", 3);
        assert!(make_standard_mirror(&kind, &bad).is_err());
    }

    #[test]
    fn rescaling_mirrors() {
        let layout = ParamLayout::new().with_vector("u", 2).with_vector("w", 2);
        let flip = make_standard_mirror(
            &StandardMirrorKind::RescalingSignFlip {
                blocks: vec!["u".into(), "w".into()],
            },
            &layout,
        )
        .unwrap();
        assert!(close(flip.o(), &Matrix::identity(4), 0.0));
        assert!(close(
            &flip.reflection(),
            &Matrix::identity(4).scale(-1.0),
            0.0
        ));

        let pair = make_standard_mirror(
            &StandardMirrorKind::RescalingScalarPair {
                a: 0,
                b: 2,
                sign: PairSign::Minus,
            },
            &layout,
        )
        .unwrap();
        let n = pair.o().column(0);
        let s = FRAC_1_SQRT_2;
        assert!(n
            .iter()
            .zip([s, 0.0, -s, 0.0])
            .all(|(a, b)| (a - b).abs() < 1e-15));
        // fixed set u_1 = w_1
        assert!(pair.mirror_residual(&[0.7, 9.0, 0.7, -3.0]).unwrap() < 1e-15);

        let same = StandardMirrorKind::RescalingScalarPair {
            a: 1,
            b: 1,
            sign: PairSign::Plus,
        };
        assert!(make_standard_mirror(&same, &layout).is_err());
    }

    #[test]
    fn composing_pair_mirrors_flips_the_pair() {
        let layout = ParamLayout::new().with_vector("u", 1).with_vector("w", 1);
        let mk = |sign| {
            make_standard_mirror(
                &StandardMirrorKind::RescalingScalarPair { a: 0, b: 1, sign },
                &layout,
            )
            .unwrap()
            .reflection()
        };
        let r = mk(PairSign::Plus).matmul(&mk(PairSign::Minus)).unwrap();
        assert!(close(&r, &Matrix::identity(2).scale(-1.0), 1e-15));
    }

    #[test]
    fn rotation_mirror() {
        let layout = ParamLayout::new()
            .with_matrix("W", 2, 3)
            .with_matrix("U", 3, 2);
        let mut pi = Matrix::zeros(3, 3);
        pi[(1, 1)] = 1.0;
        let kind = StandardMirrorKind::RotationReflection {
            projection: pi.clone(),
            targets: vec![
                RotationTarget {
                    block: "W".into(),
                    side: Side::Cols,
                },
                RotationTarget {
                    block: "U".into(),
                    side: Side::Rows,
                },
            ],
        };
        let m = make_standard_mirror(&kind, &layout).unwrap();
        assert_eq!(m.rank(), 4);
        assert_eq!(m.label(), "rotation[e1](W.cols,U.rows)");
        // reflection negates column 1 of W and row 1 of U
        let theta: Vec<f64> = (1..=12).map(f64::from).collect();
        let r = m.reflect(&theta).unwrap();
        let expected = [1., -2., 3., 4., -5., 6., 7., 8., -9., -10., 11., 12.];
        assert!(r.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-14));

        let not_projection = StandardMirrorKind::RotationReflection {
            projection: pi.scale(2.0),
            targets: vec![],
        };
        assert!(make_standard_mirror(&not_projection, &layout).is_err());
    }
}
