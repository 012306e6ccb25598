use super::{LinearMapSpec, MapDims};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Canonical maps used across the test corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZooMap {
    /// `X ↦ X` on `M_n`.
    Identity(usize),
    /// `X ↦ Xᵀ` on `M_n`.
    Transpose(usize),
    /// `X ↦ λX + (1−λ)·Tr(X)·I/n`, `λ ∈ [0, 1]`.
    Depolarizing(usize, f64),
    /// `X ↦ μ·Tr(X)·I − X`, `μ ≥ 0`. CP iff `μ ≥ n`, k-positive iff `μ ≥ k`.
    MuFamily(usize, f64),
    /// Choi's 1975 map on `M_3`: diagonal `(x11+x33, x22+x11, x33+x22)`, off-diagonal `−x_ij`.
    Choi75,
}

impl ZooMap {
    /// Parses a name plus positional parameters: `identity n`, `transpose n`,
    /// `depolarizing n λ`, `mu_family n μ`, `choi75`.
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let dim = |idx: usize| -> Result<usize> {
            let v = *params.get(idx).ok_or_else(|| {
                Error::BadParams(format!("{name}: missing parameter #{}", idx + 1))
            })?;
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Error::BadParams(format!(
                    "{name}: dimension must be a positive integer, got {v}"
                )));
            }
            Ok(v as usize)
        };
        let real = |idx: usize| -> Result<f64> {
            params
                .get(idx)
                .copied()
                .ok_or_else(|| Error::BadParams(format!("{name}: missing parameter #{}", idx + 1)))
        };
        let arity = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::BadParams(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        let map = match name {
            "identity" | "id" => {
                arity(1)?;
                ZooMap::Identity(dim(0)?)
            }
            "transpose" => {
                arity(1)?;
                ZooMap::Transpose(dim(0)?)
            }
            "depolarizing" => {
                arity(2)?;
                ZooMap::Depolarizing(dim(0)?, real(1)?)
            }
            "mu_family" | "mu" => {
                arity(2)?;
                ZooMap::MuFamily(dim(0)?, real(1)?)
            }
            "choi75" => {
                arity(0)?;
                ZooMap::Choi75
            }
            other => return Err(Error::UnknownName(other.to_string())),
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ZooMap::Depolarizing(_, l) if !(0.0..=1.0).contains(&l) => Err(Error::BadParams(
                format!("depolarizing: λ = {l} outside [0, 1]"),
            )),
            ZooMap::MuFamily(_, mu) if !(mu >= 0.0 && mu.is_finite()) => Err(Error::BadParams(
                format!("mu_family: μ = {mu} must be finite and ≥ 0"),
            )),
            ZooMap::Identity(0)
            | ZooMap::Transpose(0)
            | ZooMap::Depolarizing(0, _)
            | ZooMap::MuFamily(0, _) => Err(Error::BadParams("dimension must be positive".into())),
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ZooMap::Identity(n)
            | ZooMap::Transpose(n)
            | ZooMap::Depolarizing(n, _)
            | ZooMap::MuFamily(n, _) => n,
            ZooMap::Choi75 => 3,
        }
    }

    pub fn build(&self) -> Result<LinearMapSpec> {
        self.validate()?;
        let n = self.dim();
        let dims = MapDims::square(n)?;
        Ok(match *self {
            ZooMap::Identity(_) => {
                LinearMapSpec::from_kraus(dims, vec![ComplexMatrix::identity(n)])?
            }
            ZooMap::Transpose(_) => LinearMapSpec::from_fn(dims, |x| x.transpose()),
            ZooMap::Depolarizing(_, l) => LinearMapSpec::from_fn(dims, |x| {
                &x.scale(l)
                    + &ComplexMatrix::identity(n).scale_complex(x.trace() * ((1.0 - l) / n as f64))
            }),
            ZooMap::MuFamily(_, mu) => LinearMapSpec::from_fn(dims, |x| {
                &ComplexMatrix::identity(n).scale_complex(x.trace() * mu) - x
            }),
            ZooMap::Choi75 => LinearMapSpec::from_fn(dims, choi75),
        })
    }
}

fn choi75(x: &ComplexMatrix) -> ComplexMatrix {
    let mut y = -x;
    let d = |i: usize| x[(i, i)];
    y[(0, 0)] = d(0) + d(2);
    y[(1, 1)] = d(1) + d(0);
    y[(2, 2)] = d(2) + d(1);
    y
}

/// Builds a zoo map by name; see [`ZooMap::parse`] for the parameter layout.
pub fn zoo(name: &str, params: &[f64]) -> Result<LinearMapSpec> {
    ZooMap::parse(name, params)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_unit_vector, rng_from_seed};
    use crate::linalg::{eigh, eigvalsh};

    #[test]
    fn parse_errors() {
        assert_eq!(zoo("nope", &[2.0]), Err(Error::UnknownName("nope".into())));
        assert!(matches!(
            zoo("depolarizing", &[2.0, 1.5]),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            zoo("depolarizing", &[2.0, -0.1]),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            zoo("mu_family", &[3.0, -1.0]),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(zoo("identity", &[2.5]), Err(Error::BadParams(_))));
        assert!(matches!(zoo("identity", &[]), Err(Error::BadParams(_))));
        assert!(matches!(zoo("choi75", &[3.0]), Err(Error::BadParams(_))));
    }

    #[test]
    fn mu_family_boundary_spectrum() {
        // μI − n|Ω̃⟩⟨Ω̃| with |Ω̃|² = n: one eigenvalue μ − n, the rest μ.
        let ev = eigvalsh(&zoo("mu_family", &[3.0, 3.0]).unwrap().to_choi()).unwrap();
        assert!(ev[0].abs() < 1e-12);
        assert!(ev[1..].iter().all(|x| (x - 3.0).abs() < 1e-12));
    }

    #[test]
    fn mu_family_min_choi_eigenvalue_is_mu_minus_n() {
        for n in 1..=6 {
            for &mu in &[0.0, 0.5, 1.0, 2.5, 4.0, 7.0] {
                let ev = eigvalsh(&zoo("mu_family", &[n as f64, mu]).unwrap().to_choi()).unwrap();
                assert!(
                    (ev[0] - (mu - n as f64)).abs() < 1e-12,
                    "n={n} μ={mu}: {}",
                    ev[0]
                );
            }
        }
    }

    #[test]
    fn choi75_images() {
        let phi = zoo("choi75", &[]).unwrap();
        let img = phi.apply(&ComplexMatrix::unit(3, 0, 0)).unwrap();
        assert_eq!(img, ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]));

        // positive on 1000 random rank-one inputs
        let mut rng = rng_from_seed(75);
        for _ in 0..1000 {
            let v = random_unit_vector(3, &mut rng);
            let img = phi.apply(&ComplexMatrix::outer(&v, &v)).unwrap();
            assert!(eigh(&img).unwrap().min() > -1e-12);
        }
    }

    #[test]
    fn depolarizing_is_unital_and_trace_preserving() {
        let d = zoo("depolarizing", &[3.0, 0.5]).unwrap();
        assert!(d
            .apply_to_unit()
            .approx_eq(&ComplexMatrix::identity(3), 1e-14));
        let x = ComplexMatrix::unit(3, 1, 1);
        assert!((d.apply(&x).unwrap().trace() - x.trace()).norm() < 1e-14);
    }
}
