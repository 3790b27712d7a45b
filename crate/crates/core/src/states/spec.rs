use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockDensity, FockVector, Signal};
use crate::error::{Error, Result};

/// Serializable description of a signal state.
///
/// ```json
/// {"type": "coherent", "beta_re": 2.0, "beta_im": 0.0, "cutoff": 40}
/// {"type": "mixture", "components": [
///     {"weight": 0.5, "type": "number", "n": 0},
///     {"weight": 0.5, "type": "number", "n": 1}]}
/// ```
///
/// Without `cutoff`, constructors choose their own safe window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StateSpec {
    Coherent {
        beta_re: f64,
        #[serde(default)]
        beta_im: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    SqueezedVacuum {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Number {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    /// Coefficients as `[re, im]` pairs; normalized on build.
    FockVector {
        coeffs: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    #[serde(flatten)]
    pub state: StateSpec,
}

impl StateSpec {
    pub fn build(&self) -> Result<Signal> {
        match self {
            StateSpec::Coherent { beta_re, beta_im, cutoff } => {
                let beta = Complex64::new(*beta_re, *beta_im);
                let cutoff = cutoff.unwrap_or_else(|| FockVector::coherent_min_cutoff(beta));
                Ok(FockVector::coherent(beta, cutoff)?.into())
            }
            StateSpec::SqueezedVacuum { r, cutoff } => {
                let cutoff = match cutoff {
                    Some(c) => *c,
                    None => FockVector::squeezed_min_cutoff(*r)?,
                };
                Ok(FockVector::squeezed_vacuum(*r, cutoff)?.into())
            }
            StateSpec::Number { n, cutoff } => Ok(FockVector::number(*n, cutoff.unwrap_or(*n))?.into()),
            StateSpec::FockVector { coeffs, cutoff } => {
                let mut c: Vec<Complex64> = coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                if let Some(cut) = cutoff {
                    if c.len() > cut + 1 {
                        return Err(Error::CutoffTooSmall { given: *cut, required: c.len() - 1 });
                    }
                    c.resize(cut + 1, Complex64::new(0.0, 0.0));
                }
                Ok(FockVector::new(c)?.into())
            }
            StateSpec::Mixture { components, cutoff } => {
                let parts = components
                    .iter()
                    .map(|c| Ok((c.weight, c.state.build()?.to_density())))
                    .collect::<Result<Vec<_>>>()?;
                let mixed = FockDensity::mix(&parts)?;
                match cutoff {
                    Some(c) if *c < mixed.cutoff() => Ok(mixed.truncate(*c)?.into()),
                    _ => Ok(mixed.into()),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::SignalState;

    #[test]
    fn parses_each_variant() {
        let coherent: StateSpec =
            serde_json::from_str(r#"{"type":"coherent","beta_re":2.0,"cutoff":40}"#).unwrap();
        assert_eq!(coherent.build().unwrap().cutoff(), 40);

        let sq: StateSpec = serde_json::from_str(r#"{"type":"squeezed_vacuum","r":0.5}"#).unwrap();
        assert!(matches!(sq.build().unwrap(), Signal::Pure(_)));

        let mix: StateSpec = serde_json::from_str(
            r#"{"type":"mixture","components":[
                {"weight":0.5,"type":"number","n":0},
                {"weight":0.5,"type":"number","n":1}]}"#,
        )
        .unwrap();
        let rho = mix.build().unwrap();
        assert_eq!(rho.photon_distribution(), vec![0.5, 0.5]);

        let fv: StateSpec =
            serde_json::from_str(r#"{"type":"fock_vector","coeffs":[[1,0],[0,1]]}"#).unwrap();
        let p = fv.build().unwrap().photon_distribution();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_type_and_small_cutoff() {
        assert!(serde_json::from_str::<StateSpec>(r#"{"type":"thermal","nbar":1}"#).is_err());
        let spec: StateSpec =
            serde_json::from_str(r#"{"type":"coherent","beta_re":2.0,"cutoff":10}"#).unwrap();
        assert_eq!(spec.build(), Err(Error::CutoffTooSmall { given: 10, required: 34 }));
    }
}
