//! Configuration file format: a JSON document describing one chain plus
//! optional sweep/analytic sections. Complex numbers are written as
//! `[re, im]` two-element arrays (a bare number is accepted as a real).
//! Coefficient sequences are either explicit arrays or generator objects
//! that expand deterministically.

use anyhow::{anyhow, bail, Context};
use qherm_core::{analytic, ChainSpec, Complex64};
use serde::Deserialize;

/// A complex scalar in the wire format: `[re, im]` or a bare real.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexIn {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexIn {
    pub fn value(&self) -> Complex64 {
        match self {
            ComplexIn::Real(re) => Complex64::new(*re, 0.0),
            ComplexIn::Pair([re, im]) => Complex64::new(*re, *im),
        }
    }
}

/// A coefficient sequence: explicit entries or a generator tag.
///
/// Generators: `{"constant": z}` repeats one value; `{"alternating": [a, b]}`
/// cycles a, b, a, b, ... starting at the first site or bond. Site energies
/// additionally accept `{"yuce": {"gamma": g, "v0": v}}`, the alternating
/// gain/loss pattern `(-1)^j i v0` (that generator also fixes the couplings
/// implied by the model when used for omega; see [`ChainConfig::expand`]).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Explicit(Vec<ComplexIn>),
    Constant { constant: ComplexIn },
    Alternating { alternating: [ComplexIn; 2] },
    GainLoss { yuce: GainLossTag },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainLossTag {
    pub gamma: f64,
    pub v0: f64,
}

impl CoeffSpec {
    /// Expands to `len` values. The gain/loss tag is only valid for site
    /// energies and is handled by the caller.
    fn expand(&self, len: usize, what: &str) -> anyhow::Result<Vec<Complex64>> {
        match self {
            CoeffSpec::Explicit(items) => {
                if items.len() != len {
                    bail!("{what}: expected {len} entries, found {}", items.len());
                }
                Ok(items.iter().map(ComplexIn::value).collect())
            }
            CoeffSpec::Constant { constant } => Ok(vec![constant.value(); len]),
            CoeffSpec::Alternating { alternating } => Ok((0..len)
                .map(|i| alternating[i % 2].value())
                .collect()),
            CoeffSpec::GainLoss { .. } => {
                bail!("{what}: the yuce generator is only valid for omega")
            }
        }
    }
}

/// One chain in the wire format.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n: usize,
    pub alpha: Option<CoeffSpec>,
    pub beta: Option<CoeffSpec>,
    pub omega: CoeffSpec,
    #[serde(default)]
    pub cyclic: bool,
    pub corner_up: Option<ComplexIn>,
    pub corner_down: Option<ComplexIn>,
    pub q1: Option<f64>,
}

impl ChainConfig {
    /// Expands generators into an explicit [`ChainSpec`].
    ///
    /// The `yuce` site-energy generator implies the whole model: alternating
    /// gain/loss energies, upper couplings 1 and lower couplings gamma;
    /// alpha/beta may be omitted or must agree with those implied values.
    pub fn expand(&self) -> anyhow::Result<ChainSpec> {
        if self.n == 0 {
            bail!("n: chain needs at least one site");
        }
        let bonds = self.n - 1;
        if let CoeffSpec::GainLoss { yuce } = &self.omega {
            let params = analytic::GainLossParams {
                n: self.n,
                gamma: yuce.gamma,
                v0: yuce.v0,
            };
            let model = analytic::gain_loss_chain(&params)
                .map_err(|e| anyhow!("omega.yuce: {e}"))?;
            let alpha = match &self.alpha {
                None => model.upper.clone(),
                Some(spec) => spec.expand(bonds, "alpha")?,
            };
            let beta = match &self.beta {
                None => model.lower.clone(),
                Some(spec) => spec.expand(bonds, "beta")?,
            };
            if alpha != model.upper {
                bail!("alpha: conflicts with the couplings implied by omega.yuce (all 1)");
            }
            if beta != model.lower {
                bail!("beta: conflicts with the couplings implied by omega.yuce (all gamma)");
            }
            if self.cyclic {
                bail!("cyclic: the yuce model is defined on open chains");
            }
            return Ok(model);
        }

        let alpha = self
            .alpha
            .as_ref()
            .ok_or_else(|| anyhow!("alpha: required unless omega uses the yuce generator"))?
            .expand(bonds, "alpha")?;
        let beta = self
            .beta
            .as_ref()
            .ok_or_else(|| anyhow!("beta: required unless omega uses the yuce generator"))?
            .expand(bonds, "beta")?;
        let omega = self.omega.expand(self.n, "omega")?;

        let spec = if self.cyclic {
            let up = self
                .corner_up
                .ok_or_else(|| anyhow!("corner_up: required for cyclic chains"))?;
            let down = self
                .corner_down
                .ok_or_else(|| anyhow!("corner_down: required for cyclic chains"))?;
            ChainSpec::cyclic(alpha, beta, omega, up.value(), down.value())
        } else {
            if self.corner_up.is_some() || self.corner_down.is_some() {
                bail!("corner_up/corner_down: only valid with cyclic = true");
            }
            ChainSpec::open(alpha, beta, omega)
        };
        let violations = spec.validate();
        if !violations.is_empty() {
            let mut msg = String::from("invalid chain:");
            for v in &violations {
                msg.push_str(&format!(" {v};"));
            }
            bail!(msg);
        }
        Ok(spec)
    }

    pub fn q1(&self) -> f64 {
        self.q1.unwrap_or(1.0)
    }
}

/// Sweep section: scan `parameter` over `range` in `steps` uniform
/// increments, then bisect the bracketing interval.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub range: [f64; 2],
    pub steps: usize,
}

/// Analytic section: which closed-form model to evaluate.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "model")]
pub enum AnalyticConfig {
    #[serde(rename = "2x2")]
    TwoByTwo {
        omega1: ComplexIn,
        omega2: ComplexIn,
        alpha: ComplexIn,
        beta: ComplexIn,
    },
    #[serde(rename = "uniform")]
    Uniform { n: usize, omega: f64, alpha: f64, beta: f64 },
    #[serde(rename = "yuce")]
    GainLoss { n: usize, gamma: f64, v0: f64 },
}

/// Top-level config document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub chain: Option<ChainConfig>,
    pub sweep: Option<SweepConfig>,
    pub analytic: Option<AnalyticConfig>,
}

impl Config {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: Config = serde_json::from_str(text).context("config parse failed")?;
        Ok(cfg)
    }

    pub fn chain(&self) -> anyhow::Result<&ChainConfig> {
        self.chain
            .as_ref()
            .ok_or_else(|| anyhow!("config: missing \"chain\" section"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn explicit_arrays_parse_with_bare_reals_and_pairs() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 3, "alpha": [1, 1], "beta": [[4, 0], [4, 0]],
                "omega": [0, [0, 0], 0]}}"#,
        )
        .unwrap();
        let spec = cfg.chain().unwrap().expand().unwrap();
        assert_eq!(spec.n, 3);
        assert_eq!(spec.upper, vec![complex(1.0, 0.0); 2]);
        assert_eq!(spec.lower, vec![complex(4.0, 0.0); 2]);
        assert!(!spec.is_cyclic());
    }

    #[test]
    fn generators_expand_deterministically() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 4, "alpha": {"constant": 1}, "beta": {"constant": [2, 0]},
                "omega": {"alternating": [[0, -1], [0, 1]]}}}"#,
        )
        .unwrap();
        let spec = cfg.chain().unwrap().expand().unwrap();
        assert_eq!(spec.onsite[0], complex(0.0, -1.0));
        assert_eq!(spec.onsite[1], complex(0.0, 1.0));
        assert_eq!(spec.onsite[2], complex(0.0, -1.0));
        assert_eq!(spec.onsite[3], complex(0.0, 1.0));
        assert_eq!(spec.lower, vec![complex(2.0, 0.0); 3]);
    }

    #[test]
    fn gain_loss_generator_builds_the_whole_model() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 2, "omega": {"yuce": {"gamma": 1.0, "v0": 2.0}}}}"#,
        )
        .unwrap();
        let spec = cfg.chain().unwrap().expand().unwrap();
        assert_eq!(spec.onsite[0], complex(0.0, -2.0));
        assert_eq!(spec.onsite[1], complex(0.0, 2.0));
        assert_eq!(spec.upper, vec![complex(1.0, 0.0)]);
        assert_eq!(spec.lower, vec![complex(1.0, 0.0)]);
    }

    #[test]
    fn gain_loss_generator_rejects_conflicting_couplings() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 2, "alpha": [3], "omega": {"yuce": {"gamma": 1.0, "v0": 0.5}}}}"#,
        )
        .unwrap();
        assert!(cfg.chain().unwrap().expand().is_err());
    }

    #[test]
    fn cyclic_needs_both_corners() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 3, "alpha": [1, 1], "beta": [4, 4],
                "omega": [0, 0, 0], "cyclic": true, "corner_up": 1}}"#,
        )
        .unwrap();
        let err = cfg.chain().unwrap().expand().unwrap_err().to_string();
        assert!(err.contains("corner_down"), "{err}");
    }

    #[test]
    fn explicit_length_mismatch_names_the_field() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 3, "alpha": [1, 1, 1], "beta": [4, 4], "omega": [0, 0, 0]}}"#,
        )
        .unwrap();
        let err = cfg.chain().unwrap().expand().unwrap_err().to_string();
        assert!(err.contains("alpha"), "{err}");
    }

    #[test]
    fn round_trip_of_expanded_generators_is_identical() {
        let with_generator = Config::parse(
            r#"{"chain": {"n": 5, "alpha": {"constant": 1}, "beta": {"constant": 4},
                "omega": {"constant": 0.5}}}"#,
        )
        .unwrap();
        let expanded = with_generator.chain().unwrap().expand().unwrap();
        // Re-encode the expansion explicitly and parse again.
        let alpha: Vec<String> = expanded
            .upper
            .iter()
            .map(|z| format!("[{}, {}]", z.re, z.im))
            .collect();
        let beta: Vec<String> = expanded
            .lower
            .iter()
            .map(|z| format!("[{}, {}]", z.re, z.im))
            .collect();
        let omega: Vec<String> = expanded
            .onsite
            .iter()
            .map(|z| format!("[{}, {}]", z.re, z.im))
            .collect();
        let text = format!(
            r#"{{"chain": {{"n": 5, "alpha": [{}], "beta": [{}], "omega": [{}]}}}}"#,
            alpha.join(", "),
            beta.join(", "),
            omega.join(", ")
        );
        let reparsed = Config::parse(&text).unwrap().chain().unwrap().expand().unwrap();
        assert_eq!(expanded.upper, reparsed.upper);
        assert_eq!(expanded.lower, reparsed.lower);
        assert_eq!(expanded.onsite, reparsed.onsite);
    }

    #[test]
    fn sweep_and_analytic_sections_parse() {
        let cfg = Config::parse(
            r#"{"chain": {"n": 2, "omega": {"yuce": {"gamma": 1.0, "v0": 0.0}}},
                "sweep": {"parameter": "v0", "range": [0.0, 2.0], "steps": 100}}"#,
        )
        .unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.parameter, "v0");
        assert_eq!(sweep.steps, 100);

        let cfg = Config::parse(
            r#"{"analytic": {"model": "uniform", "n": 3, "omega": 0.0,
                "alpha": 1.0, "beta": 1.0}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.analytic, Some(AnalyticConfig::Uniform { n: 3, .. })));

        let cfg = Config::parse(r#"{"analytic": {"model": "2x2", "omega1": 0,
            "omega2": 2, "alpha": 1, "beta": [-0.75, 0]}}"#)
        .unwrap();
        assert!(matches!(cfg.analytic, Some(AnalyticConfig::TwoByTwo { .. })));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse(r#"{"chian": {"n": 1, "omega": [0]}}"#).is_err());
        assert!(Config::parse(
            r#"{"chain": {"n": 1, "omega": [0], "extra": 1}}"#
        )
        .is_err());
    }
}
