//! Reproducible sampling of parameter valuations.
//!
//! Generator: xoshiro256++ seeded through `seed_from_u64`. Parameter `k` draws
//! from its own stream, obtained by applying the generator's `jump` (2^128
//! steps) `k` times to the master state. A uniform variate takes the top 53
//! bits of one output as `(x >> 11) + 0.5` scaled by 2^-53, so it lies
//! strictly inside (0, 1). Normal variates use the inverse CDF of Wichura's
//! AS241 (PPND16), accurate to about 1e-16.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::model::{check_graph_preserving, Distribution, ParametricCtmc, Valuation};
use crate::scalar::{f64_to_rational, rational_to_f64};

/// Accepted valuations plus the number of rejected draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub seed: u64,
    pub valuations: Vec<Valuation>,
    pub rejected: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SamplingError {
    #[error("sample count must be at least 1")]
    Empty,
    #[error("distribution incompatible with graph-preserving region ({rejected} of {drawn} draws rejected)")]
    Incompatible { drawn: usize, rejected: usize },
    #[error("non-finite draw for parameter {0}")]
    NonFinite(String),
    #[error("malformed samples file: {0}")]
    Format(String),
}

/// Independent per-parameter uniform streams.
pub struct Streams {
    streams: Vec<Xoshiro256PlusPlus>,
}

impl Streams {
    pub fn new(seed: u64, count: usize) -> Self {
        let mut master = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut streams = Vec::with_capacity(count);
        for _ in 0..count {
            streams.push(master.clone());
            master.jump();
        }
        Streams { streams }
    }

    pub fn uniform(&mut self, k: usize) -> f64 {
        let x = self.streams[k].next_u64();
        ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn draw(&mut self, k: usize, d: &Distribution) -> f64 {
        let p = self.uniform(k);
        match *d {
            Distribution::Normal { mean, std } => mean + std * inverse_normal_cdf(p),
            Distribution::Uniform { low, high } => low + (high - low) * p,
        }
    }
}

/// Draws `n` graph-preserving valuations. Rejected draws are redrawn; the run
/// fails once at least `10 n` draws were made and more than 99% of them were
/// rejected.
pub fn sample_valuations(
    m: &ParametricCtmc,
    n: usize,
    seed: u64,
) -> Result<SampleSet, SamplingError> {
    if n == 0 {
        return Err(SamplingError::Empty);
    }
    let mut streams = Streams::new(seed, m.parameters.len());
    let mut valuations = Vec::with_capacity(n);
    let mut drawn = 0usize;
    let mut rejected = 0usize;
    while valuations.len() < n {
        let mut u = Vec::with_capacity(m.parameters.len());
        for (k, p) in m.parameters.iter().enumerate() {
            let x = streams.draw(k, &p.distribution);
            u.push(f64_to_rational(x).ok_or_else(|| SamplingError::NonFinite(p.name.clone()))?);
        }
        drawn += 1;
        if check_graph_preserving(m, &u).ok {
            valuations.push(u);
        } else {
            rejected += 1;
            if drawn >= 10 * n && rejected * 100 > drawn * 99 {
                return Err(SamplingError::Incompatible { drawn, rejected });
            }
        }
    }
    Ok(SampleSet {
        seed,
        valuations,
        rejected,
    })
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    seed: u64,
    valuations: Vec<Vec<f64>>,
    rejected: usize,
}

impl SampleSet {
    pub fn to_json(&self) -> String {
        let doc = SampleDoc {
            seed: self.seed,
            valuations: self
                .valuations
                .iter()
                .map(|u| u.iter().map(rational_to_f64).collect())
                .collect(),
            rejected: self.rejected,
        };
        serde_json::to_string_pretty(&doc).expect("serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, SamplingError> {
        let doc: SampleDoc =
            serde_json::from_str(text).map_err(|e| SamplingError::Format(e.to_string()))?;
        let valuations = doc
            .valuations
            .into_iter()
            .map(|u| {
                u.into_iter()
                    .map(|x| {
                        f64_to_rational(x)
                            .ok_or_else(|| SamplingError::Format("non-finite value".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SampleSet {
            seed: doc.seed,
            valuations,
            rejected: doc.rejected,
        })
    }
}

/// Quantile function of the standard normal distribution (AS241, PPND16).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    fn ratio(num: &[f64; 8], den: &[f64; 8], r: f64) -> f64 {
        let n = num.iter().rev().fold(0.0, |acc, c| acc * r + c);
        let d = den.iter().rev().fold(0.0, |acc, c| acc * r + c);
        n / d
    }

    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return match p {
            x if x == 0.0 => f64::NEG_INFINITY,
            x if x == 1.0 => f64::INFINITY,
            _ => f64::NAN,
        };
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * ratio(&A, &B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        ratio(&C, &D, r - 1.6)
    } else {
        ratio(&E, &F, r - 5.0)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}
