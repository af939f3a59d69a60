//! Closed-form indicator formulas: population flow, GDP per capita, HDI, HPI,
//! Cobb-Douglas production, component harmonization, life quality, and the
//! sustainable-development index.
//!
//! Everything here is a pure function over plain values: no state, no I/O,
//! identical inputs give bit-identical outputs, so callers may share these
//! freely across threads.

use thiserror::Error;

/// Largest exponent magnitude accepted by [`population_flow`] before the
/// computation is rejected as an overflow risk (`exp(709.8)` is the f64 limit).
pub const EXPONENT_GUARD: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("population-flow exponent {exponent} exceeds the +/-{limit} overflow guard")]
    ExponentOverflow { exponent: f64, limit: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("population must be positive, got {0}")]
    ZeroPopulation(f64),
    #[error("degenerate goalposts: max ({max}) must exceed min ({min})")]
    DegenerateGoalposts { min: f64, max: f64 },
    #[error("HPI substitutability exponent must be >= 1, got {0}")]
    InvalidAlpha(f64),
    #[error("production factor {name} must be positive, got {value}")]
    NonPositiveInput { name: &'static str, value: f64 },
    #[error("component indices are all zero: harmonization is undefined")]
    DegenerateIndices,
    #[error("length mismatch: {values} sub-indices vs {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("weights sum to zero")]
    ZeroWeightSum,
}

/// Coefficients of the exponential population-flow function
/// `PPFL = exp(a0 + a1*POP + a3*L + a4*GL)`.
///
/// The exponent has no second-order term, so there is no `a2`; the field
/// names follow the flow function's coefficient numbering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpflParams {
    pub a0: f64,
    pub a1: f64,
    pub a3: f64,
    pub a4: f64,
}

impl PpflParams {
    pub fn new(a0: f64, a1: f64, a3: f64, a4: f64) -> Result<Self, KernelError> {
        for (name, v) in [("a0", a0), ("a1", a1), ("a3", a3), ("a4", a4)] {
            if !v.is_finite() {
                return Err(KernelError::InvalidInput(format!(
                    "population-flow coefficient {name} must be finite, got {v}"
                )));
            }
        }
        Ok(Self { a0, a1, a3, a4 })
    }

    /// All-zero coefficients: a unit flow regardless of inputs.
    pub fn zero() -> Self {
        Self { a0: 0.0, a1: 0.0, a3: 0.0, a4: 0.0 }
    }
}

/// Yearly expenditure-side national accounts, all in the same currency unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NationalAccounts {
    pub consumption: f64,
    pub investment: f64,
    pub government_spending: f64,
    pub exports: f64,
    pub imports: f64,
}

impl NationalAccounts {
    pub fn new(
        consumption: f64,
        investment: f64,
        government_spending: f64,
        exports: f64,
        imports: f64,
    ) -> Result<Self, KernelError> {
        let accounts = Self { consumption, investment, government_spending, exports, imports };
        accounts.validate()?;
        Ok(accounts)
    }

    pub fn zero() -> Self {
        Self {
            consumption: 0.0,
            investment: 0.0,
            government_spending: 0.0,
            exports: 0.0,
            imports: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        for (name, v) in [
            ("consumption", self.consumption),
            ("investment", self.investment),
            ("government_spending", self.government_spending),
            ("exports", self.exports),
            ("imports", self.imports),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(KernelError::InvalidInput(format!(
                    "account component {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// The three normalized HDI dimensions, each already on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdiComponents {
    pub gdp_index: f64,
    pub education_index: f64,
    pub life_expectancy_index: f64,
}

impl HdiComponents {
    pub fn new(
        gdp_index: f64,
        education_index: f64,
        life_expectancy_index: f64,
    ) -> Result<Self, KernelError> {
        for (name, v) in [
            ("gdp_index", gdp_index),
            ("education_index", education_index),
            ("life_expectancy_index", life_expectancy_index),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(KernelError::InvalidInput(format!(
                    "HDI component {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Self { gdp_index, education_index, life_expectancy_index })
    }
}

/// Deprivation rates (percent, on [0, 100]) and the substitutability
/// exponent feeding the poverty power mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpiInputs {
    /// Probability of not surviving to age 40, times 100.
    pub p1: f64,
    /// Adult illiteracy rate, percent.
    pub p2: f64,
    /// Deprivation average (no safe water / underweight children), percent.
    pub p3: f64,
    /// Substitutability exponent; 1 is a plain average, large values approach
    /// the worst dimension.
    pub alpha: f64,
}

impl HpiInputs {
    pub fn new(p1: f64, p2: f64, p3: f64, alpha: f64) -> Result<Self, KernelError> {
        let inputs = Self { p1, p2, p3, alpha };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if !self.alpha.is_finite() || self.alpha < 1.0 {
            return Err(KernelError::InvalidAlpha(self.alpha));
        }
        for (name, v) in [("p1", self.p1), ("p2", self.p2), ("p3", self.p3)] {
            if !v.is_finite() || !(0.0..=100.0).contains(&v) {
                return Err(KernelError::InvalidInput(format!(
                    "deprivation rate {name} must lie in [0, 100], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Cobb-Douglas parameters with the land exponent implied as
/// `1 - labor_elasticity - capital_elasticity`, kept strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionParams {
    pub tfp: f64,
    pub labor_elasticity: f64,
    pub capital_elasticity: f64,
}

impl ProductionParams {
    pub fn new(
        tfp: f64,
        labor_elasticity: f64,
        capital_elasticity: f64,
    ) -> Result<Self, KernelError> {
        let params = Self { tfp, labor_elasticity, capital_elasticity };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if !self.tfp.is_finite() || self.tfp <= 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "total factor productivity must be positive, got {}",
                self.tfp
            )));
        }
        if !self.labor_elasticity.is_finite() || self.labor_elasticity <= 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "labor elasticity must be positive, got {}",
                self.labor_elasticity
            )));
        }
        if !self.capital_elasticity.is_finite() || self.capital_elasticity <= 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "capital elasticity must be positive, got {}",
                self.capital_elasticity
            )));
        }
        if self.labor_elasticity + self.capital_elasticity >= 1.0 {
            return Err(KernelError::InvalidInput(format!(
                "elasticities must sum below 1 so the land exponent stays positive, got {} + {}",
                self.labor_elasticity, self.capital_elasticity
            )));
        }
        Ok(())
    }

    /// The implied land exponent.
    pub fn land_elasticity(&self) -> f64 {
        1.0 - self.labor_elasticity - self.capital_elasticity
    }
}

/// The (social, economic, natural) index triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentIndices {
    pub social: f64,
    pub economic: f64,
    pub natural: f64,
}

impl ComponentIndices {
    pub fn new(social: f64, economic: f64, natural: f64) -> Result<Self, KernelError> {
        for (name, v) in [("social", social), ("economic", economic), ("natural", natural)] {
            if !v.is_finite() || v < 0.0 {
                return Err(KernelError::InvalidInput(format!(
                    "component index {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self { social, economic, natural })
    }

    fn sum(&self) -> f64 {
        self.social + self.economic + self.natural
    }

    fn sum_of_squares(&self) -> f64 {
        self.social * self.social + self.economic * self.economic + self.natural * self.natural
    }
}

/// Min-max bounds for normalizing a raw indicator onto [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Goalposts {
    pub min: f64,
    pub max: f64,
}

impl Goalposts {
    pub fn new(min: f64, max: f64) -> Result<Self, KernelError> {
        if !min.is_finite() || !max.is_finite() || max <= min {
            return Err(KernelError::DegenerateGoalposts { min, max });
        }
        Ok(Self { min, max })
    }
}

/// GDP per capita with a validity note: negative values are legal (net
/// imports can swamp the domestic components) but worth flagging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdpPerCapita {
    pub value: f64,
    pub negative: bool,
}

/// `exp(a0 + a1*pop + a3*land + a4*green_land)`, the per-year population
/// in- or out-flow. Always strictly positive when it evaluates at all.
pub fn population_flow(
    params: &PpflParams,
    population: f64,
    land: f64,
    green_land: f64,
) -> Result<f64, KernelError> {
    for (name, v) in [("population", population), ("land", land), ("green_land", green_land)] {
        if !v.is_finite() || v < 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    if green_land > land {
        return Err(KernelError::InvalidInput(format!(
            "green_land ({green_land}) exceeds total land ({land})"
        )));
    }
    let exponent = params.a0 + params.a1 * population + params.a3 * land + params.a4 * green_land;
    if !exponent.is_finite() || exponent.abs() > EXPONENT_GUARD {
        return Err(KernelError::ExponentOverflow { exponent, limit: EXPONENT_GUARD });
    }
    Ok(exponent.exp())
}

/// `(C + I + G + (X - M)) / pop`. Negative GDP passes through with the
/// `negative` flag set instead of erroring.
pub fn gdp_per_capita(
    accounts: &NationalAccounts,
    population: f64,
) -> Result<GdpPerCapita, KernelError> {
    accounts.validate()?;
    if !population.is_finite() || population <= 0.0 {
        return Err(KernelError::ZeroPopulation(population));
    }
    let gdp = accounts.consumption
        + accounts.investment
        + accounts.government_spending
        + (accounts.exports - accounts.imports);
    let value = gdp / population;
    Ok(GdpPerCapita { value, negative: value < 0.0 })
}

/// Clamped min-max normalization: `clamp((value - min) / (max - min), 0, 1)`.
pub fn normalize_component(value: f64, goalposts: &Goalposts) -> Result<f64, KernelError> {
    if goalposts.max <= goalposts.min || !goalposts.min.is_finite() || !goalposts.max.is_finite() {
        return Err(KernelError::DegenerateGoalposts { min: goalposts.min, max: goalposts.max });
    }
    if value.is_nan() {
        return Err(KernelError::InvalidInput("cannot normalize NaN".to_string()));
    }
    Ok(((value - goalposts.min) / (goalposts.max - goalposts.min)).clamp(0.0, 1.0))
}

/// Arithmetic mean of the three HDI dimensions.
pub fn hdi(components: &HdiComponents) -> Result<f64, KernelError> {
    // Re-check so struct-literal callers get the same contract as `new`.
    let c = HdiComponents::new(
        components.gdp_index,
        components.education_index,
        components.life_expectancy_index,
    )?;
    Ok((c.gdp_index + c.education_index + c.life_expectancy_index) / 3.0)
}

/// Power-mean poverty aggregation `[(P1^a + P2^a + P3^a) / 3]^(1/a)`.
///
/// Evaluated with the largest rate factored out so large alphas stay inside
/// f64 range; the result always lies between the smallest and largest rate.
pub fn hpi(inputs: &HpiInputs) -> Result<f64, KernelError> {
    inputs.validate()?;
    let max = inputs.p1.max(inputs.p2).max(inputs.p3);
    if max == 0.0 {
        return Ok(0.0);
    }
    let mean = ((inputs.p1 / max).powf(inputs.alpha)
        + (inputs.p2 / max).powf(inputs.alpha)
        + (inputs.p3 / max).powf(inputs.alpha))
        / 3.0;
    Ok(max * mean.powf(1.0 / inputs.alpha))
}

/// Cobb-Douglas output `A * L^alpha * K^beta * P^(1 - alpha - beta)`.
pub fn production(
    params: &ProductionParams,
    labor: f64,
    capital: f64,
    land: f64,
) -> Result<f64, KernelError> {
    params.validate()?;
    for (name, v) in [("labor", labor), ("capital", capital), ("land", land)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(KernelError::NonPositiveInput { name, value: v });
        }
    }
    Ok(params.tfp
        * labor.powf(params.labor_elasticity)
        * capital.powf(params.capital_elasticity)
        * land.powf(params.land_elasticity()))
}

/// Cosine of the angle between the component vector and the balanced
/// diagonal: `(Is + Iec + In) / sqrt(3 (Is^2 + Iec^2 + In^2))`.
///
/// 1 means perfectly harmonized components; the Cauchy-Schwarz bound keeps
/// the true value in (0, 1] for non-negative, not-all-zero inputs, and the
/// result is clamped so float noise cannot push it past 1.
pub fn harmonization(components: &ComponentIndices) -> Result<f64, KernelError> {
    let c = ComponentIndices::new(components.social, components.economic, components.natural)?;
    let norm = c.sum_of_squares();
    if norm == 0.0 {
        return Err(KernelError::DegenerateIndices);
    }
    Ok((c.sum() / (3.0 * norm).sqrt()).min(1.0))
}

/// Life-quality index `sqrt(Is + Iec + In) * cos(alpha)`.
pub fn life_quality(components: &ComponentIndices) -> Result<f64, KernelError> {
    let cos_alpha = harmonization(components)?;
    Ok(components.sum().sqrt() * cos_alpha)
}

/// Sustainable-development index: the modulus `sqrt(Isec^2 + Ilq^2)`.
pub fn sustainable_development_index(
    security: f64,
    life_quality: f64,
) -> Result<f64, KernelError> {
    for (name, v) in [("security index", security), ("life-quality index", life_quality)] {
        if !v.is_finite() || v < 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    Ok((security * security + life_quality * life_quality).sqrt())
}

/// Weighted mean of infrastructure sub-indices: `sum(w*x) / sum(w)`.
pub fn infrastructure_composite(
    sub_indices: &[f64],
    weights: &[f64],
) -> Result<f64, KernelError> {
    if sub_indices.len() != weights.len() || sub_indices.is_empty() {
        return Err(KernelError::LengthMismatch {
            values: sub_indices.len(),
            weights: weights.len(),
        });
    }
    for &x in sub_indices {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(KernelError::InvalidInput(format!(
                "infrastructure sub-index must lie in [0, 1], got {x}"
            )));
        }
    }
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(KernelError::InvalidInput(format!(
                "infrastructure weight must be finite and non-negative, got {w}"
            )));
        }
    }
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 {
        return Err(KernelError::ZeroWeightSum);
    }
    let weighted: f64 = sub_indices.iter().zip(weights).map(|(x, w)| x * w).sum();
    Ok(weighted / weight_sum)
}
