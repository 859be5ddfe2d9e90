use std::io::{IsTerminal, Read};

use clap::ValueEnum;
use thiserror::Error;

use satdrw::dieudonne::ModelError;
use satdrw::modarith::ArithError;
use satdrw::polyring::{Ideal, PolyError, PolyRing, PresentationJson, PresentedRing, TermOrder};
use satdrw::vanish::VanishError;
use satdrw::wittvec::WittError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Inapplicable(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Inapplicable(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Parse { .. }
            | PolyError::Json(_)
            | PolyError::DuplicateVariable(_)
            | PolyError::PrimeOutOfRange(_)
            | PolyError::Arith(ArithError::NotPrime(_)) => CliError::Parse(e.to_string()),
            PolyError::NotAField(_) => CliError::Inapplicable(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<VanishError> for CliError {
    fn from(e: VanishError) -> Self {
        match e {
            VanishError::Poly(p) => p.into(),
            VanishError::ZeroIdeal | VanishError::BelowBound { .. } => CliError::Inapplicable(e.to_string()),
            VanishError::Json(_) => CliError::Parse(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<WittError> for CliError {
    fn from(e: WittError) -> Self {
        match e {
            WittError::Poly(p) => p.into(),
            WittError::NotPrime(_) | WittError::LevelMismatch(..) | WittError::ZeroLevel => {
                CliError::Parse(e.to_string())
            }
            WittError::FrobeniusAtLevelOne | WittError::TableTooLarge { .. } | WittError::LevelExceedsTable { .. } => {
                CliError::Inapplicable(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Arith(ArithError::NotPrime(_))
            | ModelError::Json(_)
            | ModelError::DuplicateLabel(_)
            | ModelError::UnknownLabel(_)
            | ModelError::InvalidWeight(..)
            | ModelError::InvalidParameters(_) => CliError::Parse(e.to_string()),
            ModelError::NegativeDegree(_) => CliError::Inapplicable(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(format!("JSON: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Lex,
    Grevlex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// y^2 - x^3 in F_p[y, x], lex
    Cusp,
    /// xy in F_p[x, y]
    Node,
    /// the plane F_p[x, y] itself
    Plane,
}

pub struct Session {
    pub p: Option<u64>,
    pub coeff_exp: Option<u32>,
    pub order: Option<OrderArg>,
    pub seed: u64,
    pub format: Format,
    pub preset: Option<Preset>,
    pub vars: Option<Vec<String>>,
    pub ideal: Vec<String>,
}

pub const DEFAULT_P: u64 = 2;

impl Session {
    pub fn prime(&self) -> u64 {
        self.p.unwrap_or(DEFAULT_P)
    }

    pub fn json(&self) -> bool {
        self.format == Format::Json
    }

    fn order_or(&self, default: TermOrder) -> TermOrder {
        match self.order {
            Some(OrderArg::Lex) => TermOrder::lex(),
            Some(OrderArg::Grevlex) => TermOrder::grevlex(),
            None => default,
        }
    }

    fn field_only(&self) -> Result<(), CliError> {
        match self.coeff_exp {
            Some(n) if n != 1 => Err(CliError::Inapplicable(format!(
                "ring computations run over F_p; --coeff-exp {n} only applies to dieudonne-check"
            ))),
            _ => Ok(()),
        }
    }

    fn preset_json(&self, preset: Preset) -> PresentationJson {
        let (vars, ideal, order): (&[&str], &[&str], TermOrder) = match preset {
            Preset::Cusp => (&["y", "x"], &["y^2 - x^3"], TermOrder::lex()),
            Preset::Node => (&["x", "y"], &["x*y"], TermOrder::grevlex()),
            Preset::Plane => (&["x", "y"], &[], TermOrder::grevlex()),
        };
        PresentationJson {
            p: self.prime(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            ideal: ideal.iter().map(|s| s.to_string()).collect(),
            order: Some(self.order_or(order)),
        }
    }

    /// The presentation named on the command line or piped on stdin, if any.
    pub fn presentation_json(&self) -> Result<Option<PresentationJson>, CliError> {
        if let Some(preset) = self.preset {
            return Ok(Some(self.preset_json(preset)));
        }
        if let Some(vars) = &self.vars {
            return Ok(Some(PresentationJson {
                p: self.prime(),
                vars: vars.clone(),
                ideal: self.ideal.clone(),
                order: Some(self.order_or(TermOrder::grevlex())),
            }));
        }
        if !self.ideal.is_empty() {
            return Err(CliError::Parse("--ideal needs --vars".into()));
        }
        let stdin = std::io::stdin();
        if stdin.is_terminal() {
            return Ok(None);
        }
        let mut text = String::new();
        stdin
            .lock()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Internal(format!("reading stdin: {e}")))?;
        if text.trim().is_empty() {
            return Ok(None);
        }
        let mut j: PresentationJson = serde_json::from_str(&text)?;
        if let Some(p) = self.p {
            if p != j.p {
                return Err(CliError::Parse(format!("--p {p} conflicts with p = {} on stdin", j.p)));
            }
        }
        if self.order.is_some() || j.order.is_none() {
            j.order = Some(self.order_or(TermOrder::grevlex()));
        }
        Ok(Some(j))
    }

    pub fn ring(&self) -> Result<PresentedRing, CliError> {
        self.field_only()?;
        let j = self.presentation_json()?.ok_or_else(|| {
            CliError::Parse("no ring given: use --preset, --vars/--ideal, or pipe presentation JSON on stdin".into())
        })?;
        Ok(PresentedRing::from_json(&j)?)
    }

    /// Like [`Session::ring`], falling back to `F_p` itself.
    pub fn ring_or_prime_field(&self) -> Result<PresentedRing, CliError> {
        self.field_only()?;
        match self.presentation_json()? {
            Some(j) => Ok(PresentedRing::from_json(&j)?),
            None => {
                let ring = PolyRing::new(self.prime(), vec![])?;
                Ok(PresentedRing::with_order(&Ideal::zero(&ring), &self.order_or(TermOrder::grevlex()))?)
            }
        }
    }
}
