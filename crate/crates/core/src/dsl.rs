//! Text format for decorated γ-factors and move scripts.
//!
//! ```text
//! omega=tag;
//! Q=pi^-1/2;
//! G(1/2*s+0)
//! G(1*s+1/4+2i)
//! R: kappa=2^1; roots=[-1/2]; poles=[]
//! ```
//!
//! * `omega` is a tag identifier optionally followed by twists `*b^(i*t)`.
//! * `Q` and `kappa` are `1` or `*`-joined terms `b^e` with `b` a positive
//!   integer or `pi` and `e` rational; `kappa` may carry a leading `-`.
//! * Each `G(λ*s±μ)` is one factor; the sign belongs to the leading
//!   component of `μ`.
//! * The `R:` line is optional and defaults to `R ≡ 1`.
//! * `#` starts a comment running to the end of the line.
//!
//! Move scripts are comma-separated `expand(j)`, `contract(j)`,
//! `split(j,m)`, `merge(j..k,m)` or `merge({a,b,..},m)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{phase_twist, Base, GaussianRat, PowerProduct, Rat, Twist, UnitPhase};
use crate::gamma::{
    DataError, DecoratedGamma, GammaData, GammaFactor, Move, MoveTrace, RationalFactor,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{col}: {message}")]
    Invalid {
        line: usize,
        col: usize,
        message: String,
    },
}

impl DslError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            DslError::Syntax { line, col, .. } | DslError::Invalid { line, col, .. } => {
                (*line, *col)
            }
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn syntax<T>(&mut self, expected: &[&str]) -> Result<T, DslError> {
        self.skip_ws();
        let (line, col) = self.line_col(self.pos);
        let found = match self.rest().chars().next() {
            None => "end of input".to_string(),
            Some(_) => {
                let tok: String = self
                    .rest()
                    .chars()
                    .take_while(|c| !c.is_whitespace())
                    .take(12)
                    .collect();
                format!("'{tok}'")
            }
        };
        Err(DslError::Syntax {
            line,
            col,
            expected: expected.iter().map(|e| format!("'{e}'")).collect(),
            found,
        })
    }

    fn invalid<T>(&self, at: usize, message: impl Into<String>) -> Result<T, DslError> {
        let (line, col) = self.line_col(at);
        Err(DslError::Invalid {
            line,
            col,
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), DslError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.syntax(&[tok])
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        let n = self.rest()[..len].parse().ok();
        self.pos += len;
        n
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let len = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        Some(&rest[..len])
    }

    /// `digits ["/" digits]`, no sign.
    fn unsigned_rat(&mut self) -> Result<Rat, DslError> {
        let Some(n) = self.digits() else {
            return self.syntax(&["integer"]);
        };
        if self.eat("/") {
            let at = self.pos;
            let Some(d) = self.digits() else {
                return self.syntax(&["positive integer"]);
            };
            if d.is_zero() {
                return self.invalid(at, "zero denominator");
            }
            return Ok(Rat::new(n, d));
        }
        Ok(Rat::from_integer(n))
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat("+") {
            Some(false)
        } else if self.eat("-") {
            Some(true)
        } else {
            None
        }
    }

    fn rat(&mut self) -> Result<Rat, DslError> {
        let negative = self.eat("-");
        let q = self.unsigned_rat()?;
        Ok(if negative { -q } else { q })
    }

    fn usize(&mut self) -> Result<usize, DslError> {
        let at = self.pos;
        match self.digits() {
            Some(n) => match n.to_usize() {
                Some(v) => Ok(v),
                None => self.invalid(at, "index too large"),
            },
            None => self.syntax(&["index"]),
        }
    }

    /// `[sign] term [sign term]` where a term is a rational, optionally
    /// followed by `i`, or a bare `i`.
    fn gauss(&mut self) -> Result<GaussianRat, DslError> {
        let first_neg = self.sign().unwrap_or(false);
        let (value, imaginary) = self.gauss_term()?;
        let value = if first_neg { -value } else { value };
        if imaginary {
            return Ok(GaussianRat::new(Rat::zero(), value));
        }
        let save = self.pos;
        if let Some(neg) = self.sign() {
            // a following `+`/`-` only continues the number if it is the imaginary part
            if let Ok((im, true)) = self.gauss_term() {
                return Ok(GaussianRat::new(value, if neg { -im } else { im }));
            }
            self.pos = save;
        }
        Ok(GaussianRat::real(value))
    }

    fn gauss_term(&mut self) -> Result<(Rat, bool), DslError> {
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok((Rat::one(), true));
        }
        let q = match self.unsigned_rat() {
            Ok(q) => q,
            Err(_) => return self.syntax(&["rational", "i"]),
        };
        // no whitespace allowed between a coefficient and its `i`
        if self.rest().starts_with('i') {
            self.pos += 1;
            return Ok((q, true));
        }
        Ok((q, false))
    }

    /// Exponent after `^`: a signed rational, optionally parenthesized.
    fn exponent(&mut self) -> Result<Rat, DslError> {
        if self.eat("(") {
            let e = self.rat()?;
            self.expect(")")?;
            return Ok(e);
        }
        self.rat()
    }

    fn base_int(&mut self) -> Result<u64, DslError> {
        let at = self.pos;
        let Some(n) = self.digits() else {
            return self.syntax(&["integer", "pi"]);
        };
        match n.to_u64() {
            Some(0) => self.invalid(at, "base must be positive"),
            Some(v) => Ok(v),
            None => self.invalid(at, "base too large"),
        }
    }

    fn posreal(&mut self) -> Result<PowerProduct, DslError> {
        let mut acc = PowerProduct::one();
        loop {
            self.skip_ws();
            let at = self.pos;
            let term = if self.eat("pi") {
                let e = if self.eat("^") {
                    self.exponent()?
                } else {
                    Rat::one()
                };
                PowerProduct::pi_pow(e)
            } else {
                let b = self.base_int()?;
                let e = if self.eat("^") {
                    self.exponent()?
                } else {
                    Rat::one()
                };
                match PowerProduct::integer_pow(b, &e) {
                    Ok(p) => p,
                    Err(err) => return self.invalid(at, err.to_string()),
                }
            };
            acc = &acc * &term;
            // `*` continues the product unless what follows is not a term
            let save = self.pos;
            if self.eat("*") {
                match self.peek() {
                    Some(c) if c.is_ascii_digit() || self.rest().starts_with("pi") => continue,
                    _ => {
                        self.pos = save;
                        break;
                    }
                }
            }
            break;
        }
        Ok(acc)
    }

    fn phase(&mut self) -> Result<UnitPhase, DslError> {
        let Some(tag) = self.ident() else {
            return self.syntax(&["tag identifier"]);
        };
        let mut twist = Twist::identity();
        while self.eat("*") {
            self.skip_ws();
            let at = self.pos;
            let is_pi = self.eat("pi");
            let base = if is_pi { None } else { Some(self.base_int()?) };
            self.expect("^")?;
            self.expect("(")?;
            self.expect("i")?;
            self.expect("*")?;
            let t = self.rat()?;
            self.expect(")")?;
            let term = match base {
                None => {
                    let mut tw = Twist::identity();
                    tw.add_term(Base::Pi, &t);
                    tw
                }
                Some(b) => match phase_twist(&Rat::from_integer(b.into()), &t) {
                    Ok(tw) => tw,
                    Err(err) => return self.invalid(at, err.to_string()),
                },
            };
            twist = twist.compose(&term);
        }
        Ok(UnitPhase {
            tag: tag.to_string(),
            twist,
        })
    }

    fn factor(&mut self, index: usize) -> Result<GammaFactor, DslError> {
        let start = self.pos;
        self.expect("G(")?;
        let lambda = self.rat()?;
        self.expect("*")?;
        self.expect("s")?;
        if !matches!(self.peek(), Some('+' | '-')) {
            return self.syntax(&["+", "-"]);
        }
        let mu = self.gauss()?;
        self.expect(")")?;
        let f = GammaFactor::new(lambda, mu);
        if let Err(e) = GammaData::new(UnitPhase::default(), PowerProduct::one(), vec![f.clone()]) {
            let message = match e {
                DataError::NonPositiveLambda { lambda, .. } => {
                    format!("factor {index}: λ must be positive, got {lambda}")
                }
                DataError::NegativeRealPart { mu, .. } => {
                    format!("factor {index}: Re(μ) must be non-negative, got {mu}")
                }
            };
            return self.invalid(start, message);
        }
        Ok(f)
    }

    fn gauss_list(&mut self) -> Result<Vec<GaussianRat>, DslError> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(self.gauss()?);
            if self.eat("]") {
                return Ok(out);
            }
            if !self.eat(",") {
                return self.syntax(&[",", "]"]);
            }
        }
    }

    fn decoration(&mut self) -> Result<RationalFactor, DslError> {
        self.expect("R:")?;
        self.expect("kappa")?;
        self.expect("=")?;
        let negative = self.eat("-");
        let kappa = self.posreal()?;
        self.expect(";")?;
        self.expect("roots")?;
        self.expect("=")?;
        let roots = self.gauss_list()?;
        self.expect(";")?;
        self.expect("poles")?;
        self.expect("=")?;
        let poles = self.gauss_list()?;
        self.eat(";");
        Ok(RationalFactor::new(negative, kappa, roots, poles))
    }

    fn decorated(&mut self) -> Result<DecoratedGamma, DslError> {
        self.expect("omega")?;
        self.expect("=")?;
        let omega = self.phase()?;
        self.expect(";")?;
        self.expect("Q")?;
        self.expect("=")?;
        let q = self.posreal()?;
        self.expect(";")?;
        let mut factors = Vec::new();
        let mut rational = RationalFactor::default();
        loop {
            match self.peek() {
                None => break,
                Some('G') => {
                    let f = self.factor(factors.len())?;
                    factors.push(f);
                    self.eat("*");
                }
                Some('R') => {
                    rational = self.decoration()?;
                    if !self.at_end() {
                        return self.syntax(&["end of input"]);
                    }
                    break;
                }
                Some(_) => return self.syntax(&["G(", "R:", "end of input"]),
            }
        }
        let gamma = GammaData::new(omega, q, factors).expect("factors validated while parsing");
        Ok(DecoratedGamma::new(rational, gamma))
    }

    fn index_set(&mut self) -> Result<Vec<usize>, DslError> {
        if self.eat("{") {
            let mut out = vec![self.usize()?];
            while self.eat(",") {
                out.push(self.usize()?);
            }
            self.expect("}")?;
            return Ok(out);
        }
        let at = self.pos;
        let a = self.usize()?;
        if !self.eat("..") {
            return Ok(vec![a]);
        }
        let b = self.usize()?;
        if b < a {
            return self.invalid(at, format!("empty index range {a}..{b}"));
        }
        Ok((a..=b).collect())
    }

    fn order(&mut self) -> Result<u32, DslError> {
        let at = self.pos;
        let n = self.usize()?;
        match u32::try_from(n) {
            Ok(m) => Ok(m),
            Err(_) => self.invalid(at, "order too large"),
        }
    }

    fn script_move(&mut self) -> Result<Move, DslError> {
        let Some(name) = self.ident() else {
            return self.syntax(&["expand", "contract", "split", "merge"]);
        };
        self.expect("(")?;
        let mv = match name {
            "expand" => Move::Expand(self.usize()?),
            "contract" => Move::Contract(self.usize()?),
            "split" => {
                let j = self.usize()?;
                self.expect(",")?;
                Move::Split(j, self.order()?)
            }
            "merge" => {
                let ix = self.index_set()?;
                self.expect(",")?;
                Move::Merge(ix, self.order()?)
            }
            _ => {
                self.pos -= name.len();
                return self.syntax(&["expand", "contract", "split", "merge"]);
            }
        };
        self.expect(")")?;
        Ok(mv)
    }
}

/// Parse a decorated γ-factor, validating `λ > 0` and `Re μ ≥ 0`.
pub fn parse(text: &str) -> Result<DecoratedGamma, DslError> {
    Cursor::new(text).decorated()
}

/// Parse a comma-separated move script. The empty string is the empty
/// trace.
pub fn parse_script(text: &str) -> Result<MoveTrace, DslError> {
    let mut c = Cursor::new(text);
    let mut trace = MoveTrace::new();
    if c.at_end() {
        return Ok(trace);
    }
    loop {
        trace.push(c.script_move()?);
        if c.at_end() {
            return Ok(trace);
        }
        if !c.eat(",") {
            return c.syntax(&[",", "end of input"]);
        }
    }
}

/// `+μ` / `-μ` as it appears after `*s`.
fn signed(z: &GaussianRat) -> String {
    let s = z.to_string();
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

struct Canonical<'a>(&'a DecoratedGamma);

impl fmt::Display for Canonical<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0;
        writeln!(f, "omega={};", g.gamma.omega())?;
        writeln!(f, "Q={};", g.gamma.q())?;
        for fac in g.gamma.factors() {
            writeln!(f, "G({}*s{})", fac.lambda, signed(&fac.mu))?;
        }
        let r = &g.rational;
        if !r.is_one() {
            let list = |it: Vec<String>| it.join(",");
            writeln!(
                f,
                "R: kappa={}{}; roots=[{}]; poles=[{}]",
                if r.is_negative() { "-" } else { "" },
                r.kappa(),
                list(r.roots().iter().map(|z| z.to_string()).collect()),
                list(r.poles().iter().map(|z| z.to_string()).collect()),
            )?;
        }
        Ok(())
    }
}

/// Canonical text form: factors in stored order, bases and roots/poles
/// sorted, `R:` line omitted when `R ≡ 1`.
pub fn print(g: &DecoratedGamma) -> String {
    Canonical(g).to_string()
}

/// Canonical script form of a trace.
pub fn print_script(t: &MoveTrace) -> String {
    t.to_string()
}
