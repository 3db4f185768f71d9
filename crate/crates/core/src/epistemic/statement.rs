use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::EpistemicError;

/// A nested knowledge formula over outcome atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    Atom { variable: String, value: String },
    Implies(Box<Statement>, Box<Statement>),
    Knows(String, Box<Statement>),
}

impl Statement {
    pub fn atom(variable: &str, value: &str) -> Self {
        Statement::Atom { variable: variable.into(), value: value.into() }
    }

    pub fn implies(p: Statement, q: Statement) -> Result<Self, EpistemicError> {
        if p.depth() > 0 || q.depth() > 0 {
            return Err(EpistemicError::KnowsInsideImplies(format!("{p} ⟹ {q}")));
        }
        Ok(Statement::Implies(Box::new(p), Box::new(q)))
    }

    pub fn knows(agent: &str, s: Statement) -> Self {
        Statement::Knows(agent.into(), Box::new(s))
    }

    /// Number of nested `Knows`.
    pub fn depth(&self) -> usize {
        match self {
            Statement::Atom { .. } => 0,
            Statement::Implies(p, q) => p.depth().max(q.depth()),
            Statement::Knows(_, s) => 1 + s.depth(),
        }
    }

    /// Variables mentioned by atoms, in sorted order.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Statement::Atom { variable, .. } => {
                out.insert(variable);
            }
            Statement::Implies(p, q) => {
                p.collect_variables(out);
                q.collect_variables(out);
            }
            Statement::Knows(_, s) => s.collect_variables(out),
        }
    }

    /// `(agent, inner)` when the statement is `K_agent[inner]`.
    pub fn as_knows(&self) -> Option<(&str, &Statement)> {
        match self {
            Statement::Knows(a, s) => Some((a, s)),
            _ => None,
        }
    }

    pub fn as_implies(&self) -> Option<(&Statement, &Statement)> {
        match self {
            Statement::Implies(p, q) => Some((p, q)),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<(&str, &str)> {
        match self {
            Statement::Atom { variable, value } => Some((variable, value)),
            _ => None,
        }
    }

    /// Parses `K_Bob[a=- ⟹ b=+]`; `=>` is accepted for `⟹`.
    pub fn parse(text: &str) -> Result<Self, EpistemicError> {
        let mut p = Parser { src: text, pos: 0 };
        let s = p.implication()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(s)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Atom { variable, value } => write!(f, "{variable}={value}"),
            Statement::Implies(p, q) => {
                match **p {
                    Statement::Implies(..) => write!(f, "({p})")?,
                    _ => write!(f, "{p}")?,
                }
                write!(f, " ⟹ {q}")
            }
            Statement::Knows(a, s) => write!(f, "K_{a}[{s}]"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn error(&self, what: &str) -> EpistemicError {
        EpistemicError::Parse(format!("{what} at byte {} of `{}`", self.pos, self.src))
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Statement, EpistemicError> {
        let lhs = self.primary()?;
        if self.eat("⟹") || self.eat("=>") {
            let rhs = self.implication()?;
            return Statement::implies(lhs, rhs);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Statement, EpistemicError> {
        if self.eat("(") {
            let s = self.implication()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(s);
        }
        if self.eat("K_") {
            let agent = self.word();
            if agent.is_empty() || !self.eat("[") {
                return Err(self.error("expected `K_agent[`"));
            }
            let inner = self.implication()?;
            if !self.eat("]") {
                return Err(self.error("expected `]`"));
            }
            return Ok(Statement::knows(&agent, inner));
        }
        let variable = self.word();
        if variable.is_empty() || !self.eat("=") {
            return Err(self.error("expected `variable=value`"));
        }
        let value = self.word();
        if value.is_empty() {
            return Err(self.error("expected a value"));
        }
        Ok(Statement::atom(&variable, &value))
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let len = self
            .rest()
            .char_indices()
            .find(|(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '+' | '-' | '\'')))
            .map(|(i, _)| i)
            .unwrap_or(self.rest().len());
        let out = self.rest()[..len].to_string();
        self.pos += out.len();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_round_trip() {
        let s = Statement::knows(
            "Debbie",
            Statement::knows(
                "Charlie",
                Statement::implies(Statement::atom("c", "0"), Statement::atom("b", "+")).unwrap(),
            ),
        );
        assert_eq!(s.to_string(), "K_Debbie[K_Charlie[c=0 ⟹ b=+]]");
        assert_eq!(Statement::parse(&s.to_string()).unwrap(), s);
        assert_eq!(Statement::parse("K_Debbie[K_Charlie[c=0 => b=+]]").unwrap(), s);
        assert_eq!(s.depth(), 2);
    }

    #[test]
    fn minus_value_before_arrow() {
        let s = Statement::parse("K_Alice[a=-=>b=+]").unwrap();
        assert_eq!(s.to_string(), "K_Alice[a=- ⟹ b=+]");
    }

    #[test]
    fn knows_inside_implies_rejected() {
        let k = Statement::knows("Alice", Statement::atom("a", "-"));
        assert!(Statement::implies(k, Statement::atom("b", "+")).is_err());
        assert!(Statement::parse("K_A[a=-] => b=+").is_err());
    }
}
