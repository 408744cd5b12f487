use std::fmt;

use serde::{Deserialize, Serialize};

use super::WorldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Goto,
    Open,
    Close,
    Take,
    Put,
    Heat,
    Cool,
    Clean,
    Use,
}

impl Verb {
    pub const ALL: [Verb; 9] = [
        Verb::Goto,
        Verb::Open,
        Verb::Close,
        Verb::Take,
        Verb::Put,
        Verb::Heat,
        Verb::Cool,
        Verb::Clean,
        Verb::Use,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Verb::Goto => "goto",
            Verb::Open => "open",
            Verb::Close => "close",
            Verb::Take => "take",
            Verb::Put => "put",
            Verb::Heat => "heat",
            Verb::Cool => "cool",
            Verb::Clean => "clean",
            Verb::Use => "use",
        }
    }
}

/// A skill-level action. `args` holds entity ids: the receptacle for
/// goto/open/close, `[object, receptacle]` for take/put/heat/cool/clean and
/// `[object]` for use.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkillAction {
    pub verb: Verb,
    pub args: Vec<String>,
    pub surface_form: String,
}

impl SkillAction {
    pub fn new(verb: Verb, args: Vec<String>) -> Self {
        let surface_form = render_surface(verb, &args);
        SkillAction { verb, args, surface_form }
    }

    pub fn goto(r: &str) -> Self {
        Self::new(Verb::Goto, vec![r.to_string()])
    }
    pub fn open(r: &str) -> Self {
        Self::new(Verb::Open, vec![r.to_string()])
    }
    pub fn close(r: &str) -> Self {
        Self::new(Verb::Close, vec![r.to_string()])
    }
    pub fn take(o: &str, r: &str) -> Self {
        Self::new(Verb::Take, vec![o.to_string(), r.to_string()])
    }
    pub fn put(o: &str, r: &str) -> Self {
        Self::new(Verb::Put, vec![o.to_string(), r.to_string()])
    }
    pub fn heat(o: &str, r: &str) -> Self {
        Self::new(Verb::Heat, vec![o.to_string(), r.to_string()])
    }
    pub fn cool(o: &str, r: &str) -> Self {
        Self::new(Verb::Cool, vec![o.to_string(), r.to_string()])
    }
    pub fn clean(o: &str, r: &str) -> Self {
        Self::new(Verb::Clean, vec![o.to_string(), r.to_string()])
    }
    pub fn use_object(o: &str) -> Self {
        Self::new(Verb::Use, vec![o.to_string()])
    }

    /// The receptacle the action refers to, if it names one.
    pub fn receptacle_arg(&self) -> Option<&str> {
        match self.verb {
            Verb::Goto | Verb::Open | Verb::Close => self.args.first().map(String::as_str),
            Verb::Use => None,
            _ => self.args.get(1).map(String::as_str),
        }
    }

    pub fn object_arg(&self) -> Option<&str> {
        match self.verb {
            Verb::Goto | Verb::Open | Verb::Close => None,
            _ => self.args.first().map(String::as_str),
        }
    }

    /// Parses a surface form. Accepts `goto R` as well as `go to R`, and
    /// `in`, `on` or `in/on` for put.
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let cleaned = text.trim().trim_end_matches('.').to_ascii_lowercase();
        let toks: Vec<&str> = cleaned.split_whitespace().collect();
        let bad = || WorldError::Parse(text.to_string());
        let entity = |t: &[&str]| -> Result<String, WorldError> {
            match t {
                [name, idx] if idx.parse::<u32>().is_ok() && name.chars().all(|c| c.is_ascii_alphabetic()) => {
                    Ok(format!("{name} {idx}"))
                }
                _ => Err(bad()),
            }
        };
        let action = match toks.as_slice() {
            ["go", "to", rest @ ..] | ["goto", rest @ ..] => Self::goto(&entity(rest)?),
            ["open", rest @ ..] => Self::open(&entity(rest)?),
            ["close", rest @ ..] => Self::close(&entity(rest)?),
            ["take", o, oi, "from", rest @ ..] => Self::take(&entity(&[o, oi])?, &entity(rest)?),
            ["put", o, oi, prep, rest @ ..] if matches!(*prep, "in" | "on" | "in/on") => {
                Self::put(&entity(&[o, oi])?, &entity(rest)?)
            }
            ["heat", o, oi, "with", rest @ ..] => Self::heat(&entity(&[o, oi])?, &entity(rest)?),
            ["cool", o, oi, "with", rest @ ..] => Self::cool(&entity(&[o, oi])?, &entity(rest)?),
            ["clean", o, oi, "with", rest @ ..] => Self::clean(&entity(&[o, oi])?, &entity(rest)?),
            ["use", rest @ ..] => Self::use_object(&entity(rest)?),
            _ => return Err(bad()),
        };
        Ok(action)
    }
}

fn render_surface(verb: Verb, args: &[String]) -> String {
    let a = |i: usize| args.get(i).map(String::as_str).unwrap_or("");
    match verb {
        Verb::Goto => format!("go to {}", a(0)),
        Verb::Open => format!("open {}", a(0)),
        Verb::Close => format!("close {}", a(0)),
        Verb::Take => format!("take {} from {}", a(0), a(1)),
        Verb::Put => format!("put {} in/on {}", a(0), a(1)),
        Verb::Heat => format!("heat {} with {}", a(0), a(1)),
        Verb::Cool => format!("cool {} with {}", a(0), a(1)),
        Verb::Clean => format!("clean {} with {}", a(0), a(1)),
        Verb::Use => format!("use {}", a(0)),
    }
}

impl fmt::Display for SkillAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface_form)
    }
}

/// Low-level primitives a skill expands into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MicroAction {
    MoveNorth,
    MoveSouth,
    MoveEast,
    MoveWest,
    ActuateOpen,
    ActuateClose,
    Grasp,
    Release,
    Toggle,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_surface_forms() {
        let a = SkillAction::parse("put spraybottle 2 in/on toilet 1").unwrap();
        assert_eq!(a, SkillAction::put("spraybottle 2", "toilet 1"));
        assert_eq!(SkillAction::parse("go to cabinet 1").unwrap(), SkillAction::goto("cabinet 1"));
        assert_eq!(SkillAction::parse("goto cabinet 1").unwrap(), SkillAction::goto("cabinet 1"));
        assert_eq!(
            SkillAction::parse("put mug 1 on shelf 2.").unwrap(),
            SkillAction::put("mug 1", "shelf 2")
        );
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "go to", "take spraybottle from cabinet 2", "dance 1", "open cabinet x"] {
            assert!(SkillAction::parse(s).is_err(), "{s}");
        }
    }
}
