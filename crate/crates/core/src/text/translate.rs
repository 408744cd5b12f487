use serde::{Deserialize, Serialize};

use crate::world::{Delta, FeedbackCode, SkillAction, StateFlag, StepOutcome, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextObs {
    pub room_description: String,
    pub observed_objects: Vec<String>,
    pub observed_relations: Vec<String>,
    pub inventory: Vec<String>,
    pub location: String,
}

impl TextObs {
    pub fn inventory_text(&self) -> String {
        if self.inventory.is_empty() {
            "You are carrying nothing.".to_string()
        } else {
            format!("You are carrying: {}.", article_list(&self.inventory))
        }
    }

    pub fn location_text(&self) -> String {
        if self.location == MIDDLE {
            "You are in the middle of the room.".to_string()
        } else {
            format!("You are at {}.", self.location)
        }
    }

    /// Multi-line rendering used in transcripts.
    pub fn render(&self) -> String {
        let mut lines = vec![self.room_description.clone(), self.location_text()];
        if !self.observed_relations.is_empty() {
            lines.push(format!("You notice: {}.", self.observed_relations.join("; ")));
        }
        lines.push(self.inventory_text());
        lines.join("\n")
    }
}

pub const MIDDLE: &str = "middle of the room";

/// Joins names as "a x 1, a y 2", the article style of the room description.
pub fn article_list(items: &[String]) -> String {
    items.iter().map(|i| format!("a {i}")).collect::<Vec<_>>().join(", ")
}

pub fn room_description(state: &WorldState) -> String {
    let mut order: Vec<&crate::world::ReceptacleSpec> = state.receptacles.iter().collect();
    order.sort_by(|a, b| a.kind.cmp(&b.kind).then(b.index.cmp(&a.index)));
    let names: Vec<String> = order.iter().map(|r| format!("a {}", r.id)).collect();
    let listing = match names.len() {
        0 => "nothing".to_string(),
        1 => names[0].clone(),
        n => format!("{}, and {}", names[..n - 1].join(", "), names[n - 1]),
    };
    format!("You are in the middle of a room. Looking quickly around you, you see {listing}.")
}

pub fn translate_state(state: &WorldState) -> TextObs {
    let mut observed_objects = Vec::new();
    let mut observed_relations = Vec::new();
    for rec in &state.receptacles {
        if rec.openable {
            let word = if rec.is_open { "open" } else { "closed" };
            observed_relations.push(format!("{} is {word}", rec.id));
        }
        if !rec.accessible() {
            continue;
        }
        for o in &rec.contents {
            observed_objects.push(o.clone());
            observed_relations.push(format!("{o} is {} {}", rec.kind.preposition(), rec.id));
        }
    }
    for o in &state.inventory {
        observed_relations.push(format!("carrying {o}"));
    }
    TextObs {
        room_description: room_description(state),
        observed_objects,
        observed_relations,
        inventory: state.inventory.clone(),
        location: state.agent_facing.clone().unwrap_or_else(|| MIDDLE.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeedbackLine {
    pub text: String,
    pub code: FeedbackCode,
}

pub const FAILURE_PREFIX: &str = "[Action failed]";

/// Renders a step outcome the way the environment reports it. `state` is
/// the state the action was taken in.
pub fn translate_outcome(outcome: &StepOutcome, action: &SkillAction, state: &WorldState) -> FeedbackLine {
    let prep = |rid: &str| state.receptacle(rid).map(|r| r.kind.preposition()).unwrap_or("in");
    let text = match &outcome.observed_delta {
        Delta::Failed { referent } => {
            let referent = action.receptacle_arg().map(str::to_string).unwrap_or_else(|| referent.clone());
            format!("{FAILURE_PREFIX} {referent}.")
        }
        Delta::Arrived { receptacle, closed: true, .. } => format!("The {receptacle} is closed."),
        Delta::Arrived { receptacle, visible, .. } if visible.is_empty() => {
            format!("On the {receptacle}, you see nothing.")
        }
        Delta::Arrived { receptacle, visible, .. } => {
            format!("On the {receptacle}, there is {}.", article_list(visible))
        }
        Delta::Opened { receptacle, contents } if contents.is_empty() => {
            format!("The {receptacle} is open. It is empty.")
        }
        Delta::Opened { receptacle, contents } => {
            format!("The {receptacle} is open. In it, you see {}.", article_list(contents))
        }
        Delta::Closed { receptacle } => format!("You close the {receptacle}."),
        Delta::PickedUp { object, from } => format!("You pick up the {object} from the {from}."),
        Delta::Placed { object, into } => format!("You put the {object} {} the {into}.", prep(into)),
        Delta::Transformed { object, flag, appliance } => {
            let verb = match flag {
                StateFlag::Hot => "heat",
                StateFlag::Cold => "cool",
                _ => "clean",
            };
            format!("You {verb} the {object} using the {appliance}.")
        }
        Delta::Toggled { object, lit: true } => format!("You turn on the {object}."),
        Delta::Toggled { object, lit: false } => format!("You turn off the {object}."),
    };
    FeedbackLine { text, code: outcome.feedback_code }
}
