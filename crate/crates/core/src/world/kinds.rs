//! Static kind tables: receptacle kinds, object kinds, their affordances and
//! the six task families.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Receptacle kinds. Declaration order is alphabetical and is relied upon
/// for listing and search order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceptacleKind {
    Cabinet,
    Countertop,
    Desk,
    Drawer,
    Fridge,
    Garbagecan,
    Handtowelholder,
    Microwave,
    Safe,
    Shelf,
    Sidetable,
    Sinkbasin,
    Toilet,
    Toiletpaperhanger,
    Towelholder,
}

impl ReceptacleKind {
    pub const ALL: [ReceptacleKind; 15] = [
        Self::Cabinet,
        Self::Countertop,
        Self::Desk,
        Self::Drawer,
        Self::Fridge,
        Self::Garbagecan,
        Self::Handtowelholder,
        Self::Microwave,
        Self::Safe,
        Self::Shelf,
        Self::Sidetable,
        Self::Sinkbasin,
        Self::Toilet,
        Self::Toiletpaperhanger,
        Self::Towelholder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cabinet => "cabinet",
            Self::Countertop => "countertop",
            Self::Desk => "desk",
            Self::Drawer => "drawer",
            Self::Fridge => "fridge",
            Self::Garbagecan => "garbagecan",
            Self::Handtowelholder => "handtowelholder",
            Self::Microwave => "microwave",
            Self::Safe => "safe",
            Self::Shelf => "shelf",
            Self::Sidetable => "sidetable",
            Self::Sinkbasin => "sinkbasin",
            Self::Toilet => "toilet",
            Self::Toiletpaperhanger => "toiletpaperhanger",
            Self::Towelholder => "towelholder",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn openable(self) -> bool {
        matches!(
            self,
            Self::Cabinet | Self::Drawer | Self::Fridge | Self::Microwave | Self::Safe
        )
    }

    /// Relation word used when describing contents ("in" for containers,
    /// "on" for surfaces).
    pub fn preposition(self) -> &'static str {
        match self {
            Self::Cabinet
            | Self::Drawer
            | Self::Fridge
            | Self::Garbagecan
            | Self::Microwave
            | Self::Safe
            | Self::Sinkbasin => "in",
            _ => "on",
        }
    }
}

impl fmt::Display for ReceptacleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Static object properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Heatable,
    Coolable,
    Cleanable,
    Pickable,
    Elongated,
    LightSource,
}

/// Dynamic object state flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFlag {
    Hot,
    Cold,
    Clean,
    Lit,
}

impl StateFlag {
    /// The property an object needs before this flag may be set on it.
    pub fn required_property(self) -> Property {
        match self {
            Self::Hot => Property::Heatable,
            Self::Cold => Property::Coolable,
            Self::Clean => Property::Cleanable,
            Self::Lit => Property::LightSource,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Apple,
    Book,
    Bowl,
    Bread,
    Candle,
    Cellphone,
    Cloth,
    Creditcard,
    Cup,
    Desklamp,
    Egg,
    Handtowel,
    Keychain,
    Lettuce,
    Mug,
    Pan,
    Pen,
    Plate,
    Potato,
    Soapbar,
    Soapbottle,
    Spraybottle,
    Toiletpaper,
    Tomato,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 24] = [
        Self::Apple,
        Self::Book,
        Self::Bowl,
        Self::Bread,
        Self::Candle,
        Self::Cellphone,
        Self::Cloth,
        Self::Creditcard,
        Self::Cup,
        Self::Desklamp,
        Self::Egg,
        Self::Handtowel,
        Self::Keychain,
        Self::Lettuce,
        Self::Mug,
        Self::Pan,
        Self::Pen,
        Self::Plate,
        Self::Potato,
        Self::Soapbar,
        Self::Soapbottle,
        Self::Spraybottle,
        Self::Toiletpaper,
        Self::Tomato,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Apple => "apple",
            Self::Book => "book",
            Self::Bowl => "bowl",
            Self::Bread => "bread",
            Self::Candle => "candle",
            Self::Cellphone => "cellphone",
            Self::Cloth => "cloth",
            Self::Creditcard => "creditcard",
            Self::Cup => "cup",
            Self::Desklamp => "desklamp",
            Self::Egg => "egg",
            Self::Handtowel => "handtowel",
            Self::Keychain => "keychain",
            Self::Lettuce => "lettuce",
            Self::Mug => "mug",
            Self::Pan => "pan",
            Self::Pen => "pen",
            Self::Plate => "plate",
            Self::Potato => "potato",
            Self::Soapbar => "soapbar",
            Self::Soapbottle => "soapbottle",
            Self::Spraybottle => "spraybottle",
            Self::Toiletpaper => "toiletpaper",
            Self::Tomato => "tomato",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn properties(self) -> Vec<Property> {
        use ObjectKind::*;
        let mut props = Vec::new();
        if matches!(self, Apple | Bread | Cup | Egg | Mug | Plate | Potato | Tomato) {
            props.push(Property::Heatable);
        }
        if matches!(
            self,
            Apple | Bread | Cup | Egg | Lettuce | Mug | Pan | Plate | Potato | Tomato
        ) {
            props.push(Property::Coolable);
        }
        if matches!(
            self,
            Apple
                | Bowl
                | Cloth
                | Cup
                | Egg
                | Handtowel
                | Lettuce
                | Mug
                | Pan
                | Plate
                | Potato
                | Soapbar
                | Tomato
        ) {
            props.push(Property::Cleanable);
        }
        if self != Desklamp {
            props.push(Property::Pickable);
        }
        if matches!(self, Candle | Pen | Spraybottle | Soapbottle) {
            props.push(Property::Elongated);
        }
        if self == Desklamp {
            props.push(Property::LightSource);
        }
        props
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The six task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskType {
    #[serde(rename = "Pick&Place")]
    PickPlace,
    #[serde(rename = "Clean&Place")]
    CleanPlace,
    #[serde(rename = "Heat&Place")]
    HeatPlace,
    #[serde(rename = "Cool&Place")]
    CoolPlace,
    #[serde(rename = "Look")]
    Look,
    #[serde(rename = "Pick2&Place")]
    Pick2Place,
}

impl TaskType {
    pub const ALL: [TaskType; 6] = [
        Self::PickPlace,
        Self::CleanPlace,
        Self::HeatPlace,
        Self::CoolPlace,
        Self::Look,
        Self::Pick2Place,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Long name, e.g. `Pick&Place`.
    pub fn name(self) -> &'static str {
        match self {
            Self::PickPlace => "Pick&Place",
            Self::CleanPlace => "Clean&Place",
            Self::HeatPlace => "Heat&Place",
            Self::CoolPlace => "Cool&Place",
            Self::Look => "Look",
            Self::Pick2Place => "Pick2&Place",
        }
    }

    /// Report column name.
    pub fn column(self) -> &'static str {
        match self {
            Self::PickPlace => "Pick",
            Self::CleanPlace => "Clean",
            Self::HeatPlace => "Heat",
            Self::CoolPlace => "Cool",
            Self::Look => "Look",
            Self::Pick2Place => "Pick2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let lowered = name.to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.name().to_ascii_lowercase() == lowered || t.column().to_ascii_lowercase() == lowered)
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declaration_order_is_alphabetical() {
        let names: Vec<_> = ReceptacleKind::ALL.iter().map(|k| k.name()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        let names: Vec<_> = ObjectKind::ALL.iter().map(|k| k.name()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for (i, k) in ReceptacleKind::ALL.iter().enumerate() {
            assert_eq!(k.index(), i);
        }
    }

    #[test]
    fn task_type_names_round_trip() {
        for t in TaskType::ALL {
            assert_eq!(TaskType::from_name(t.name()), Some(t));
            assert_eq!(TaskType::from_name(t.column()), Some(t));
        }
    }
}
