//! Mod-2 Steenrod algebra, unstable modules, Conley-index vanishing rules,
//! action-filtered chain complexes and certified lower bounds on intersection
//! counts.
//!
//! The algebra is over F2 throughout. Actions on filtered complexes are
//! generic over the scalar; the aliases below fix it to `f64`.

pub mod bounds;
pub mod conley;
pub mod f2core;
pub mod io;
pub mod morse;
pub mod steenrod;
pub mod stmod;

pub type Generator64 = morse::Generator<f64>;
pub type MorseComplex64 = morse::MorseComplex<f64>;
pub type LesReport64 = morse::LesReport<f64>;
pub type LesLevel64 = morse::LesLevel<f64>;
