//! Separable volumes, probabilities and hyperareas from the recognized models.
//!
//! cargo run --release --example separable_volumes

use sepvol::betafit::GModel;
use sepvol::volume::{volume_report, DEFAULT_SERIES_TERMS};
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    for case in [Case::Real, Case::Complex] {
        let r = volume_report(case, &GModel::closed_form(case), DEFAULT_SERIES_TERMS)?;
        println!("{r}");
    }
    Ok(())
}
