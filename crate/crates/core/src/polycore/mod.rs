//! Exact sparse integer polynomials and polynomial systems.

mod boxes;
mod eval;
mod multilinear;
mod poly;
mod system;

pub use boxes::{BoxDomain, BoxMetadata};
pub use eval::{IntEvaluator, ModEvaluator};
pub use multilinear::MultilinearForm;
pub use poly::{grlex_cmp, Polynomial, Term};
pub use system::{
    combinations, determinant, poly_from_terms, poly_to_terms, Heights, PolySystem, SystemDocument,
    TermDocument,
};

impl PolySystem {
    /// Multilinear forms `Γ_i` of the top-degree parts.
    pub fn multilinear_forms(&self) -> Vec<MultilinearForm> {
        self.polys()
            .iter()
            .enumerate()
            .map(|(i, p)| MultilinearForm::from_form(i, &p.homogeneous_part(self.d()), self.d()))
            .collect()
    }
}
