//! JSON form: `{"num_qubits": n, "terms": [{"coeff": c, "paulis": [[q, "X"], ...]}]}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::hamiltonian::{Hamiltonian, PauliTerm};

#[derive(Serialize, Deserialize)]
struct HamiltonianJson<T> {
    num_qubits: usize,
    terms: Vec<PauliTerm<T>>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("Hamiltonian serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: Real> Serialize for Hamiltonian<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        HamiltonianJson {
            num_qubits: self.num_qubits(),
            terms: self.terms().to_vec(),
        }
        .serialize(ser)
    }
}

impl<'de, T: Real> Deserialize<'de> for Hamiltonian<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = HamiltonianJson::<T>::deserialize(de)?;
        if raw.num_qubits == 0 {
            return Err(D::Error::custom("num_qubits must be positive"));
        }
        let terms = raw.terms.into_iter().map(|t| (t.coeff, t.string));
        Hamiltonian::from_terms(raw.num_qubits, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_merge() {
        let src = r#"{"num_qubits":3,"terms":[
            {"coeff":0.5,"paulis":[[0,"Z"],[1,"Z"]]},
            {"coeff":0.5,"paulis":[[1,"Z"],[0,"Z"]]},
            {"coeff":-2.0,"paulis":[]}]}"#;
        let h: Hamiltonian<f64> = Hamiltonian::from_json_str(src).unwrap();
        assert_eq!(h.len(), 2);
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(
            text,
            r#"{"num_qubits":3,"terms":[{"coeff":-2.0,"paulis":[]},{"coeff":1.0,"paulis":[[0,"Z"],[1,"Z"]]}]}"#
        );
        let back: Hamiltonian<f64> = Hamiltonian::from_json_str(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Hamiltonian::<f64>::from_json_str(r#"{"num_qubits":1,"terms":[{"coeff":1,"paulis":[[1,"X"]]}]}"#).is_err());
        assert!(Hamiltonian::<f64>::from_json_str(r#"{"num_qubits":1,"terms":[{"coeff":1,"paulis":[[0,"W"]]}]}"#).is_err());
    }
}
