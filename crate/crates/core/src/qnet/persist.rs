//! Versioned JSON weight files.
//!
//! Numbers are written as f64 in shortest round-trip form, so a network
//! saved and loaded on the same platform is bit-identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnet::network::{Activation, DenseLayer, QNetwork};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "chemotaxis-qnet";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    format: String,
    version: u32,
    layer_sizes: Vec<usize>,
    activations: Vec<Activation>,
    layers: Vec<LayerRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    /// One row per output node.
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

pub fn save_network<T: Scalar>(net: &QNetwork<T>) -> String {
    let file = WeightFile {
        format: FORMAT_NAME.to_owned(),
        version: FORMAT_VERSION,
        layer_sizes: net.layer_sizes(),
        activations: net.layers().iter().map(|l| l.activation()).collect(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerRecord {
                weights: l
                    .weights()
                    .chunks_exact(l.inputs())
                    .map(|row| row.iter().map(|w| w.as_f64()).collect())
                    .collect(),
                biases: l.biases().iter().map(|b| b.as_f64()).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("weight file serializes");
    text.push('\n');
    text
}

pub fn load_network<T: Scalar>(text: &str) -> Result<QNetwork<T>> {
    let file: WeightFile =
        serde_json::from_str(text).map_err(|e| Error::Persistence(e.to_string()))?;
    if file.format != FORMAT_NAME {
        return Err(Error::Persistence(format!("unknown format tag {:?}", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(Error::Persistence(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    let n = file.layers.len();
    if file.layer_sizes.len() != n + 1 || file.activations.len() != n || n == 0 {
        return Err(Error::Persistence(
            "layer sizes, activations, and layers disagree in count".into(),
        ));
    }
    let mut layers = Vec::with_capacity(n);
    for (i, (record, &activation)) in file.layers.into_iter().zip(&file.activations).enumerate() {
        let (inputs, outputs) = (file.layer_sizes[i], file.layer_sizes[i + 1]);
        if record.weights.len() != outputs || record.weights.iter().any(|r| r.len() != inputs) {
            return Err(Error::Persistence(format!(
                "layer {i}: weight matrix is not {outputs}x{inputs}"
            )));
        }
        let weights = record.weights.into_iter().flatten().map(T::lit).collect();
        let biases = record.biases.into_iter().map(T::lit).collect();
        let layer = DenseLayer::new(inputs, outputs, weights, biases, activation)
            .map_err(|e| Error::Persistence(format!("layer {i}: {e}")))?;
        layers.push(layer);
    }
    QNetwork::from_layers(layers).map_err(|e| Error::Persistence(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = QNetwork::<f64>::glorot(&[8, 24, 24, 24, 2], &mut rng).unwrap();
        let back: QNetwork<f64> = load_network(&save_network(&net)).unwrap();
        assert_eq!(back, net);
        let input = [0.3, -1.0, 0.1, 1.0, -0.4, -1.0, 0.0, 1.0];
        let a = net.forward(&input).unwrap();
        let b = back.forward(&input).unwrap();
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(a[1].to_bits(), b[1].to_bits());
    }

    #[test]
    fn single_precision_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = QNetwork::<f32>::glorot(&[4, 6, 2], &mut rng).unwrap();
        let back: QNetwork<f32> = load_network(&save_network(&net)).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn header_records_layout() {
        let net = QNetwork::<f64>::zeros(&[20, 36, 36, 36, 2]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&save_network(&net)).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["layer_sizes"], serde_json::json!([20, 36, 36, 36, 2]));
        assert_eq!(
            v["activations"],
            serde_json::json!(["tanh", "tanh", "tanh", "identity"])
        );
    }

    #[test]
    fn corrupt_files_are_rejected() {
        assert!(load_network::<f64>("not json").is_err());
        let net = QNetwork::<f64>::zeros(&[3, 4, 2]).unwrap();
        let text = save_network(&net).replace("\"version\": 1", "\"version\": 9");
        assert!(load_network::<f64>(&text).is_err());
        let text = save_network(&net).replace("\"layer_sizes\": [\n    3", "\"layer_sizes\": [\n    5");
        assert!(matches!(load_network::<f64>(&text), Err(Error::Persistence(_))));
    }
}
