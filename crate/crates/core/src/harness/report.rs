use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Comparison a measurement must satisfy against its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Self::Le => value <= bound,
            Self::Lt => value < bound,
            Self::Ge => value >= bound,
            Self::Gt => value > bound,
        }
    }
}

/// Non-finite values are written as the strings `"inf"`, `"-inf"`, `"nan"`.
mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad number {other:?}"))),
            },
        }
    }

    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct W(#[serde(deserialize_with = "super::deserialize")] f64);
            Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    #[serde(with = "ext_f64")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_f64::opt")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    /// A failed precondition rejects the item instead of failing it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub precondition: bool,
}

impl Measurement {
    pub fn satisfied(&self) -> bool {
        match (self.bound, self.relation) {
            (Some(b), Some(r)) => r.holds(self.value, b),
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub id: String,
    pub corpus: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub measurements: Vec<Measurement>,
    pub verdict: Verdict,
    pub caveats: Vec<String>,
    /// Name of the measurement quoted in the aggregate CSV.
    pub key_metric: String,
}

impl Report {
    pub fn new(id: &str, corpus: &str) -> Self {
        Self {
            id: id.to_string(),
            corpus: corpus.to_string(),
            params: serde_json::Map::new(),
            measurements: Vec::new(),
            verdict: Verdict::Pass,
            caveats: Vec::new(),
            key_metric: String::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(name.to_string(), v);
        self
    }

    /// Unbounded measurement, recorded for information.
    pub fn record(&mut self, name: &str, value: f64) -> &mut Self {
        self.measurements.push(Measurement {
            name: name.to_string(),
            value,
            bound: None,
            relation: None,
            precondition: false,
        });
        self
    }

    pub fn check(&mut self, name: &str, value: f64, relation: Relation, bound: f64) -> &mut Self {
        self.measurements.push(Measurement {
            name: name.to_string(),
            value,
            bound: Some(bound),
            relation: Some(relation),
            precondition: false,
        });
        self
    }

    pub fn require(&mut self, name: &str, value: f64, relation: Relation, bound: f64) -> &mut Self {
        self.check(name, value, relation, bound);
        self.measurements.last_mut().expect("just pushed").precondition = true;
        self
    }

    pub fn caveat(&mut self, text: impl Into<String>) -> &mut Self {
        self.caveats.push(text.into());
        self
    }

    pub fn key(&mut self, name: &str) -> &mut Self {
        self.key_metric = name.to_string();
        self
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// Verdict implied by the bounded measurements alone.
    pub fn derive_verdict(&self) -> Verdict {
        if self.measurements.iter().any(|m| m.precondition && !m.satisfied()) {
            Verdict::Rejected
        } else if self.measurements.iter().all(Measurement::satisfied) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn finish(mut self) -> Self {
        self.verdict = self.derive_verdict();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn key_value(&self) -> f64 {
        self.measurement(&self.key_metric).unwrap_or(f64::NAN)
    }
}

/// CSV `experiment,corpus_item,verdict,key_metric`.
pub fn aggregate_csv(reports: &[Report]) -> String {
    let mut out = String::from("experiment,corpus_item,verdict,key_metric\n");
    for r in reports {
        let v = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Rejected => "rejected",
        };
        let _ = writeln!(out, "{},{},{},{:?}", r.id, r.corpus, v, r.key_value());
    }
    out
}
