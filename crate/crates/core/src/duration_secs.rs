//! Serialize `std::time::Duration` as a plain f64 second count, which is
//! what the CSV/JSON consumers downstream expect to read.

use serde::{Deserialize, Deserializer, Serializer};
use std::time::Duration;

pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
    let secs = f64::deserialize(d)?;
    if !(secs.is_finite() && secs >= 0.0) {
        return Err(serde::de::Error::custom("duration must be a non-negative number of seconds"));
    }
    Ok(Duration::from_secs_f64(secs))
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};
    use std::time::Duration;

    #[derive(Serialize, Deserialize)]
    struct Wrap {
        #[serde(with = "super")]
        t: Duration,
    }

    #[test]
    fn round_trips_as_seconds() {
        let json = serde_json::to_string(&Wrap {
            t: Duration::from_millis(1500),
        })
        .unwrap();
        assert_eq!(json, r#"{"t":1.5}"#);
        let back: Wrap = serde_json::from_str(&json).unwrap();
        assert_eq!(back.t, Duration::from_millis(1500));
        assert!(serde_json::from_str::<Wrap>(r#"{"t":-1.0}"#).is_err());
    }
}
