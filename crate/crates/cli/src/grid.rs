use std::str::FromStr;

use cheshire_core::dsl::parse_angle;
use cheshire_core::scenarios::linspace;

/// `start:stop:count`, both endpoints included; `count = 1` keeps `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("grid `{s}` is not of the form start:stop:count"));
        };
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("grid count `{count}` is not a positive integer"))?;
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        Ok(GridSpec {
            start: parse_angle(start)?,
            stop: parse_angle(stop)?,
            count,
        })
    }
}
