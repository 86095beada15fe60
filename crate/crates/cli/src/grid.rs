//! Gain-grid parsing for `sweep`: each `--grid` flag contributes one
//! axis (`name=start:step:end` inclusive, or `name=value`), and the grid
//! is their cartesian product in lexicographic order (first axis
//! slowest).

use aclbeam::model::FeedbackGains;
use aclbeam::{CoreError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainAxis {
    S1,
    S3,
    K1,
    K2,
}

impl GainAxis {
    fn parse(name: &str) -> Result<Self, CoreError> {
        match name {
            "s1" => Ok(GainAxis::S1),
            "s3" => Ok(GainAxis::S3),
            "k1" => Ok(GainAxis::K1),
            "k2" => Ok(GainAxis::K2),
            other => Err(CoreError::InvalidArgument(format!(
                "unknown gain axis '{other}' (expected s1, s3, k1, or k2)"
            ))),
        }
    }

    fn apply(self, gains: &mut FeedbackGains, value: f64) {
        match self {
            GainAxis::S1 => gains.s1 = value,
            GainAxis::S3 => gains.s3 = value,
            GainAxis::K1 => gains.k1 = value,
            GainAxis::K2 => gains.k2 = value,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub axis: GainAxis,
    pub values: Vec<f64>,
}

pub fn parse_axis(spec: &str) -> Result<Axis, CoreError> {
    let (name, rest) = spec.split_once('=').ok_or_else(|| {
        CoreError::InvalidArgument(format!("grid axis '{spec}' must look like name=a:step:b"))
    })?;
    let axis = GainAxis::parse(name.trim())?;
    let parts: Vec<&str> = rest.split(':').collect();
    let parse_num = |s: &str| -> Result<f64, CoreError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CoreError::InvalidArgument(format!("bad number '{s}' in grid '{spec}'")))
    };
    let values = match parts.as_slice() {
        [single] => vec![parse_num(single)?],
        [start, step, end] => {
            let (start, step, end) = (parse_num(start)?, parse_num(step)?, parse_num(end)?);
            if !(step > 0.0) {
                return Err(CoreError::InvalidArgument(format!(
                    "grid step must be positive in '{spec}'"
                )));
            }
            if end < start {
                return Err(CoreError::InvalidArgument(format!(
                    "grid end below start in '{spec}'"
                )));
            }
            let count = ((end - start) / step).round() as usize;
            (0..=count).map(|i| start + i as f64 * step).collect()
        }
        _ => {
            return Err(CoreError::InvalidArgument(format!(
                "grid axis '{spec}' must be `name=value` or `name=start:step:end`"
            )))
        }
    };
    for v in &values {
        if *v < 0.0 {
            return Err(CoreError::Validation(vec![Violation {
                field: format!("grid.{name}"),
                reason: format!("gains must be nonnegative (got {v})"),
            }]));
        }
    }
    Ok(Axis { axis, values })
}

/// All grid points in lexicographic order, as gain overrides on `base`.
pub fn grid_points(axes: &[Axis], base: &FeedbackGains) -> Vec<FeedbackGains> {
    let mut points = vec![*base];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for point in &points {
            for &v in &axis.values {
                let mut gains = *point;
                axis.axis.apply(&mut gains, v);
                next.push(gains);
            }
        }
        points = next;
    }
    points
}
