//! Linear decay schedules, constant after the decay span.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSchedule {
    pub start: f64,
    pub end: f64,
    /// Number of units (episodes) the decay spans; 0 means constant `end`... or
    /// rather constant `start` == `end` use. A zero span yields `end` immediately.
    pub span: u64,
}

impl LinearSchedule {
    pub fn new(start: f64, end: f64, span: u64) -> LinearSchedule {
        LinearSchedule { start, end, span }
    }

    pub fn constant(value: f64) -> LinearSchedule {
        LinearSchedule {
            start: value,
            end: value,
            span: 0,
        }
    }

    /// Value after `t` units; interpolates linearly and clamps at the end.
    pub fn value(&self, t: u64) -> f64 {
        if self.span == 0 || t >= self.span {
            return self.end;
        }
        let frac = t as f64 / self.span as f64;
        self.start + (self.end - self.start) * frac
    }
}
