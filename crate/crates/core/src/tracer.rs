//! Field-line integration with section and u-line return detection.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fields::{FieldModel, Rhs, State};
use crate::ode::{Segment, Stepper, Tolerances};
use crate::roots::brent;

/// Dense-output samples per accepted step used to bracket crossings.
const SUBSAMPLES: usize = 4;
const EVENT_TIME_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct TraceSpec<'a> {
    pub field: &'a dyn FieldModel,
    pub rhs: Rhs,
    pub x0: [f64; 3],
    pub tol: Tolerances,
    pub max_time: f64,
    /// Hard cap on the number of candidate events examined.
    pub max_crossings: usize,
}

impl<'a> TraceSpec<'a> {
    /// Default tolerances, and a timeout of 100 reference periods.
    pub fn new(field: &'a dyn FieldModel, rhs: Rhs, x0: [f64; 3]) -> Self {
        TraceSpec {
            field,
            rhs,
            x0,
            tol: Tolerances::default(),
            max_time: 100.0 * field.reference_period(rhs),
            max_crossings: 10_000,
        }
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_time(mut self, max_time: f64) -> Self {
        self.max_time = max_time;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_time > 0.0) {
            return Err(Error::InvalidParameter {
                name: "max_time",
                reason: format!("must be positive, got {}", self.max_time),
            });
        }
        if !self.field.in_domain(&self.x0) {
            return Err(Error::Domain {
                what: "start point",
                value: self.x0[0],
            });
        }
        Ok(())
    }

    fn start_state(&self) -> State {
        [self.x0[0], self.x0[1], self.x0[2], 0.0]
    }

    fn stepper(&self) -> Result<Stepper<4, impl Fn(&State) -> State + 'a>> {
        self.validate()?;
        let field = self.field;
        let rhs = self.rhs;
        Stepper::new(
            move |y: &State| field.state_rhs(rhs, y),
            0.0,
            self.start_state(),
            self.tol,
        )
    }
}

/// Piecewise dense trajectory.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    segments: Vec<Segment<4>>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t1)
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// State at `t`, clamped to the traced interval.
    pub fn state(&self, t: f64) -> State {
        let i = self.segments.partition_point(|s| s.t1 < t).min(self.segments.len() - 1);
        let s = &self.segments[i];
        s.eval(t.clamp(s.t0, s.t1))
    }

    pub fn point(&self, t: f64) -> [f64; 3] {
        let y = self.state(t);
        [y[0], y[1], y[2]]
    }

    /// Accepted step end points, starting with the initial state.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, State)> + '_ {
        let first = self.segments.first().map(|s| (s.t0, s.y0));
        first.into_iter().chain(self.segments.iter().map(|s| (s.t1, s.y1)))
    }

    fn push(&mut self, s: Segment<4>) {
        self.segments.push(s);
    }
}

/// Integrate from `spec.x0` up to time `t_end`.
pub fn trace(spec: &TraceSpec, t_end: f64) -> Result<Trajectory> {
    let mut st = spec.stepper()?;
    let mut traj = Trajectory::default();
    while st.t() < t_end {
        let seg = st.step(t_end)?;
        check_domain(spec, &seg)?;
        traj.push(seg);
    }
    Ok(traj)
}

fn check_domain(spec: &TraceSpec, seg: &Segment<4>) -> Result<()> {
    let y = seg.y1;
    if spec.field.in_domain(&[y[0], y[1], y[2]]) {
        Ok(())
    } else {
        Err(Error::StepFailure {
            t: seg.t1,
            reason: "trajectory left the model domain".into(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    pub t: f64,
    pub point: [f64; 3],
    pub state: State,
    /// 1-based count among all candidate events of the search.
    pub index: usize,
    /// False for an apparent u-line return that lands on a different point.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    /// Advance of the toroidal angle by 2π.
    ToroidalPlane,
    /// Advance of the unwrapped poloidal angle about the magnetic axis by 2π.
    PoloidalAngle,
}

enum Scan {
    Stopped,
    TimedOut,
}

/// Walk the trajectory in dense sub-intervals and report every crossing of
/// a level `2πk` by `value` to `on_cross(segment, t, level)`, which returns
/// true to stop. With `skip_start` the initial sub-interval is not examined,
/// so a start exactly on a level is not reported. With `monotone` a
/// decreasing value is an error.
fn scan_levels<V, C>(
    spec: &TraceSpec,
    value: V,
    mut on_cross: C,
    traj: &mut Trajectory,
    skip_start: bool,
    monotone: bool,
) -> Result<Scan>
where
    V: Fn(&State) -> f64,
    C: FnMut(&Segment<4>, f64, f64) -> Result<bool>,
{
    let mut st = spec.stepper()?;
    let y0 = st.y();
    let mut prev = if skip_start { None } else { Some((0.0, value(&y0))) };
    let mut examined = 0usize;
    while st.t() < spec.max_time {
        let seg = st.step(spec.max_time)?;
        check_domain(spec, &seg)?;
        traj.push(seg);
        for k in 1..=SUBSAMPLES {
            let tb = if k == SUBSAMPLES {
                seg.t1
            } else {
                seg.t0 + (seg.t1 - seg.t0) * k as f64 / SUBSAMPLES as f64
            };
            let vb = value(&seg.eval(tb));
            let Some((ta, va)) = prev else {
                prev = Some((tb, vb));
                continue;
            };
            prev = Some((tb, vb));
            if monotone && vb < va - 1e-9 * (1.0 + va.abs()) {
                return Err(Error::NonMonotoneSection { t: tb });
            }
            let ka = (va / TAU).floor() as i64;
            let kb = (vb / TAU).floor() as i64;
            if ka == kb {
                continue;
            }
            let levels: Vec<i64> = if kb > ka {
                (ka + 1..=kb).collect()
            } else {
                (kb + 1..=ka).rev().collect()
            };
            for lv in levels {
                let level = lv as f64 * TAU;
                let t = brent(|t| value(&seg.eval(t)) - level, ta, tb, EVENT_TIME_TOL, 200).unwrap_or(0.5 * (ta + tb));
                examined += 1;
                if on_cross(&seg, t, level)? {
                    return Ok(Scan::Stopped);
                }
                if examined >= spec.max_crossings {
                    return Err(Error::MaxTime {
                        max_time: spec.max_time,
                        found: examined,
                        wanted: examined + 1,
                    });
                }
            }
        }
    }
    Ok(Scan::TimedOut)
}

fn event(seg: &Segment<4>, t: f64, index: usize, valid: bool) -> CrossingEvent {
    let state = seg.eval(t);
    CrossingEvent {
        t,
        point: [state[0], state[1], state[2]],
        state,
        index,
        valid,
    }
}

/// The first `count` returns to the section through the start point.
pub fn return_to_section(spec: &TraceSpec, section: Section, count: usize) -> Result<Vec<CrossingEvent>> {
    Ok(section_returns(spec, section, count)?.0)
}

/// Like [`return_to_section`], also returning the trajectory up to the last
/// event.
pub fn section_returns(spec: &TraceSpec, section: Section, count: usize) -> Result<(Vec<CrossingEvent>, Trajectory)> {
    let field = spec.field;
    let start = spec.start_state();
    let w = field.state_rhs(spec.rhs, &start);
    let idx = match section {
        Section::ToroidalPlane => field.toroidal_index(),
        Section::PoloidalAngle => 3,
    };
    let dir = if w[idx] < 0.0 { -1.0 } else { 1.0 };
    if w[idx] == 0.0 {
        return Err(Error::NonMonotoneSection { t: 0.0 });
    }
    let x0 = start[idx];
    let mut events = Vec::with_capacity(count);
    let mut traj = Trajectory::default();
    if count == 0 {
        return Ok((events, traj));
    }
    let outcome = scan_levels(
        spec,
        |y| dir * (y[idx] - x0),
        |seg, t, _| {
            events.push(event(seg, t, events.len() + 1, true));
            Ok(events.len() >= count)
        },
        &mut traj,
        false,
        true,
    )?;
    match outcome {
        Scan::Stopped => Ok((events, traj)),
        Scan::TimedOut => Err(Error::MaxTime {
            max_time: spec.max_time,
            found: events.len(),
            wanted: count,
        }),
    }
}

/// How apparent u-line returns are accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlineSearch {
    /// Accept only candidates that land back on the start u-line.
    pub validate: bool,
    /// Transverse match tolerance; default `1e-6·max(1, |x0[0]|)`.
    pub match_tol: Option<f64>,
}

impl Default for UlineSearch {
    fn default() -> Self {
        UlineSearch {
            validate: true,
            match_tol: None,
        }
    }
}

impl UlineSearch {
    /// Plain candidate counting, as if every apparent crossing were real.
    pub fn counting() -> Self {
        UlineSearch {
            validate: false,
            match_tol: None,
        }
    }
}

/// Result of a u-line return search.
#[derive(Debug, Clone)]
pub struct UlineReturns {
    /// All candidates examined, in time order.
    pub candidates: Vec<CrossingEvent>,
    pub trajectory: Trajectory,
}

impl UlineReturns {
    pub fn valid(&self) -> impl Iterator<Item = &CrossingEvent> {
        self.candidates.iter().filter(|e| e.valid)
    }
}

/// Search for returns to the u-line through the start point until `wanted`
/// accepted events are found: valid ones when validating, otherwise any
/// candidate.
pub fn uline_returns(spec: &TraceSpec, search: UlineSearch, wanted: usize) -> Result<UlineReturns> {
    if spec.rhs == Rhs::U {
        return Err(Error::Unsupported("u-line returns along u itself".into()));
    }
    let field = spec.field;
    let start = spec.start_state();
    let tol = search.match_tol.unwrap_or(1e-6 * spec.x0[0].abs().max(1.0));
    let mut candidates = Vec::new();
    let mut accepted = 0usize;
    let mut traj = Trajectory::default();
    if wanted == 0 {
        return Ok(UlineReturns {
            candidates,
            trajectory: traj,
        });
    }
    let outcome = scan_levels(
        spec,
        |y| field.uline_phase(y, &start),
        |seg, t, _| {
            let mut ev = event(seg, t, candidates.len() + 1, true);
            ev.valid = field.uline_mismatch(&ev.point, &spec.x0) <= tol;
            if ev.valid || !search.validate {
                accepted += 1;
            }
            candidates.push(ev);
            Ok(accepted >= wanted)
        },
        &mut traj,
        true,
        false,
    )?;
    match outcome {
        Scan::Stopped => Ok(UlineReturns {
            candidates,
            trajectory: traj,
        }),
        Scan::TimedOut => Err(Error::MaxTime {
            max_time: spec.max_time,
            found: accepted,
            wanted,
        }),
    }
}

/// The `count`-th accepted return to the u-line through the start point.
pub fn return_to_uline(spec: &TraceSpec, count: usize, search: UlineSearch) -> Result<CrossingEvent> {
    let r = uline_returns(spec, search, count.max(1))?;
    let ev = if search.validate {
        r.valid().nth(count.max(1) - 1)
    } else {
        r.candidates.get(count.max(1) - 1)
    };
    Ok(*ev.expect("search stops once enough events are accepted"))
}
