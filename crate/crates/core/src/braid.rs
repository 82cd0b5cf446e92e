//! Pure braid words, their realisation as point motions, and the invariant.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delaunay::{build_delaunay, FlipEvent, OrderedBasis, Triangle, Triangulation};
use crate::error::{BraidError, WordError};
use crate::flip::{flip_matrix_for_event, FlipMatrix, FlipRecord, LabelMap};
use crate::geometry::{orient2d, validate_general_position, Configuration, LabeledPoint, Point};
use crate::kinetics::{
    configuration_at, extract_flip_sequence, ExtractOptions, FlipSequence, Trajectory, TrajectorySet,
};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Point index of strand `k`; indices 1..=3 are the boundary vertices.
pub fn strand_point(strand: usize) -> usize {
    strand + 3
}

/// `b(i,j)` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub i: usize,
    pub j: usize,
    pub power: i8,
}

impl Letter {
    pub fn new(i: usize, j: usize, power: i8) -> Self {
        assert!(i < j, "generator b({i},{j}) needs i < j");
        assert!(power == 1 || power == -1, "power must be +1 or -1");
        Letter { i, j, power }
    }

    pub fn generator(i: usize, j: usize) -> Self {
        Letter::new(i, j, 1)
    }

    pub fn inverse(self) -> Self {
        Letter {
            power: -self.power,
            ..self
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b({},{})", self.i, self.j)?;
        if self.power < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A word in the generators `b(i,j)`, `1 <= i < j <= n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    pub n: usize,
    pub letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<Letter>) -> Self {
        BraidWord { n, letters }
    }

    pub fn empty(n: usize) -> Self {
        BraidWord::new(n, Vec::new())
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord::new(self.n, self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend(&other.letters);
        BraidWord::new(self.n.max(other.n), letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parses whitespace-separated `b(i,j)` / `b(i,j)^-1` tokens. Positions in
/// errors are 1-based token numbers.
pub fn parse_word(text: &str, n: usize) -> Result<BraidWord, WordError> {
    let mut letters = Vec::new();
    for (pos, token) in text.split_whitespace().enumerate() {
        let position = pos + 1;
        let malformed = || WordError::Malformed {
            position,
            token: token.to_string(),
        };
        let (body, power) = match token.strip_suffix("^-1") {
            Some(body) => (body, -1),
            None => (token, 1),
        };
        let inner = body
            .strip_prefix("b(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(malformed)?;
        let (a, b) = inner.split_once(',').ok_or_else(malformed)?;
        let i: usize = a.trim().parse().map_err(|_| malformed())?;
        let j: usize = b.trim().parse().map_err(|_| malformed())?;
        if i == 0 || j == 0 {
            return Err(malformed());
        }
        if i >= j {
            return Err(WordError::Order {
                position,
                token: token.to_string(),
            });
        }
        if j > n {
            return Err(WordError::OutOfRange {
                position,
                token: token.to_string(),
                n,
            });
        }
        letters.push(Letter { i, j, power });
    }
    Ok(BraidWord { n, letters })
}

/// Shape of the loop traced by a moving strand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopShape {
    /// Height of the upper pass.
    pub height: Rational,
    /// Depth of the lower pass below the strand line.
    pub depth: Rational,
    /// Half-width of the detour around the target strand.
    pub margin: Rational,
}

impl Default for LoopShape {
    fn default() -> Self {
        LoopShape {
            height: Rational::one(),
            depth: Rational::new(1, 2),
            margin: Rational::new(1, 4),
        }
    }
}

/// Home positions of the strands inside the boundary triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalSetup {
    pub n: usize,
    pub config: Configuration,
}

impl CanonicalSetup {
    pub fn home(&self, strand: usize) -> Point {
        self.config
            .point(strand_point(strand))
            .expect("strand in range")
            .position()
    }

    pub fn labels(&self) -> LabelMap {
        LabelMap::from_config(&self.config)
    }

    pub fn basis_size(&self) -> usize {
        2 * self.n + 1
    }
}

/// Boundary vertices at `(-(n+4), -2)`, `(2n+5, -2)`, `((n+1)/2, 3n+9)`;
/// strand `k` at `(k, k^2 / (100 n^2))`; labels `zeta_m = m`. Works for any
/// `n`, including the boundary-only `n = 0`.
pub fn canonical_configuration(n: usize) -> Result<Configuration, BraidError> {
    let ni = n as i64;
    let boundary = [
        Point::new(Rational::from(-(ni + 4)), Rational::from(-2)),
        Point::new(Rational::from(2 * ni + 5), Rational::from(-2)),
        Point::new(Rational::new(ni + 1, 2), Rational::from(3 * ni + 9)),
    ];
    let scale = 100 * ni.max(1) * ni.max(1);
    for attempt in 0..8i64 {
        let mut points: Vec<LabeledPoint> = boundary
            .iter()
            .enumerate()
            .map(|(k, p)| LabeledPoint::new(k + 1, p.clone(), Rational::from(k as i64 + 1)))
            .collect();
        for k in 1..=ni {
            // deterministic nudge on retries
            let y = &Rational::new(k * k, scale) + &Rational::new(attempt * k, 7 * scale);
            let index = strand_point(k as usize);
            points.push(LabeledPoint::new(
                index,
                Point::new(Rational::from(k), y),
                Rational::from(index as i64),
            ));
        }
        let config = Configuration::new(points, [1, 2, 3]).map_err(|_| BraidError::Placement(n))?;
        if validate_general_position(&config).is_ok() {
            return Ok(config);
        }
    }
    Err(BraidError::Placement(n))
}

pub fn canonical_setup(n: usize) -> Result<CanonicalSetup, BraidError> {
    if n == 0 {
        return Err(BraidError::EmptySetup);
    }
    Ok(CanonicalSetup {
        n,
        config: canonical_configuration(n)?,
    })
}

/// Closed path of strand `i` around the home of strand `j`: up to the upper
/// pass, right past `j`, down its right side, under it, up its left side,
/// back left and down home.
pub fn loop_waypoints(setup: &CanonicalSetup, i: usize, j: usize, shape: &LoopShape) -> Vec<Point> {
    let home = setup.home(i);
    let target = setup.home(j);
    let top = shape.height.clone();
    let bottom = -&shape.depth;
    let right = &target.x + &shape.margin;
    let left = &target.x - &shape.margin;
    vec![
        home.clone(),
        Point::new(home.x.clone(), top.clone()),
        Point::new(right.clone(), top.clone()),
        Point::new(right, bottom.clone()),
        Point::new(left.clone(), bottom),
        Point::new(left, top.clone()),
        Point::new(home.x.clone(), top),
        home,
    ]
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient2d(a, b, p) == 0
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Winding number of a closed polygon around `p` (crossing count with sign).
pub fn winding_number(polygon: &[Point], p: &Point) -> i32 {
    let mut w = 0;
    for e in polygon.windows(2) {
        let (a, b) = (&e[0], &e[1]);
        if a.y <= p.y {
            if b.y > p.y && orient2d(a, b, p) > 0 {
                w += 1;
            }
        } else if b.y <= p.y && orient2d(a, b, p) < 0 {
            w -= 1;
        }
    }
    w
}

/// Motion realising one letter: only strand `i` moves.
pub fn generator_trajectories(
    setup: &CanonicalSetup,
    letter: Letter,
    shape: &LoopShape,
) -> Result<TrajectorySet, BraidError> {
    let Letter { i, j, power } = letter;
    for s in [i, j] {
        if s == 0 || s > setup.n {
            return Err(BraidError::StrandOutOfRange(s));
        }
    }
    let path = loop_waypoints(setup, i, j, shape);
    let mover = strand_point(i);
    for other in setup.config.points() {
        if other.index == mover {
            continue;
        }
        let p = other.position();
        let touches = path.windows(2).any(|w| on_segment(&p, &w[0], &w[1]));
        let expected = if other.index == strand_point(j) { 1 } else { 0 };
        if touches || winding_number(&path, &p).abs() != expected {
            return Err(BraidError::LoopClearance {
                i,
                j,
                blocker: other.index,
            });
        }
    }
    let mut trajectories: Vec<Trajectory> = setup
        .config
        .points()
        .iter()
        .filter(|p| p.index != mover)
        .map(|p| Trajectory::constant(p.index, p.position()))
        .collect();
    let moving = Trajectory::through_waypoints(mover, &path)?;
    trajectories.push(if power > 0 { moving } else { moving.reversed() });
    Ok(TrajectorySet::new(setup.config.clone(), trajectories)?)
}

/// How inverse letters are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMode {
    /// Simulate the loop traversed backwards.
    #[default]
    Reverse,
    /// Invert the matrix of the forward loop.
    MatrixInverse,
}

/// Flips and matrix of a single letter.
#[derive(Debug, Clone)]
pub struct LetterResult {
    pub letter: Letter,
    pub sequence: Option<FlipSequence>,
    pub flip_matrices: Vec<FlipMatrix>,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub word: BraidWord,
    pub matrix: RationalMatrix,
    pub basis: OrderedBasis,
    pub letters: Vec<LetterResult>,
}

impl InvariantResult {
    pub fn trace(&self) -> Rational {
        self.matrix.trace().expect("square")
    }

    pub fn char_poly(&self) -> Vec<Rational> {
        self.matrix.char_poly().expect("square")
    }

    /// Every flip matrix produced for this word, in time order.
    pub fn flip_matrices(&self) -> impl Iterator<Item = &FlipMatrix> {
        self.letters.iter().flat_map(|l| l.flip_matrices.iter())
    }

    pub fn to_json(&self, with_trace: bool, with_charpoly: bool) -> InvariantJson {
        InvariantJson {
            n: self.word.n,
            word: self.word.to_string(),
            matrix: self.matrix.clone(),
            basis: self.basis.triangles().to_vec(),
            trace: with_trace.then(|| self.trace()),
            charpoly: with_charpoly.then(|| self.char_poly()),
            flips: self
                .letters
                .iter()
                .map(|l| {
                    l.sequence
                        .as_ref()
                        .map(|s| s.events.iter().map(FlipRecord::from).collect())
                        .unwrap_or_default()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantJson {
    pub n: usize,
    pub word: String,
    pub matrix: RationalMatrix,
    pub basis: Vec<Triangle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charpoly: Option<Vec<Rational>>,
    /// Flip records per letter.
    pub flips: Vec<Vec<FlipRecord>>,
}

/// Computes invariants for one strand count, caching per-letter results.
#[derive(Debug, Clone)]
pub struct BraidEngine {
    setup: CanonicalSetup,
    shape: LoopShape,
    options: ExtractOptions,
    inverse_mode: InverseMode,
    basis: OrderedBasis,
    cache: HashMap<Letter, LetterResult>,
}

impl BraidEngine {
    pub fn new(n: usize) -> Result<Self, BraidError> {
        Self::with_options(n, LoopShape::default(), ExtractOptions::default())
    }

    pub fn with_options(n: usize, shape: LoopShape, options: ExtractOptions) -> Result<Self, BraidError> {
        let setup = canonical_setup(n)?;
        let basis = build_delaunay(&setup.config)?.ordered_basis();
        Ok(BraidEngine {
            setup,
            shape,
            options,
            inverse_mode: InverseMode::default(),
            basis,
            cache: HashMap::new(),
        })
    }

    pub fn set_inverse_mode(&mut self, mode: InverseMode) {
        if mode != self.inverse_mode {
            self.inverse_mode = mode;
            self.cache.retain(|l, _| l.power > 0);
        }
    }

    pub fn setup(&self) -> &CanonicalSetup {
        &self.setup
    }

    pub fn basis(&self) -> &OrderedBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.setup.n
    }

    pub fn trajectories(&self, letter: Letter) -> Result<TrajectorySet, BraidError> {
        generator_trajectories(&self.setup, letter, &self.shape)
    }

    pub fn letter(&mut self, letter: Letter) -> Result<&LetterResult, BraidError> {
        if !self.cache.contains_key(&letter) {
            let result = self.compute_letter(letter)?;
            self.cache.insert(letter, result);
        }
        Ok(&self.cache[&letter])
    }

    fn compute_letter(&mut self, letter: Letter) -> Result<LetterResult, BraidError> {
        if letter.power < 0 && self.inverse_mode == InverseMode::MatrixInverse {
            let forward = self.letter(letter.inverse())?.matrix.clone();
            return Ok(LetterResult {
                letter,
                sequence: None,
                flip_matrices: Vec::new(),
                matrix: forward.inverse()?,
            });
        }
        let ts = self.trajectories(letter)?;
        let sequence = extract_flip_sequence(&ts, &self.options)?;
        debug_assert_eq!(sequence.initial_basis(), self.basis);
        let labels = self.setup.labels();
        let mut basis = sequence.initial_basis();
        let mut flip_matrices = Vec::with_capacity(sequence.len());
        let mut matrix = RationalMatrix::identity(basis.len());
        for ev in &sequence.events {
            let fm = flip_matrix_for_event(ev, &basis, &labels)?;
            matrix = fm.matrix.mul(&matrix)?;
            basis = fm.to_basis.clone();
            flip_matrices.push(fm);
        }
        debug_assert_eq!(basis, self.basis, "closed loop must return to the home triangulation");
        Ok(LetterResult {
            letter,
            sequence: Some(sequence),
            flip_matrices,
            matrix,
        })
    }

    /// Matrix of the word: letters act left to right in time, so the matrix
    /// of a later letter multiplies on the left.
    pub fn invariant(&mut self, word: &BraidWord) -> Result<InvariantResult, BraidError> {
        if word.n > self.setup.n {
            return Err(BraidError::StrandOutOfRange(word.n));
        }
        let mut matrix = RationalMatrix::identity(self.basis.len());
        let mut letters = Vec::with_capacity(word.letters.len());
        for &letter in &word.letters {
            let result = self.letter(letter)?.clone();
            matrix = result.matrix.mul(&matrix)?;
            letters.push(result);
        }
        Ok(InvariantResult {
            word: BraidWord::new(self.setup.n, word.letters.clone()),
            matrix,
            basis: self.basis.clone(),
            letters,
        })
    }

    fn letter_sequence(&mut self, letter: Letter) -> Result<(TrajectorySet, FlipSequence), BraidError> {
        let ts = self.trajectories(letter)?;
        let cached = self.letter(letter)?.sequence.clone();
        let sequence = match cached {
            Some(s) => s,
            None => extract_flip_sequence(&ts, &self.options)?,
        };
        Ok((ts, sequence))
    }

    /// Flips of the whole word on one clock: letter `k` of `L` occupies
    /// `[k/L, (k+1)/L]`.
    pub fn word_events(&mut self, word: &BraidWord) -> Result<Vec<FlipEvent>, BraidError> {
        let count = word.letters.len() as i64;
        let mut out = Vec::new();
        for (k, &letter) in word.letters.iter().enumerate() {
            let (_, sequence) = self.letter_sequence(letter)?;
            let offset = Rational::from(k as i64);
            let rescale = |t: &Rational| (&offset + t) / Rational::from(count);
            for ev in sequence.events {
                let ev = match &ev.time_bracket {
                    Some((lo, hi)) => {
                        let (lo, hi) = (rescale(lo), rescale(hi));
                        ev.clone().with_bracket(lo, hi)
                    }
                    None => ev,
                };
                out.push(ev);
            }
        }
        Ok(out)
    }

    /// Triangulation before the first flip and after each flip of the word,
    /// each drawn at a time strictly between consecutive events.
    pub fn snapshots(&mut self, word: &BraidWord) -> Result<Vec<Triangulation>, BraidError> {
        let mut out = vec![build_delaunay(&self.setup.config)?];
        for &letter in &word.letters {
            let (ts, sequence) = self.letter_sequence(letter)?;
            let events = &sequence.events;
            for s in 1..=events.len() {
                let lo = events[s - 1]
                    .time_bracket
                    .as_ref()
                    .map(|b| b.1.clone())
                    .unwrap_or_else(Rational::zero);
                let hi = events
                    .get(s)
                    .and_then(|e| e.time_bracket.as_ref())
                    .map(|b| b.0.clone())
                    .unwrap_or_else(Rational::one);
                let mid = (lo + hi) / Rational::from(2);
                out.push(build_delaunay(&configuration_at(&ts, &mid)?)?);
            }
        }
        Ok(out)
    }

    /// Matrix only, for relation checks.
    pub fn word_matrix(&mut self, letters: &[Letter]) -> Result<RationalMatrix, BraidError> {
        let mut matrix = RationalMatrix::identity(self.basis.len());
        for &letter in letters {
            matrix = self.letter(letter)?.matrix.mul(&matrix)?;
        }
        Ok(matrix)
    }
}

/// `f_n(word)` with the default loop shape and sampling.
pub fn invariant(word: &BraidWord) -> Result<InvariantResult, BraidError> {
    BraidEngine::new(word.n)?.invariant(word)
}

/// Families of identities checked by [`verify_relations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationFamily {
    /// `f(b b^-1) = f(b^-1 b) = I` for every generator.
    Inverse,
    /// Flips in quadrilaterals sharing at most two points commute.
    FarComm,
    /// The five-flip pentagon cycle composes to the identity.
    Pentagon,
    /// Every instance of the pure braid presentation.
    PbAll,
}

impl RelationFamily {
    pub fn name(self) -> &'static str {
        match self {
            RelationFamily::Inverse => "inverse",
            RelationFamily::FarComm => "far_comm",
            RelationFamily::Pentagon => "pentagon",
            RelationFamily::PbAll => "pb_all",
        }
    }

    pub fn all() -> [RelationFamily; 4] {
        [
            RelationFamily::Inverse,
            RelationFamily::FarComm,
            RelationFamily::Pentagon,
            RelationFamily::PbAll,
        ]
    }
}

impl std::str::FromStr for RelationFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationFamily::all()
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown relation family {s:?}; expected inverse, far_comm, pentagon or pb_all"))
    }
}

/// Outcome of one relation instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub family: &'static str,
    pub instance: String,
    pub passed: bool,
    /// Both sides of a failed equality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<(RationalMatrix, RationalMatrix)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceReport {
    fn compare(family: RelationFamily, instance: String, left: RationalMatrix, right: RationalMatrix) -> Self {
        let passed = left == right;
        InstanceReport {
            family: family.name(),
            instance,
            passed,
            mismatch: (!passed).then_some((left, right)),
            error: None,
        }
    }

    fn failed(family: RelationFamily, instance: String, error: String) -> Self {
        InstanceReport {
            family: family.name(),
            instance,
            passed: false,
            mismatch: None,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RelationReport {
    pub instances: Vec<InstanceReport>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.instances.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceReport> {
        self.instances.iter().filter(|r| !r.passed)
    }
}

/// Knobs for [`verify_relations`].
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws for the label-level families.
    pub trials: usize,
    /// Cap on presentation instances per relation type; `None` checks all.
    pub max_instances: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            trials: 100,
            max_instances: None,
        }
    }
}

/// A named pair of words whose matrices must agree.
pub type RelationInstance = (String, Vec<Letter>, Vec<Letter>);

/// Instances of the three presentation relations at `n`, as pairs of words
/// that must have equal matrices. Relation 2 contributes two pairs per triple.
pub fn presentation_instances(n: usize) -> Vec<RelationInstance> {
    let g = Letter::generator;
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            if (k < l && l < i && i < j) || (i < k && k < l && l < j) {
                out.push((
                    format!("rel1 b({i},{j}) b({k},{l}) = b({k},{l}) b({i},{j})"),
                    vec![g(i, j), g(k, l)],
                    vec![g(k, l), g(i, j)],
                ));
            }
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let a = vec![g(i, j), g(i, k), g(j, k)];
                let b = vec![g(j, k), g(i, j), g(i, k)];
                let c = vec![g(i, k), g(j, k), g(i, j)];
                out.push((format!("rel2 ({i},{j},{k}) first = second"), a.clone(), b));
                out.push((format!("rel2 ({i},{j},{k}) first = third"), a, c));
            }
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    out.push((
                        format!("rel3 ({i},{j},{k},{l})"),
                        vec![g(j, l), g(k, l), g(i, k), g(j, k)],
                        vec![g(k, l), g(i, k), g(j, k), g(j, l)],
                    ));
                }
            }
        }
    }
    out
}

/// Random distinct rationals.
pub fn random_labels(rng: &mut impl Rng, count: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let z = Rational::new(rng.gen_range(-60i64..=60), rng.gen_range(1i64..=12));
        if !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// Flips of the pentagon cycle on points `p = [i, j, k, l, m]` starting from
/// the fan `(ijk, ikl, ilm)`: `il -> km`, `ik -> jm`, `km -> jl`, `jm -> il`,
/// `jl -> ik`.
pub fn pentagon_cycle(p: [usize; 5]) -> Vec<FlipEvent> {
    let [i, j, k, l, m] = p;
    vec![
        FlipEvent::new([i, l], [k, m]),
        FlipEvent::new([i, k], [j, m]),
        FlipEvent::new([k, m], [j, l]),
        FlipEvent::new([j, m], [i, l]),
        FlipEvent::new([j, l], [i, k]),
    ]
}

/// Threads `events` from `start`, returning every flip matrix and the
/// product (later flips on the left).
pub fn compose_events(
    start: &OrderedBasis,
    events: &[FlipEvent],
    labels: &LabelMap,
) -> Result<(Vec<FlipMatrix>, RationalMatrix), BraidError> {
    let mut basis = start.clone();
    let mut product = RationalMatrix::identity(start.len());
    let mut mats = Vec::with_capacity(events.len());
    for ev in events {
        let fm = flip_matrix_for_event(ev, &basis, labels)?;
        product = fm.matrix.mul(&product)?;
        basis = fm.to_basis.clone();
        mats.push(fm);
    }
    Ok((mats, product))
}

fn pentagon_fan(p: [usize; 5]) -> OrderedBasis {
    let [i, j, k, l, m] = p;
    OrderedBasis::new(vec![
        Triangle::new(i, j, k),
        Triangle::new(i, k, l),
        Triangle::new(i, l, m),
    ])
}

fn verify_pentagon(opts: &VerifyOptions, rng: &mut ChaCha8Rng, report: &mut RelationReport) {
    let family = RelationFamily::Pentagon;
    let points = [1, 2, 3, 4, 5];
    let start = pentagon_fan(points);
    for trial in 0..opts.trials.max(1) {
        let zetas = if trial == 0 {
            (1..=5).map(Rational::from).collect()
        } else {
            random_labels(rng, 5)
        };
        let labels = LabelMap::new(points.iter().copied().zip(zetas.iter().cloned()).collect());
        let name = format!(
            "pentagon zeta=({})",
            zetas.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        );
        match compose_events(&start, &pentagon_cycle(points), &labels) {
            Ok((_, product)) => report.instances.push(InstanceReport::compare(
                family,
                name,
                product,
                RationalMatrix::identity(3),
            )),
            Err(e) => report
                .instances
                .push(InstanceReport::failed(family, name, e.to_string())),
        }
    }
}

/// Interior edges of a triangle set whose flip is combinatorially possible.
fn flippable(set: &std::collections::BTreeSet<Triangle>) -> Vec<FlipEvent> {
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for t in set {
        let [a, b, c] = t.vertices();
        for (u, v, w) in [(a, b, c), (a, c, b), (b, c, a)] {
            by_edge.entry((u, v)).or_default().push(w);
        }
    }
    by_edge
        .into_iter()
        .filter_map(|((u, v), apexes)| match apexes[..] {
            [w, z] => {
                let ev = FlipEvent::new([u, v], [w, z]);
                ev.apply(set).ok().map(|_| ev)
            }
            _ => None,
        })
        .collect()
}

fn verify_far_comm(n: usize, opts: &VerifyOptions, rng: &mut ChaCha8Rng, report: &mut RelationReport) {
    let family = RelationFamily::FarComm;
    let setup = match canonical_configuration(n).and_then(|c| build_delaunay(&c).map_err(BraidError::from)) {
        Ok(t) => t,
        Err(e) => {
            report
                .instances
                .push(InstanceReport::failed(family, format!("setup n={n}"), e.to_string()));
            return;
        }
    };
    let start = setup.ordered_basis();
    let set = start.to_set();
    let edges = flippable(&set);
    let mut pairs = Vec::new();
    for (a, x) in edges.iter().enumerate() {
        for y in &edges[a + 1..] {
            if x.quad.iter().filter(|v| y.quad.contains(v)).count() <= 2 {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    let count = pairs.len();
    for trial in 0..opts.trials.max(1) {
        if count == 0 {
            break;
        }
        let (x, y) = &pairs[trial % count];
        let zetas = random_labels(rng, n + 3);
        let labels = LabelMap::new((1..=n + 3).zip(zetas).collect());
        let name = format!(
            "far_comm n={n} {:?}->{:?} with {:?}->{:?} trial {trial}",
            x.removed, x.inserted, y.removed, y.inserted
        );
        let left = compose_events(&start, &[x.clone(), y.clone()], &labels);
        let right = compose_events(&start, &[y.clone(), x.clone()], &labels);
        match (left, right) {
            (Ok((_, l)), Ok((_, r))) => report.instances.push(InstanceReport::compare(family, name, l, r)),
            (Err(e), _) | (_, Err(e)) => report
                .instances
                .push(InstanceReport::failed(family, name, e.to_string())),
        }
    }
}

fn verify_inverse(engine: &mut BraidEngine, report: &mut RelationReport) {
    let family = RelationFamily::Inverse;
    let n = engine.n();
    let identity = RationalMatrix::identity(engine.basis().len());
    for i in 1..=n {
        for j in i + 1..=n {
            let g = Letter::generator(i, j);
            for (name, word) in [
                (format!("{g} {}", g.inverse()), [g, g.inverse()]),
                (format!("{} {g}", g.inverse()), [g.inverse(), g]),
            ] {
                match engine.word_matrix(&word) {
                    Ok(m) => report
                        .instances
                        .push(InstanceReport::compare(family, name, m, identity.clone())),
                    Err(e) => report
                        .instances
                        .push(InstanceReport::failed(family, name, e.to_string())),
                }
            }
        }
    }
}

fn verify_presentation(
    engine: &mut BraidEngine,
    opts: &VerifyOptions,
    rng: &mut ChaCha8Rng,
    report: &mut RelationReport,
) {
    let family = RelationFamily::PbAll;
    let mut instances = presentation_instances(engine.n());
    if let Some(cap) = opts.max_instances {
        let mut grouped: BTreeMap<String, Vec<RelationInstance>> = BTreeMap::new();
        for inst in instances {
            grouped.entry(inst.0[..4].to_string()).or_default().push(inst);
        }
        instances = Vec::new();
        for (_, mut group) in grouped {
            group.shuffle(rng);
            group.truncate(cap);
            instances.extend(group);
        }
    }
    for (name, left, right) in instances {
        let l = engine.word_matrix(&left);
        let r = engine.word_matrix(&right);
        match (l, r) {
            (Ok(l), Ok(r)) => report.instances.push(InstanceReport::compare(family, name, l, r)),
            (Err(e), _) | (_, Err(e)) => report
                .instances
                .push(InstanceReport::failed(family, name, e.to_string())),
        }
    }
}

/// Checks a family of identities at `n` and reports every instance.
pub fn verify_relations(n: usize, family: RelationFamily, opts: &VerifyOptions) -> RelationReport {
    let mut report = RelationReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match family {
        RelationFamily::Pentagon => verify_pentagon(opts, &mut rng, &mut report),
        RelationFamily::FarComm => verify_far_comm(n, opts, &mut rng, &mut report),
        RelationFamily::Inverse | RelationFamily::PbAll => match BraidEngine::new(n) {
            Ok(mut engine) => {
                if family == RelationFamily::Inverse {
                    verify_inverse(&mut engine, &mut report);
                } else {
                    verify_presentation(&mut engine, opts, &mut rng, &mut report);
                }
            }
            Err(e) => report
                .instances
                .push(InstanceReport::failed(family, format!("setup n={n}"), e.to_string())),
        },
    }
    report
}
