//! Transcribed reference matrices and the suites that check them.
//!
//! Entries are either rational literals (`-3/2`) or label ratios
//! `[-](zA-zB)/(zC-zD)` where each variable is a point index (`z5`) or one
//! of the letters `i..m` standing for the five pentagon points.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::delaunay::{FlipEvent, OrderedBasis, Triangle};
use crate::error::FixtureError;
use crate::flip::{flip_matrix_for_event, LabelMap};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

pub const ENV_VAR: &str = "FLIPBRAID_FIXTURES";
pub const MANIFEST: &str = "MANIFEST.sha256";
pub const PENTAGON: &str = "pentagon_3x3.json";
pub const FLIP_PAIR: &str = "flip_pair_7x7.json";
pub const BRAID_PRODUCTS: &str = "braid_products_11x11.json";

const EMBEDDED: [(&str, &str); 4] = [
    (MANIFEST, include_str!("../fixtures/MANIFEST.sha256")),
    (PENTAGON, include_str!("../fixtures/pentagon_3x3.json")),
    (FLIP_PAIR, include_str!("../fixtures/flip_pair_7x7.json")),
    (BRAID_PRODUCTS, include_str!("../fixtures/braid_products_11x11.json")),
];

/// Raw fixture texts keyed by file name.
#[derive(Debug, Clone)]
pub struct FixtureSet {
    files: BTreeMap<String, String>,
}

impl FixtureSet {
    pub fn embedded() -> Self {
        FixtureSet {
            files: EMBEDDED
                .iter()
                .map(|(name, text)| (name.to_string(), text.to_string()))
                .collect(),
        }
    }

    pub fn from_dir(dir: &Path) -> Result<Self, FixtureError> {
        let mut files = BTreeMap::new();
        for (name, _) in EMBEDDED {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| FixtureError::Io {
                file: path.display().to_string(),
                reason: e.to_string(),
            })?;
            files.insert(name.to_string(), text);
        }
        Ok(FixtureSet { files })
    }

    /// The directory named by `FLIPBRAID_FIXTURES` if set, else the bundled copies.
    pub fn load() -> Result<Self, FixtureError> {
        match std::env::var_os(ENV_VAR) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::embedded()),
        }
    }

    pub fn text(&self, name: &str) -> Result<&str, FixtureError> {
        self.files
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| FixtureError::Missing(name.to_string()))
    }

    pub fn verify_manifest(&self) -> Result<(), FixtureError> {
        let manifest = self.text(MANIFEST)?;
        let mut listed = 0;
        for line in manifest.lines().filter(|l| !l.trim().is_empty()) {
            let (hash, name) = line.split_once("  ").ok_or_else(|| FixtureError::Parse {
                file: MANIFEST.to_string(),
                detail: format!("bad line {line:?}"),
            })?;
            let actual = sha256_hex(self.text(name.trim())?);
            if actual != hash {
                return Err(FixtureError::Checksum {
                    file: name.to_string(),
                    expected: hash.to_string(),
                    actual,
                });
            }
            listed += 1;
        }
        if listed != EMBEDDED.len() - 1 {
            return Err(FixtureError::Parse {
                file: MANIFEST.to_string(),
                detail: format!("expected {} entries, found {listed}", EMBEDDED.len() - 1),
            });
        }
        Ok(())
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<T, FixtureError> {
        serde_json::from_str(self.text(name)?).map_err(|e| FixtureError::Parse {
            file: name.to_string(),
            detail: e.to_string(),
        })
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Maps pentagon letters `i..m` to point indices `1..5`.
pub fn letter_index(c: char) -> Option<usize> {
    "ijklm".find(c).map(|p| p + 1)
}

fn parse_variable(s: &str) -> Option<usize> {
    let name = s.trim().strip_prefix('z')?;
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_alphabetic() => letter_index(c),
        _ => name.parse().ok(),
    }
}

fn parse_difference(s: &str) -> Option<(usize, usize)> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once('-')?;
    Some((parse_variable(a)?, parse_variable(b)?))
}

/// Evaluates one entry against `labels`.
pub fn eval_entry(text: &str, labels: &LabelMap) -> Result<Rational, String> {
    let t = text.trim();
    if !t.contains('z') {
        return t.parse::<Rational>().map_err(|e| e.to_string());
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let bad = || format!("bad entry {text:?}");
    let (num, den) = body.split_once('/').ok_or_else(bad)?;
    let (a, b) = parse_difference(num).ok_or_else(bad)?;
    let (c, d) = parse_difference(den).ok_or_else(bad)?;
    let z = |i: usize| labels.get(i).cloned().map_err(|e| e.to_string());
    let value = (z(a)? - z(b)?)
        .checked_div(&(z(c)? - z(d)?))
        .ok_or_else(|| format!("zero denominator in {text:?}"))?;
    Ok(if negative { -value } else { value })
}

pub fn eval_matrix(rows: &[Vec<String>], labels: &LabelMap) -> Result<RationalMatrix, String> {
    let values = rows
        .iter()
        .map(|r| r.iter().map(|e| eval_entry(e, labels)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    RationalMatrix::from_rows(values).map_err(|e| e.to_string())
}

type RawMatrix = Vec<Vec<String>>;

#[derive(Debug, Deserialize)]
struct PentagonStep {
    removed: String,
    inserted: String,
    from: Vec<String>,
    to: Vec<String>,
    matrix: RawMatrix,
}

#[derive(Debug, Deserialize)]
struct PentagonFixture {
    start: Vec<String>,
    steps: Vec<PentagonStep>,
    product_factors: Vec<RawMatrix>,
}

#[derive(Debug, Deserialize)]
struct ProductFixture {
    factors: Vec<RawMatrix>,
    product: RawMatrix,
}

#[derive(Debug, Deserialize)]
struct FlipPairFixture {
    orders: Vec<ProductFixture>,
}

#[derive(Debug, Deserialize)]
struct BraidProductsFixture {
    b_ij: ProductFixture,
    b_kl: ProductFixture,
    commuting_product: RawMatrix,
}

/// Outcome of a passing suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSummary {
    pub suite: &'static str,
    /// Matrix equalities checked.
    pub checks: usize,
}

fn compare(suite: &str, what: &str, expected: &RationalMatrix, actual: &RationalMatrix) -> Result<(), FixtureError> {
    match expected.first_difference(actual) {
        None => Ok(()),
        Some((row, col)) => {
            let show = |m: &RationalMatrix| {
                if row < m.rows() && col < m.cols() {
                    m.get(row, col).to_string()
                } else {
                    format!("{}x{} matrix", m.rows(), m.cols())
                }
            };
            Err(FixtureError::Mismatch {
                suite: suite.to_string(),
                what: what.to_string(),
                row,
                col,
                expected: show(expected),
                actual: show(actual),
            })
        }
    }
}

fn failed(suite: &str, detail: impl ToString) -> FixtureError {
    FixtureError::Failed {
        suite: suite.to_string(),
        detail: detail.to_string(),
    }
}

/// Written product `F_0 F_1 ... F_last`.
fn written_product(factors: &[RationalMatrix]) -> Result<RationalMatrix, String> {
    let (first, rest) = factors.split_first().ok_or("no factors")?;
    rest.iter()
        .try_fold(first.clone(), |acc, f| acc.mul(f))
        .map_err(|e| e.to_string())
}

fn default_labels(size: usize) -> LabelMap {
    LabelMap::identity(size)
}

fn triangle_of(word: &str) -> Option<Triangle> {
    let v: Vec<usize> = word.chars().map(letter_index).collect::<Option<_>>()?;
    match v[..] {
        [a, b, c] => Some(Triangle::new(a, b, c)),
        _ => None,
    }
}

fn pair_of(word: &str) -> Option<[usize; 2]> {
    let v: Vec<usize> = word.chars().map(letter_index).collect::<Option<_>>()?;
    match v[..] {
        [a, b] => Some([a, b]),
        _ => None,
    }
}

fn triangles_of(words: &[String]) -> Option<Vec<Triangle>> {
    words.iter().map(|w| triangle_of(w)).collect()
}

/// Checks the five pentagon matrices for labels `zeta` on `i..m`: each printed
/// matrix equals the builder's output in the printed local bases, the cycle
/// composes to `I_3`, and the printed product form agrees.
pub fn check_pentagon(set: &FixtureSet, zeta: &[Rational; 5]) -> Result<SuiteSummary, FixtureError> {
    const SUITE: &str = "pentagon";
    let fx: PentagonFixture = set.parse(PENTAGON)?;
    let labels = LabelMap::new((1..=5).zip(zeta.iter().cloned()).collect());
    let start = triangles_of(&fx.start).ok_or_else(|| failed(SUITE, "bad start basis"))?;
    let mut basis = OrderedBasis::new(start);
    let mut checks = 0;
    let mut printed = Vec::new();
    for (s, step) in fx.steps.iter().enumerate() {
        let what = format!("step {} ({} -> {})", s + 1, step.removed, step.inserted);
        let removed = pair_of(&step.removed).ok_or_else(|| failed(SUITE, "bad pair"))?;
        let inserted = pair_of(&step.inserted).ok_or_else(|| failed(SUITE, "bad pair"))?;
        let from = triangles_of(&step.from).ok_or_else(|| failed(SUITE, "bad basis"))?;
        let to = triangles_of(&step.to).ok_or_else(|| failed(SUITE, "bad basis"))?;
        let matrix = eval_matrix(&step.matrix, &labels).map_err(|e| failed(SUITE, e))?;
        let built =
            flip_matrix_for_event(&FlipEvent::new(removed, inserted), &basis, &labels).map_err(|e| failed(SUITE, e))?;
        if OrderedBasis::new(from.clone()) != built.from_basis || OrderedBasis::new(to.clone()) != built.to_basis {
            return Err(failed(SUITE, format!("{what}: printed bases differ from the flip")));
        }
        // Reorder the builder's matrix into the printed local orderings.
        let local = RationalMatrix::from_fn(to.len(), from.len(), |r, c| {
            let row = built.to_basis.position(&to[r]).expect("same set");
            let col = built.from_basis.position(&from[c]).expect("same set");
            built.matrix.get(row, col).clone()
        });
        compare(SUITE, &what, &matrix, &local)?;
        checks += 1;
        basis = built.to_basis;
        printed.push(matrix);
    }
    let cycle = crate::matrix::compose_later_left(3, printed.iter()).map_err(|e| failed(SUITE, e))?;
    compare(SUITE, "cycle product", &RationalMatrix::identity(3), &cycle)?;
    checks += 1;
    let factors = fx
        .product_factors
        .iter()
        .map(|m| eval_matrix(m, &labels))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| failed(SUITE, e))?;
    let b = written_product(&factors).map_err(|e| failed(SUITE, e))?;
    compare(SUITE, "written product B", &RationalMatrix::identity(3), &b)?;
    checks += 1;
    for (k, f) in factors.iter().enumerate() {
        compare(
            SUITE,
            &format!("written factor {}", k + 1),
            &printed[printed.len() - 1 - k],
            f,
        )?;
        checks += 1;
    }
    Ok(SuiteSummary { suite: SUITE, checks })
}

/// Both orders of the two commuting 7x7 flips give the printed products, and
/// those products coincide.
pub fn check_flip_pair(set: &FixtureSet) -> Result<SuiteSummary, FixtureError> {
    const SUITE: &str = "flip pair 7x7";
    let fx: FlipPairFixture = set.parse(FLIP_PAIR)?;
    let labels = default_labels(6);
    let mut products = Vec::new();
    let mut checks = 0;
    for (o, order) in fx.orders.iter().enumerate() {
        let factors = order
            .factors
            .iter()
            .map(|m| eval_matrix(m, &labels))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| failed(SUITE, e))?;
        for (k, f) in factors.iter().enumerate() {
            if f.column_sums().iter().any(|s| !s.is_one()) {
                return Err(failed(
                    SUITE,
                    format!("order {} factor {} has a column sum other than 1", o + 1, k + 1),
                ));
            }
        }
        let product = written_product(&factors).map_err(|e| failed(SUITE, e))?;
        let printed = eval_matrix(&order.product, &labels).map_err(|e| failed(SUITE, e))?;
        compare(SUITE, &format!("order {} product", o + 1), &printed, &product)?;
        checks += 1;
        products.push(printed);
    }
    for w in products.windows(2) {
        compare(SUITE, "products of the two orders", &w[0], &w[1])?;
        checks += 1;
    }
    Ok(SuiteSummary { suite: SUITE, checks })
}

/// Printed factor lists multiply to the printed 11x11 matrices, and those
/// matrices commute to the printed product.
pub fn check_braid_products(set: &FixtureSet) -> Result<SuiteSummary, FixtureError> {
    const SUITE: &str = "braid products 11x11";
    let fx: BraidProductsFixture = set.parse(BRAID_PRODUCTS)?;
    let labels = default_labels(8);
    let mut checks = 0;
    let mut printed = Vec::new();
    for (name, part) in [("b_ij", &fx.b_ij), ("b_kl", &fx.b_kl)] {
        let factors = part
            .factors
            .iter()
            .map(|m| eval_matrix(m, &labels))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| failed(SUITE, e))?;
        for (k, f) in factors.iter().enumerate() {
            if f.column_sums().iter().any(|s| !s.is_one()) {
                return Err(failed(
                    SUITE,
                    format!("{name} factor {} has a column sum other than 1", k + 1),
                ));
            }
        }
        let product = written_product(&factors).map_err(|e| failed(SUITE, e))?;
        let expected = eval_matrix(&part.product, &labels).map_err(|e| failed(SUITE, e))?;
        compare(
            SUITE,
            &format!("{name} product of {} factors", factors.len()),
            &expected,
            &product,
        )?;
        checks += 1;
        printed.push(expected);
    }
    let commuting = eval_matrix(&fx.commuting_product, &labels).map_err(|e| failed(SUITE, e))?;
    let ab = printed[0].mul(&printed[1]).map_err(|e| failed(SUITE, e))?;
    let ba = printed[1].mul(&printed[0]).map_err(|e| failed(SUITE, e))?;
    compare(SUITE, "b_ij b_kl", &commuting, &ab)?;
    compare(SUITE, "b_kl b_ij", &commuting, &ba)?;
    checks += 2;
    Ok(SuiteSummary { suite: SUITE, checks })
}

/// Counts of factor matrices in the 11x11 fixture, for sanity checks.
pub fn braid_factor_counts(set: &FixtureSet) -> Result<(usize, usize), FixtureError> {
    let fx: BraidProductsFixture = set.parse(BRAID_PRODUCTS)?;
    Ok((fx.b_ij.factors.len(), fx.b_kl.factors.len()))
}

/// Manifest check followed by every suite at the default labels.
pub fn run_all(set: &FixtureSet) -> Result<Vec<SuiteSummary>, FixtureError> {
    set.verify_manifest()?;
    let zeta = [1, 2, 3, 4, 5].map(Rational::from);
    Ok(vec![
        check_pentagon(set, &zeta)?,
        check_braid_products(set)?,
        check_flip_pair(set)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_grammar() {
        let labels = LabelMap::identity(6);
        assert_eq!(eval_entry("-3/2", &labels).unwrap(), Rational::new(-3, 2));
        assert_eq!(eval_entry("(z1-z6)/(z1-z5)", &labels).unwrap(), Rational::new(5, 4));
        assert_eq!(eval_entry("-(z2-z3)/(z3-z5)", &labels).unwrap(), Rational::new(-1, 2));
        assert_eq!(eval_entry("(zi-zm)/(zi-zl)", &labels).unwrap(), Rational::new(4, 3));
        assert!(eval_entry("(z1-z2)/(z3-z3)", &labels).is_err());
        assert!(eval_entry("(z1-z2)(z3-z4)", &labels).is_err());
    }

    #[test]
    fn embedded_manifest_matches() {
        FixtureSet::embedded().verify_manifest().unwrap();
    }

    #[test]
    fn tampered_fixture_is_rejected() {
        let mut set = FixtureSet::embedded();
        let text = set.files.get_mut(FLIP_PAIR).unwrap();
        let at = text.find("\"product\"").unwrap();
        let tail = text[at..].replacen("(z1-z6)", "(z1-z4)", 1);
        text.replace_range(at.., &tail);
        assert!(matches!(set.verify_manifest(), Err(FixtureError::Checksum { .. })));
        match check_flip_pair(&set) {
            Err(FixtureError::Mismatch { row, col, .. }) => assert_eq!((row, col), (2, 2)),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn suites_pass() {
        let set = FixtureSet::embedded();
        let summaries = run_all(&set).unwrap();
        assert_eq!(summaries.len(), 3);
        assert_eq!(braid_factor_counts(&set).unwrap(), (20, 14));
    }
}
