//! Line-oriented run configuration.
//!
//! ```text
//! # comments run to the end of the line
//! level = 2                 # required, before any section
//! p = 0, 1.5                # optional shift, one literal per coordinate,
//!                           # or `-s` for the shift p = -s induced by the drifts
//!
//! [block]                   # repeated, in coordinate order
//! m = 2
//! a = 2 + 1I*i1
//! B = 2, 0.5; 0.5, 1        # rows separated by ';'
//! psi = 0, 0.5i2            # optional drift, defaults to zero
//!
//! [grid]
//! L = 12                    # one value for every axis, or one per axis
//! N = 1024
//! t = 1
//!
//! [options]
//! tol_alpha = 1e-12
//!
//! [family]
//! labels = 0.5, 1, 2
//!
//! [member]                  # repeated; coords are 1-based label indices
//! name = pair
//! coords = 1, 2
//! atom = 0.5, -1 @ 1 + 0.25i1      # repeated; makes the member discrete
//! [member.block]            # blocks of the member's own spec
//! ```
//!
//! A member with neither atoms nor blocks is the marginal of the top-level spec.
//!
//! Hypercomplex literals are sums of terms `c`, `c i<k>`, `c I`, `c I*i<k>`
//! (the coefficient may be omitted, `*` may separate it from the unit): `i<k>`
//! is the basis element `i_k` and `I` the central imaginary unit, so
//! `2 + 1i1 - 0.5I*i2` is `2 + i_1 - I 0.5 i_2`. Unknown keys are errors.

use std::fmt::{self, Write as _};

use crate::algebra::{fmt_magnitude, CCDNumber, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::kernel::{Axis, GridSpec};
use crate::spectral::{BlockSpec, Matrix, MeasureSpec, ALPHA_BOUNDARY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct BlockConfig {
    pub m: usize,
    pub a: CCDNumber,
    pub b: Vec<Vec<f64>>,
    pub psi: Option<Vec<CCDNumber>>,
}

impl BlockConfig {
    pub fn to_block(&self, level: u8) -> Result<BlockSpec> {
        if self.b.len() != self.m {
            return Err(Error::dim("rows of B", self.m, self.b.len()));
        }
        let psi = self
            .psi
            .clone()
            .unwrap_or_else(|| vec![CCDNumber::zero(level); self.m]);
        BlockSpec::new(self.a.clone(), Matrix::from_rows(self.b.clone())?, psi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
    pub t: f64,
}

impl GridConfig {
    pub fn to_grid(&self, n: usize) -> Result<GridSpec> {
        let pick = |len: usize, what: &str| -> Result<()> {
            if len == 1 || len == n {
                Ok(())
            } else {
                Err(Error::dim(what, n, len))
            }
        };
        pick(self.extent.len(), "grid extents")?;
        pick(self.points.len(), "grid point counts")?;
        let axes = (0..n)
            .map(|k| {
                Axis::new(
                    self.extent[k.min(self.extent.len() - 1)],
                    self.points[k.min(self.points.len() - 1)],
                )
            })
            .collect::<Result<_>>()?;
        GridSpec::new(axes, self.t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub tol_alpha: f64,
    pub tol_kernel: f64,
    pub tol_moment: f64,
    pub tol_semigroup: f64,
    pub tol_consistency: f64,
    pub probes: usize,
    pub semigroup_t: f64,
    pub semigroup_s: f64,
    pub time_step: f64,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol_alpha: ALPHA_BOUNDARY_TOL,
            tol_kernel: 1e-6,
            tol_moment: 1e-5,
            tol_semigroup: 1e-10,
            tol_consistency: 1e-9,
            probes: 100,
            semigroup_t: 0.3,
            semigroup_s: 0.7,
            time_step: 1e-3,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberConfig {
    pub name: String,
    pub coords: Vec<usize>,
    pub p: Option<Vec<CCDNumber>>,
    pub blocks: Vec<BlockConfig>,
    pub atoms: Vec<(Vec<f64>, CCDNumber)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyConfig {
    pub labels: Vec<f64>,
    pub members: Vec<MemberConfig>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub level: u8,
    pub p: Option<Vec<CCDNumber>>,
    /// `p = -s`: the shift is the negated drift vector.
    pub p_from_drift: bool,
    pub blocks: Vec<BlockConfig>,
    pub grid: Option<GridConfig>,
    pub options: Options,
    pub family: Option<FamilyConfig>,
}

impl RunConfig {
    /// Assembled and validated measure spec.
    pub fn spec(&self) -> Result<MeasureSpec> {
        let spec = build_spec(self.level, &self.blocks, self.p.as_ref())?;
        Ok(if self.p_from_drift {
            spec.with_shift_from_drift()
        } else {
            spec
        })
    }

    pub fn grid_spec(&self, n: usize) -> Result<Option<GridSpec>> {
        self.grid.as_ref().map(|g| g.to_grid(n)).transpose()
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "level = {}", self.level);
        if self.p_from_drift {
            let _ = writeln!(out, "p = -s");
        } else if let Some(p) = &self.p {
            let _ = writeln!(out, "p = {}", literal_list(p));
        }
        for b in &self.blocks {
            write_block(&mut out, "block", b);
        }
        if let Some(g) = &self.grid {
            let _ = writeln!(out, "\n[grid]");
            let _ = writeln!(out, "L = {}", number_list(&g.extent));
            let points: Vec<String> = g.points.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "N = {}", points.join(", "));
            let _ = writeln!(out, "t = {}", g.t);
        }
        let o = &self.options;
        let _ = writeln!(out, "\n[options]");
        let _ = writeln!(out, "tol_alpha = {}", o.tol_alpha);
        let _ = writeln!(out, "tol_kernel = {}", o.tol_kernel);
        let _ = writeln!(out, "tol_moment = {}", o.tol_moment);
        let _ = writeln!(out, "tol_semigroup = {}", o.tol_semigroup);
        let _ = writeln!(out, "tol_consistency = {}", o.tol_consistency);
        let _ = writeln!(out, "probes = {}", o.probes);
        let _ = writeln!(out, "semigroup_t = {}", o.semigroup_t);
        let _ = writeln!(out, "semigroup_s = {}", o.semigroup_s);
        let _ = writeln!(out, "time_step = {}", o.time_step);
        let _ = writeln!(out, "seed = {}", o.seed);
        if let Some(f) = &self.family {
            let _ = writeln!(out, "\n[family]");
            let _ = writeln!(out, "labels = {}", number_list(&f.labels));
            for m in &f.members {
                let _ = writeln!(out, "\n[member]");
                let _ = writeln!(out, "name = {}", m.name);
                let coords: Vec<String> = m.coords.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "coords = {}", coords.join(", "));
                if let Some(p) = &m.p {
                    let _ = writeln!(out, "p = {}", literal_list(p));
                }
                for (x, w) in &m.atoms {
                    let _ = writeln!(out, "atom = {} @ {}", number_list(x), format_literal(w));
                }
                for b in &m.blocks {
                    write_block(&mut out, "member.block", b);
                }
            }
        }
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn build_spec(
    level: u8,
    blocks: &[BlockConfig],
    p: Option<&Vec<CCDNumber>>,
) -> Result<MeasureSpec> {
    let blocks = blocks
        .iter()
        .map(|b| b.to_block(level))
        .collect::<Result<Vec<_>>>()?;
    match p {
        Some(p) => MeasureSpec::new(blocks, p.clone()),
        None => MeasureSpec::centered(blocks),
    }
}

fn write_block(out: &mut String, header: &str, b: &BlockConfig) {
    let _ = writeln!(out, "\n[{header}]");
    let _ = writeln!(out, "m = {}", b.m);
    let _ = writeln!(out, "a = {}", format_literal(&b.a));
    let rows: Vec<String> = b.b.iter().map(|r| number_list(r)).collect();
    let _ = writeln!(out, "B = {}", rows.join("; "));
    if let Some(psi) = &b.psi {
        let _ = writeln!(out, "psi = {}", literal_list(psi));
    }
}

fn number_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn literal_list(v: &[CCDNumber]) -> String {
    v.iter().map(format_literal).collect::<Vec<_>>().join(", ")
}

/// Literal text for `z` in the config grammar, exact under [`parse_literal`].
pub fn format_literal(z: &CCDNumber) -> String {
    let mut terms: Vec<(f64, String)> = Vec::new();
    for (k, &c) in z.re.coeffs().iter().enumerate() {
        if c != 0.0 {
            terms.push((c, if k == 0 { String::new() } else { format!("i{k}") }));
        }
    }
    for (k, &c) in z.im.coeffs().iter().enumerate() {
        if c != 0.0 {
            terms.push((c, if k == 0 { "I".into() } else { format!("I*i{k}") }));
        }
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (c, unit)) in terms.iter().enumerate() {
        let body = format!("{}{unit}", fmt_magnitude(*c));
        match (n, *c < 0.0) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

struct LiteralParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> LiteralParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> std::result::Result<Option<f64>, String> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.peek().is_some_and(|b| b.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if self.pos == start {
            return Ok(None);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                return Err("malformed exponent".into());
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Some)
            .map_err(|_| format!("bad number {text:?}"))
    }

    fn basis(&mut self) -> std::result::Result<Option<usize>, String> {
        self.skip_ws();
        if self.peek() != Some(b'i') {
            return Ok(None);
        }
        self.pos += 1;
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err("basis symbol 'i' needs an index, as in i1".into());
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse()
            .map(Some)
            .map_err(|_| format!("bad basis index {text:?}"))
    }

    /// `[coef] ['*'] ['I'] ['*'] [i<k>]`, returning `(coef, central, k)`.
    fn term(&mut self) -> std::result::Result<(f64, bool, usize), String> {
        let coef = self.number()?;
        let mut star = coef.is_some() && self.eat(b'*');
        let central = self.eat(b'I');
        if central {
            star = self.eat(b'*');
        }
        let k = self.basis()?;
        if coef.is_none() && !central && k.is_none() {
            return Err(match self.peek() {
                Some(b) => format!("unexpected {:?} in literal", b as char),
                None => "missing term in literal".into(),
            });
        }
        if star && k.is_none() {
            return Err("'*' must be followed by a basis symbol".into());
        }
        Ok((coef.unwrap_or(1.0), central, k.unwrap_or(0)))
    }
}

/// Parse a literal such as `2 + 1i1 + 0.5I*i2` at the given level.
pub fn parse_literal(text: &str, level: u8) -> std::result::Result<CCDNumber, String> {
    if level > MAX_LEVEL {
        return Err(format!("level {level} exceeds {MAX_LEVEL}"));
    }
    let mut p = LiteralParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let dim = 1usize << level;
    let mut z = CCDNumber::zero(level);
    let mut first = true;
    loop {
        p.skip_ws();
        if p.peek().is_none() {
            if first {
                return Err("empty literal".into());
            }
            break;
        }
        let mut sign = 1.0;
        if p.eat(b'+') {
        } else if p.eat(b'-') {
            sign = -1.0;
        } else if !first {
            return Err(format!(
                "expected '+' or '-' before {:?}",
                &text[p.pos..]
            ));
        }
        if p.eat(b'-') {
            sign = -sign;
        }
        let (coef, central, k) = p.term()?;
        if k >= dim {
            return Err(format!("unknown basis symbol i{k} at level {level}"));
        }
        let half = if central { &mut z.im } else { &mut z.re };
        half.coeffs_mut()[k] += sign * coef;
        first = false;
    }
    if !z.is_finite() {
        return Err("literal is not finite".into());
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Top,
    Block,
    Grid,
    Options,
    Family,
    Member,
    MemberBlock,
}

struct Parser {
    level: Option<u8>,
    cfg: RunConfig,
    section: Section,
    seen: Vec<String>,
    /// Line of each top-level block header, for diagnostics.
    block_lines: Vec<usize>,
    member_block_lines: Vec<Vec<usize>>,
    p_line: usize,
    member_lines: Vec<usize>,
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim)
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number {s:?}"));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("bad non-negative integer {s:?}"))
}

fn parse_f64_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    split_list(value).map(parse_f64).collect()
}

fn parse_matrix(value: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    value.split(';').map(parse_f64_list).collect()
}

impl Parser {
    fn level(&self, line: usize) -> Result<u8> {
        self.level
            .ok_or_else(|| Error::parse(line, "'level' must be set before any hypercomplex value"))
    }

    fn literal_list(&self, value: &str, line: usize) -> Result<Vec<CCDNumber>> {
        let level = self.level(line)?;
        split_list(value)
            .map(|s| parse_literal(s, level).map_err(|m| Error::parse(line, m)))
            .collect()
    }

    fn current_block(&mut self) -> &mut BlockConfig {
        match self.section {
            Section::Block => self.cfg.blocks.last_mut(),
            _ => self
                .cfg
                .family
                .as_mut()
                .and_then(|f| f.members.last_mut())
                .and_then(|m| m.blocks.last_mut()),
        }
        .expect("section opened")
    }

    fn enter(&mut self, name: &str, line: usize) -> Result<()> {
        self.seen.clear();
        let level = self.level(line)?;
        let empty_block = BlockConfig {
            m: 0,
            a: CCDNumber::zero(level),
            b: Vec::new(),
            psi: None,
        };
        self.section = match name {
            "block" => {
                if self.section != Section::Top && self.section != Section::Block {
                    return Err(Error::parse(line, "[block] sections must precede other sections"));
                }
                self.cfg.blocks.push(empty_block);
                self.block_lines.push(line);
                Section::Block
            }
            "grid" if self.cfg.grid.is_none() => {
                self.cfg.grid = Some(GridConfig {
                    extent: Vec::new(),
                    points: Vec::new(),
                    t: f64::NAN,
                });
                Section::Grid
            }
            "options" => Section::Options,
            "family" if self.cfg.family.is_none() => {
                self.cfg.family = Some(FamilyConfig {
                    labels: Vec::new(),
                    members: Vec::new(),
                });
                Section::Family
            }
            "member" => {
                let family = self
                    .cfg
                    .family
                    .as_mut()
                    .ok_or_else(|| Error::parse(line, "[member] requires a preceding [family]"))?;
                family.members.push(MemberConfig {
                    name: String::new(),
                    coords: Vec::new(),
                    p: None,
                    blocks: Vec::new(),
                    atoms: Vec::new(),
                });
                self.member_lines.push(line);
                self.member_block_lines.push(Vec::new());
                Section::Member
            }
            "member.block" => {
                let member = self
                    .cfg
                    .family
                    .as_mut()
                    .and_then(|f| f.members.last_mut())
                    .ok_or_else(|| Error::parse(line, "[member.block] requires a preceding [member]"))?;
                member.blocks.push(empty_block);
                self.member_block_lines.last_mut().expect("member").push(line);
                Section::MemberBlock
            }
            "grid" | "family" => {
                return Err(Error::parse(line, format!("duplicate [{name}] section")))
            }
            other => return Err(Error::parse(line, format!("unknown section [{other}]"))),
        };
        Ok(())
    }

    fn key(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let repeatable = self.section == Section::Member && key == "atom";
        if !repeatable {
            if self.seen.iter().any(|k| k == key) {
                return Err(Error::parse(line, format!("duplicate key {key:?}")));
            }
            self.seen.push(key.to_string());
        }
        let err = |m: String| Error::parse(line, m);
        match (self.section, key) {
            (Section::Top, "level") => {
                let l = parse_usize(value).map_err(err)?;
                if l > MAX_LEVEL as usize {
                    return Err(Error::parse(line, format!("level {l} exceeds {MAX_LEVEL}")));
                }
                self.level = Some(l as u8);
                self.cfg.level = l as u8;
            }
            (Section::Top, "p") if value.trim() == "-s" => {
                self.cfg.p_from_drift = true;
                self.p_line = line;
            }
            (Section::Top, "p") => {
                self.cfg.p = Some(self.literal_list(value, line)?);
                self.p_line = line;
            }
            (Section::Block | Section::MemberBlock, "m") => {
                self.current_block().m = parse_usize(value).map_err(err)?;
            }
            (Section::Block | Section::MemberBlock, "a") => {
                let level = self.level(line)?;
                self.current_block().a = parse_literal(value, level).map_err(err)?;
            }
            (Section::Block | Section::MemberBlock, "B") => {
                self.current_block().b = parse_matrix(value).map_err(err)?;
            }
            (Section::Block | Section::MemberBlock, "psi") => {
                let psi = self.literal_list(value, line)?;
                self.current_block().psi = Some(psi);
            }
            (Section::Grid, "L") => {
                self.cfg.grid.as_mut().expect("grid").extent = parse_f64_list(value).map_err(err)?;
            }
            (Section::Grid, "N") => {
                let points = split_list(value)
                    .map(parse_usize)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(err)?;
                self.cfg.grid.as_mut().expect("grid").points = points;
            }
            (Section::Grid, "t") => {
                self.cfg.grid.as_mut().expect("grid").t = parse_f64(value).map_err(err)?;
            }
            (Section::Options, _) => self.option(key, value, line)?,
            (Section::Family, "labels") => {
                self.cfg.family.as_mut().expect("family").labels =
                    parse_f64_list(value).map_err(err)?;
            }
            (Section::Member, "name") => {
                self.member().name = value.to_string();
            }
            (Section::Member, "coords") => {
                let coords = split_list(value)
                    .map(parse_usize)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(err)?;
                self.member().coords = coords;
            }
            (Section::Member, "p") => {
                let p = self.literal_list(value, line)?;
                self.member().p = Some(p);
            }
            (Section::Member, "atom") => {
                let (x, w) = value
                    .split_once('@')
                    .ok_or_else(|| Error::parse(line, "atom must read 'x1, x2, ... @ weight'"))?;
                let x = parse_f64_list(x).map_err(err)?;
                let level = self.level(line)?;
                let w = parse_literal(w, level).map_err(err)?;
                self.member().atoms.push((x, w));
            }
            _ => {
                let where_ = match self.section {
                    Section::Top => "at top level".to_string(),
                    s => format!("in [{}]", section_name(s)),
                };
                return Err(Error::parse(line, format!("unknown key {key:?} {where_}")));
            }
        }
        Ok(())
    }

    fn member(&mut self) -> &mut MemberConfig {
        self.cfg
            .family
            .as_mut()
            .and_then(|f| f.members.last_mut())
            .expect("member section")
    }

    fn option(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let err = |m: String| Error::parse(line, m);
        let o = &mut self.cfg.options;
        let positive = |v: f64| -> Result<f64> {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::parse(line, format!("{key} must be positive")))
            }
        };
        match key {
            "tol_alpha" => o.tol_alpha = positive(parse_f64(value).map_err(err)?)?,
            "tol_kernel" => o.tol_kernel = positive(parse_f64(value).map_err(err)?)?,
            "tol_moment" => o.tol_moment = positive(parse_f64(value).map_err(err)?)?,
            "tol_semigroup" => o.tol_semigroup = positive(parse_f64(value).map_err(err)?)?,
            "tol_consistency" => o.tol_consistency = positive(parse_f64(value).map_err(err)?)?,
            "probes" => o.probes = parse_usize(value).map_err(err)?,
            "semigroup_t" => o.semigroup_t = positive(parse_f64(value).map_err(err)?)?,
            "semigroup_s" => o.semigroup_s = positive(parse_f64(value).map_err(err)?)?,
            "time_step" => o.time_step = positive(parse_f64(value).map_err(err)?)?,
            "seed" => {
                o.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad seed {value:?}")))?
            }
            _ => return Err(Error::parse(line, format!("unknown key {key:?} in [options]"))),
        }
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<RunConfig> {
        let cfg = self.cfg;
        self.level
            .ok_or_else(|| Error::parse(last_line.max(1), "missing 'level'"))?;
        let check_blocks = |blocks: &[BlockConfig], lines: &[usize], what: &str| -> Result<()> {
            for (j, (b, &line)) in blocks.iter().zip(lines).enumerate() {
                let name = format!("{what} {}", j + 1);
                if b.m == 0 {
                    return Err(Error::parse(line, format!("{name}: 'm' must be a positive integer")));
                }
                if b.b.len() != b.m {
                    return Err(Error::parse(
                        line,
                        format!("{name}: B has {} rows, expected m = {}", b.b.len(), b.m),
                    ));
                }
                if let Some(r) = b.b.iter().position(|r| r.len() != b.m) {
                    return Err(Error::parse(
                        line,
                        format!("{name}: row {} of B has {} entries, expected {}", r + 1, b.b[r].len(), b.m),
                    ));
                }
                if let Some(psi) = &b.psi {
                    if psi.len() != b.m {
                        return Err(Error::parse(
                            line,
                            format!("{name}: psi has {} entries, expected {}", psi.len(), b.m),
                        ));
                    }
                }
                let single = MeasureSpec::centered(vec![b.to_block(cfg.level)?]);
                if let Err(e) = single {
                    return Err(Error::parse(line, format!("{name}: {}", strip_block(&e))));
                }
            }
            Ok(())
        };
        check_blocks(&cfg.blocks, &self.block_lines, "block")?;
        if !cfg.blocks.is_empty() {
            cfg.spec().map_err(|e| Error::parse(self.p_line.max(1), e.to_string()))?;
        }
        if let Some(g) = &cfg.grid {
            if g.extent.is_empty() || g.points.is_empty() || g.t.is_nan() {
                return Err(Error::parse(last_line, "[grid] needs L, N and t"));
            }
        }
        if let Some(f) = &cfg.family {
            for (m, (member, lines)) in f.members.iter().zip(&self.member_block_lines).enumerate() {
                check_blocks(&member.blocks, lines, &format!("member {} block", m + 1))?;
                let line = self.member_lines[m];
                if member.coords.is_empty() {
                    return Err(Error::parse(line, format!("member {}: 'coords' is required", m + 1)));
                }
                if !member.blocks.is_empty() && !member.atoms.is_empty() {
                    return Err(Error::parse(
                        line,
                        format!("member {}: use either atoms or blocks, not both", m + 1),
                    ));
                }
            }
        }
        Ok(cfg)
    }
}

/// Drop the "block N: " prefix of a single-block validation error.
fn strip_block(e: &Error) -> String {
    let s = e.to_string();
    match s.split_once(": ") {
        Some((head, rest)) if head.starts_with("block ") => rest.to_string(),
        _ => s,
    }
}

fn section_name(s: Section) -> &'static str {
    match s {
        Section::Top => "",
        Section::Block => "block",
        Section::Grid => "grid",
        Section::Options => "options",
        Section::Family => "family",
        Section::Member => "member",
        Section::MemberBlock => "member.block",
    }
}

/// Parse a config; the first problem is reported with its line number.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut parser = Parser {
        level: None,
        cfg: RunConfig {
            level: 0,
            p: None,
            p_from_drift: false,
            blocks: Vec::new(),
            grid: None,
            options: Options::default(),
            family: None,
        },
        section: Section::Top,
        seen: Vec::new(),
        block_lines: Vec::new(),
        member_block_lines: Vec::new(),
        p_line: 0,
        member_lines: Vec::new(),
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, "section header must end with ']'"))?;
            parser.enter(name.trim(), line)?;
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(Error::parse(line, format!("missing value for {key:?}")));
        }
        parser.key(key, value, line)?;
    }
    parser.finish(last)
}
