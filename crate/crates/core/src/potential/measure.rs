use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, invalid, Result};
use crate::model::{clip_floor, Complex, FunctionExpr, GridField, Rect, DEFAULT_CLIP_FLOOR};

/// Value substituted for `+inf` when a Green potential is evaluated on an atom.
pub const GREEN_CLIP: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center: Complex,
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.re.is_finite() && center.im.is_finite()) {
            return invalid(format!("disk needs a finite center and radius > 0, got R = {radius}"));
        }
        Ok(Self { center, radius })
    }

    /// Closed disk membership with a relative slack of `1e-12`.
    pub fn contains(&self, z: Complex) -> bool {
        (z - self.center).norm() <= self.radius * (1.0 + 1e-12)
    }

    pub fn bounding_rect(&self) -> Rect {
        Rect {
            x0: self.center.re - self.radius,
            x1: self.center.re + self.radius,
            y0: self.center.im - self.radius,
            y1: self.center.im + self.radius,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub z: Complex,
    pub mass: f64,
}

/// Nonnegative measure: point masses plus an optional density (mass per unit
/// area at each node, each node standing for the `hx x hy` cell around it).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<GridField>,
}

impl MeasureSpec {
    pub fn atom(z: Complex, mass: f64) -> Self {
        Self {
            atoms: vec![Atom { z, mass }],
            density: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(a.mass >= 0.0 && a.mass.is_finite() && a.z.re.is_finite() && a.z.im.is_finite()) {
                return invalid(format!("atom at {} has invalid mass {}", a.z, a.mass));
            }
        }
        if let Some(d) = &self.density {
            d.validate()?;
            if d.values.iter().any(|v| !(*v >= 0.0)) {
                return invalid("density values must be finite and nonnegative");
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    fn cells(&self) -> impl Iterator<Item = (Complex, f64, f64, f64)> + '_ {
        self.density.iter().flat_map(|d| {
            (0..d.ny).flat_map(move |j| {
                (0..d.nx).filter_map(move |i| {
                    let v = d.get(i, j);
                    (v != 0.0).then(|| (Complex::new(d.x(i), d.y(j)), v, d.hx, d.hy))
                })
            })
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_where(|_| true)
    }

    /// Mass of atoms and density cells whose location satisfies `keep`.
    pub fn mass_where(&self, keep: impl Fn(Complex) -> bool) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| keep(a.z)).map(|a| a.mass).sum();
        let cells: f64 = self
            .cells()
            .filter(|(z, ..)| keep(*z))
            .map(|(_, v, hx, hy)| v * hx * hy)
            .sum();
        atoms + cells
    }

    pub fn mass_in(&self, r: &Rect) -> f64 {
        self.mass_where(|z| z.re >= r.x0 && z.re <= r.x1 && z.im >= r.y0 && z.im <= r.y1)
    }

    /// Restriction to a set; density nodes outside it are zeroed.
    pub fn restrict(&self, keep: impl Fn(Complex) -> bool) -> Self {
        let density = self.density.as_ref().map(|d| {
            let mut d = d.clone();
            for j in 0..d.ny {
                for i in 0..d.nx {
                    if !keep(Complex::new(d.x(i), d.y(j))) {
                        let k = d.idx(i, j);
                        d.values[k] = 0.0;
                    }
                }
            }
            d
        });
        Self {
            atoms: self.atoms.iter().copied().filter(|a| keep(a.z)).collect(),
            density,
        }
    }
}

/// Signed measure `positive - negative` carried as two nonnegative parts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasure {
    pub positive: MeasureSpec,
    pub negative: MeasureSpec,
}

impl SignedMeasure {
    pub fn difference(a: &MeasureSpec, b: &MeasureSpec) -> Self {
        Self {
            positive: a.clone(),
            negative: b.clone(),
        }
    }

    /// Upper bound for the total variation (exact when the parts are
    /// mutually singular).
    pub fn total_variation(&self) -> f64 {
        self.positive.total_mass() + self.negative.total_mass()
    }

    pub fn net_mass(&self) -> f64 {
        self.positive.total_mass() - self.negative.total_mass()
    }
}

fn antiderivative(x: f64, y: f64) -> f64 {
    // F with d2F/dxdy = ln(x^2 + y^2), F(0, y) = F(x, 0) = 0
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    let r2 = x * x + y * y;
    x * y * r2.ln() - 3.0 * x * y + x * x * (y / x).atan() + y * y * (x / y).atan()
}

/// Average of `log|w|` over the rectangle `[a0, a1] x [b0, b1]`.
pub fn log_cell_average(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let i = antiderivative(a1, b1) - antiderivative(a0, b1) - antiderivative(a1, b0) + antiderivative(a0, b0);
    0.5 * i / ((a1 - a0) * (b1 - b0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GreenValue {
    pub value: f64,
    /// Evaluated on an atom; `value` holds at least [`GREEN_CLIP`].
    pub clipped: bool,
    /// Mass outside the closed disk that was left out.
    pub ignored_mass: f64,
}

/// `G(z) = int log(|R^2 - (z - z0) conj(w - z0)| / (R |z - w|)) dmu(w)` over
/// the part of `mu` inside the closed disk.
pub fn green_potential(mu: &MeasureSpec, disk: &DiskSpec, z: Complex) -> Result<GreenValue> {
    if !disk.contains(z) {
        return domain(format!("point {z} outside the disk"));
    }
    let r = disk.radius;
    let zc = z - disk.center;
    let mut value = 0.0;
    let mut clipped = false;
    let mut ignored = 0.0;
    for a in &mu.atoms {
        if a.mass == 0.0 {
            continue;
        }
        if !disk.contains(a.z) {
            ignored += a.mass;
            continue;
        }
        let w = a.z - disk.center;
        let d = (zc - w).norm();
        if d == 0.0 {
            clipped = true;
            value += a.mass * GREEN_CLIP;
            continue;
        }
        value += a.mass * ((r * r - zc * w.conj()).norm() / (r * d)).ln();
    }
    if let Some(dens) = &mu.density {
        let (hx, hy) = (dens.hx, dens.hy);
        let near = 2.0 * hx.max(hy);
        let parts: Vec<(f64, f64)> = (0..dens.ny)
            .into_par_iter()
            .map(|j| {
                let mut acc = 0.0;
                let mut lost = 0.0;
                for i in 0..dens.nx {
                    let v = dens.get(i, j);
                    if v == 0.0 {
                        continue;
                    }
                    let zeta = Complex::new(dens.x(i), dens.y(j));
                    let m = v * hx * hy;
                    if !disk.contains(zeta) {
                        lost += m;
                        continue;
                    }
                    let w = zeta - disk.center;
                    let outer = ((r * r - zc * w.conj()).norm() / r).ln();
                    let diff = zeta - z;
                    let inner = if diff.norm() < near {
                        log_cell_average(
                            diff.re - hx / 2.0,
                            diff.re + hx / 2.0,
                            diff.im - hy / 2.0,
                            diff.im + hy / 2.0,
                        )
                    } else {
                        diff.norm().ln()
                    };
                    acc += m * (outer - inner);
                }
                (acc, lost)
            })
            .collect();
        for (a, l) in parts {
            value += a;
            ignored += l;
        }
    }
    Ok(GreenValue {
        value,
        clipped,
        ignored_mass: ignored,
    })
}

const BLOCK: usize = 8;

/// Density cells grouped in `BLOCK x BLOCK` tiles with mass and centroid, so
/// that far tiles can be summed as single point masses.
struct Tiles {
    tiles: Vec<(f64, Complex, Vec<(Complex, f64)>)>,
    hx: f64,
    hy: f64,
}

impl Tiles {
    fn new(mu: &MeasureSpec, disk: &DiskSpec) -> Option<Self> {
        let d = mu.density.as_ref()?;
        let mut tiles = Vec::new();
        for bj in (0..d.ny).step_by(BLOCK) {
            for bi in (0..d.nx).step_by(BLOCK) {
                let mut cells = Vec::new();
                let (mut m, mut cz) = (0.0, Complex::new(0.0, 0.0));
                for j in bj..(bj + BLOCK).min(d.ny) {
                    for i in bi..(bi + BLOCK).min(d.nx) {
                        let v = d.get(i, j);
                        let z = Complex::new(d.x(i), d.y(j));
                        if v == 0.0 || !disk.contains(z) {
                            continue;
                        }
                        let mass = v * d.hx * d.hy;
                        m += mass;
                        cz += z * mass;
                        cells.push((z, mass));
                    }
                }
                if m > 0.0 {
                    tiles.push((m, cz / m, cells));
                }
            }
        }
        Some(Self {
            tiles,
            hx: d.hx,
            hy: d.hy,
        })
    }

    fn green(&self, disk: &DiskSpec, z: Complex) -> f64 {
        let r = disk.radius;
        let zc = z - disk.center;
        let far = 4.0 * BLOCK as f64 * self.hx.max(self.hy);
        let near = 2.0 * self.hx.max(self.hy);
        let kernel = |zeta: Complex, exact_cell: bool| {
            let w = zeta - disk.center;
            let outer = ((r * r - zc * w.conj()).norm() / r).ln();
            let diff = zeta - z;
            let inner = if exact_cell && diff.norm() < near {
                let (hx, hy) = (self.hx, self.hy);
                log_cell_average(
                    diff.re - hx / 2.0,
                    diff.re + hx / 2.0,
                    diff.im - hy / 2.0,
                    diff.im + hy / 2.0,
                )
            } else {
                diff.norm().ln()
            };
            outer - inner
        };
        let mut acc = 0.0;
        for (m, c, cells) in &self.tiles {
            if (c - z).norm() > far {
                acc += m * kernel(*c, false);
            } else {
                acc += cells.iter().map(|(zeta, mass)| mass * kernel(*zeta, true)).sum::<f64>();
            }
        }
        acc
    }
}

/// Green potential on the nodes of `like`; nodes outside the closed disk
/// hold 0. Density tiles far from a node enter through their centroid.
/// Returns the field and whether any node sat on an atom.
pub fn green_field(mu: &MeasureSpec, disk: &DiskSpec, like: &GridField) -> Result<(GridField, bool)> {
    let atoms_only = MeasureSpec {
        atoms: mu.atoms.clone(),
        density: None,
    };
    let tiles = Tiles::new(mu, disk);
    let nodes: Vec<(f64, bool)> = (0..like.nx * like.ny)
        .into_par_iter()
        .map(|k| {
            let z = Complex::new(like.x(k % like.nx), like.y(k / like.nx));
            if disk.contains(z) {
                let g = green_potential(&atoms_only, disk, z)?;
                let d = tiles.as_ref().map_or(0.0, |t| t.green(disk, z));
                Ok((g.value + d, g.clipped))
            } else {
                Ok((0.0, false))
            }
        })
        .collect::<Result<_>>()?;
    let clipped = nodes.iter().any(|n| n.1);
    let values = nodes.into_iter().map(|n| n.0).collect();
    Ok((
        GridField::new(like.x0, like.y0, like.hx, like.hy, like.nx, like.ny, values)?,
        clipped,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RieszMeasure {
    /// Nonnegative part.
    pub measure: MeasureSpec,
    /// Negative dust removed from `measure`, stored with positive masses.
    pub negative: MeasureSpec,
    pub negative_mass: f64,
    /// Singular clusters too close to the grid edge to be paired.
    pub unresolved_clusters: usize,
}

impl RieszMeasure {
    pub fn total_mass(&self) -> f64 {
        self.measure.total_mass()
    }

    pub fn signed(&self) -> SignedMeasure {
        SignedMeasure {
            positive: self.measure.clone(),
            negative: self.negative.clone(),
        }
    }
}

const PLATEAU: f64 = 8.0;
const RAMP_END: f64 = 12.0;

/// Riesz measure `(1/2 pi) Delta u` of a sampled field.
///
/// Smooth parts come from the 5-point Laplacian. Nodes holding `-inf`, or
/// whose cell would carry more than 1/2 unit of mass, are grouped into
/// clusters; each cluster becomes one atom whose mass is the pairing
/// `(hx hy / 2 pi) sum u Delta_h psi` with a tent `psi` equal to 1 on the
/// cluster's neighbourhood, and the density is multiplied by `1 - psi`.
pub fn riesz_measure(u: &GridField) -> Result<RieszMeasure> {
    u.validate()?;
    let (nx, ny, hx, hy) = (u.nx, u.ny, u.hx, u.hy);
    if nx < 3 || ny < 3 {
        return invalid("riesz_measure needs at least a 3x3 grid");
    }
    if u.values.iter().all(|v| *v == f64::NEG_INFINITY) {
        return domain("grid holds only -inf samples");
    }
    let cell = hx * hy;
    let lap = |i: usize, j: usize| -> Option<f64> {
        if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            return None;
        }
        let c = u.get(i, j);
        let s = [u.get(i - 1, j), u.get(i + 1, j), u.get(i, j - 1), u.get(i, j + 1), c];
        if s.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let l = (s[0] + s[1] - 2.0 * c) / (hx * hx) + (s[2] + s[3] - 2.0 * c) / (hy * hy);
        // below the stencil's rounding noise
        let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let noise = 16.0 * f64::EPSILON * scale * (1.0 / (hx * hx) + 1.0 / (hy * hy));
        Some(if l.abs() <= noise { 0.0 } else { l })
    };
    let laps: Vec<Option<f64>> = (0..nx * ny).into_par_iter().map(|k| lap(k % nx, k / nx)).collect();

    let singular: Vec<(usize, usize)> = (0..nx * ny)
        .filter(|&k| u.values[k] == f64::NEG_INFINITY || laps[k].is_some_and(|l| l.abs() * cell / (2.0 * PI) > 0.5))
        .map(|k| (k % nx, k / nx))
        .collect();

    // clusters whose tents would overlap are merged
    let cheb = |a: (usize, usize), b: (usize, usize)| a.0.abs_diff(b.0).max(a.1.abs_diff(b.1));
    let link = (PLATEAU + RAMP_END) as usize + 1;
    let mut cluster_of = vec![usize::MAX; singular.len()];
    let mut clusters: Vec<Vec<(usize, usize)>> = Vec::new();
    for s in 0..singular.len() {
        if cluster_of[s] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![singular[s]];
        cluster_of[s] = id;
        let mut head = 0;
        while head < members.len() {
            let p = members[head];
            head += 1;
            for t in 0..singular.len() {
                if cluster_of[t] == usize::MAX && cheb(p, singular[t]) <= link {
                    cluster_of[t] = id;
                    members.push(singular[t]);
                }
            }
        }
        clusters.push(members);
    }

    let mut psi_total = vec![0.0; nx * ny];
    let mut atoms = Vec::new();
    let mut negative_atoms = Vec::new();
    let mut unresolved = 0;
    let mut blocked = vec![false; nx * ny];
    for members in &clusters {
        let margin = members
            .iter()
            .map(|&(i, j)| i.min(j).min(nx - 1 - i).min(ny - 1 - j))
            .min()
            .unwrap_or(0) as f64;
        let r2 = RAMP_END.min(margin);
        let r1 = PLATEAU.min(r2 - 1.0).max(1.0);
        if r2 < 2.0 || r2 <= r1 {
            unresolved += 1;
            for &(i, j) in members {
                for jj in j.saturating_sub(1)..=(j + 1).min(ny - 1) {
                    for ii in i.saturating_sub(1)..=(i + 1).min(nx - 1) {
                        blocked[u.idx(ii, jj)] = true;
                    }
                }
            }
            continue;
        }
        let ext = r2.ceil() as usize + 1;
        let (imin, imax) = members
            .iter()
            .fold((usize::MAX, 0), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (jmin, jmax) = members
            .iter()
            .fold((usize::MAX, 0), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let (i0, i1) = (imin.saturating_sub(ext), (imax + ext).min(nx - 1));
        let (j0, j1) = (jmin.saturating_sub(ext), (jmax + ext).min(ny - 1));
        let mut psi = vec![0.0; nx * ny];
        for j in j0..=j1 {
            for i in i0..=i1 {
                let d = members.iter().map(|&p| cheb(p, (i, j))).min().unwrap_or(usize::MAX) as f64;
                let v = if d <= r1 {
                    1.0
                } else if d < r2 {
                    (r2 - d) / (r2 - r1)
                } else {
                    0.0
                };
                psi[u.idx(i, j)] = v;
            }
        }
        let psi_at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                0.0
            } else {
                psi[j as usize * nx + i as usize]
            }
        };
        let mut pairing = 0.0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let (ii, jj) = (i as isize, j as isize);
                let c = psi_at(ii, jj);
                let d2 = (psi_at(ii - 1, jj) + psi_at(ii + 1, jj) - 2.0 * c) / (hx * hx)
                    + (psi_at(ii, jj - 1) + psi_at(ii, jj + 1) - 2.0 * c) / (hy * hy);
                if d2 != 0.0 {
                    pairing += u.get(i, j) * d2;
                }
            }
        }
        let mass = pairing * cell / (2.0 * PI);
        let sentinels: Vec<&(usize, usize)> = members
            .iter()
            .filter(|&&(i, j)| u.get(i, j) == f64::NEG_INFINITY)
            .collect();
        let z = if sentinels.is_empty() {
            let &(i, j) = members
                .iter()
                .max_by(|a, b| {
                    let la = laps[u.idx(a.0, a.1)].unwrap_or(0.0).abs();
                    let lb = laps[u.idx(b.0, b.1)].unwrap_or(0.0).abs();
                    la.total_cmp(&lb)
                })
                .expect("clusters are nonempty");
            Complex::new(u.x(i), u.y(j))
        } else {
            let n = sentinels.len() as f64;
            let (sx, sy) = sentinels
                .iter()
                .fold((0.0, 0.0), |(a, b), &&(i, j)| (a + u.x(i), b + u.y(j)));
            Complex::new(sx / n, sy / n)
        };
        if mass >= 0.0 {
            atoms.push(Atom { z, mass });
        } else {
            negative_atoms.push(Atom { z, mass: -mass });
        }
        for (t, p) in psi_total.iter_mut().zip(&psi) {
            *t = f64::max(*t, *p);
        }
    }

    let mut pos = vec![0.0; nx * ny];
    let mut neg = vec![0.0; nx * ny];
    for k in 0..nx * ny {
        if blocked[k] {
            continue;
        }
        if let Some(l) = laps[k] {
            let d = (1.0 - psi_total[k]) * l / (2.0 * PI);
            if d > 0.0 {
                pos[k] = d;
            } else if d < 0.0 {
                neg[k] = -d;
            }
        }
    }
    let negative_mass = neg.iter().sum::<f64>() * cell + negative_atoms.iter().map(|a| a.mass).sum::<f64>();
    let grid = |values| GridField::new(u.x0, u.y0, hx, hy, nx, ny, values);
    Ok(RieszMeasure {
        measure: MeasureSpec {
            atoms,
            density: Some(grid(pos)?),
        },
        negative: MeasureSpec {
            atoms: negative_atoms,
            density: Some(grid(neg)?),
        },
        negative_mass,
        unresolved_clusters: unresolved,
    })
}

/// `u = -G + H` on a disk: `G` is the Green potential of the Riesz measure
/// of `u`, `H` the Poisson integral of the boundary values of `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RieszDecomposition {
    pub disk: DiskSpec,
    pub sampled: GridField,
    pub green: GridField,
    pub harmonic: GridField,
    pub measure: RieszMeasure,
    pub green_clipped: bool,
    /// Riesz mass found on the bounding box but outside the disk.
    pub ignored_mass: f64,
}

impl RieszDecomposition {
    /// `max |u - (-G + H)|` over nodes with `|z - z0| <= frac R`, at distance
    /// at least `exclusion` from every atom and with finite `u`.
    pub fn residual(&self, frac: f64, exclusion: f64) -> f64 {
        let g = &self.sampled;
        let mut worst = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let z = Complex::new(g.x(i), g.y(j));
                if (z - self.disk.center).norm() > frac * self.disk.radius {
                    continue;
                }
                if self.measure.measure.atoms.iter().any(|a| (a.z - z).norm() < exclusion) {
                    continue;
                }
                let k = g.idx(i, j);
                let u = g.values[k];
                if !u.is_finite() {
                    continue;
                }
                worst = worst.max((u + self.green.values[k] - self.harmonic.values[k]).abs());
            }
        }
        worst
    }
}

const POISSON_NODES: usize = 4096;

pub fn riesz_decomposition(u: &FunctionExpr, disk: &DiskSpec, h: f64) -> Result<RieszDecomposition> {
    if !(h > 0.0 && h < disk.radius) {
        return invalid("grid step must satisfy 0 < h < R");
    }
    let rect = disk.bounding_rect();
    let yr = u.y_range();
    if !(yr.contains_interval(rect.y0, rect.y1)) {
        return domain("disk is not inside the domain of the function");
    }
    let n = ((rect.x1 - rect.x0) / h + 1e-9).floor() as usize + 1;
    let probe = GridField::from_fn(rect.x0, rect.y0, h, h, n, n, |x, y| {
        u.evaluate(Complex::new(x, y)).unwrap_or(f64::NAN)
    });
    if probe.values.iter().any(|v| v.is_nan()) {
        return domain("function could not be evaluated on the disk's bounding box");
    }
    let sampled = probe;
    let measure = riesz_measure(&sampled)?;
    let (green, green_clipped) = green_field(&measure.measure, disk, &sampled)?;
    let ignored_mass = measure.measure.mass_where(|z| !disk.contains(z));

    let r = disk.radius;
    let boundary: Vec<(Complex, f64)> = (0..POISSON_NODES)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / POISSON_NODES as f64;
            let w = Complex::from_polar(r, t);
            let v = u.evaluate(disk.center + w)?;
            Ok((w, clip_floor(v, DEFAULT_CLIP_FLOOR).0))
        })
        .collect::<Result<_>>()?;
    let harmonic = GridField::from_fn(sampled.x0, sampled.y0, h, h, n, n, |x, y| {
        let z = Complex::new(x, y) - disk.center;
        let rho2 = z.norm_sqr();
        if rho2 >= r * r {
            return 0.0;
        }
        let s: f64 = boundary
            .iter()
            .map(|(w, v)| v * (r * r - rho2) / (w - z).norm_sqr())
            .sum();
        s / POISSON_NODES as f64
    });
    Ok(RieszDecomposition {
        disk: *disk,
        sampled,
        green,
        harmonic,
        measure,
        green_clipped,
        ignored_mass,
    })
}
