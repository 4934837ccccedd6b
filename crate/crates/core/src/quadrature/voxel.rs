use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bingmap::LEVEL_PER_IMAGE_NORM;
use crate::coords::CartPoint;
use crate::map::SmoothMap;
use crate::sampling::{par_map, CartBox};
use crate::{Error, Result};

/// Resolution retries after an empty, boundary-touching or split fine grid.
const RETRIES: usize = 2;

/// Where and how finely to look for `h⁻¹ B(y, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    /// Must contain the preimage.
    pub bbox: CartBox,
    /// Lipschitz bound of the map on `bbox`, used to inflate the ball on the
    /// coarse pass so that no preimage cell is missed.
    pub lipschitz: f64,
}

impl GridSpec {
    /// Box and Lipschitz bound for the map `h`, from properness: a preimage
    /// of `B(y, ρ)` has torus level at most `2.5 (|y| + ρ)`, and `‖Dh‖ <=
    /// 2 + 2c` up to level `c`.
    pub fn bing(y: CartPoint, radius: f64, resolution: usize) -> Self {
        let c = LEVEL_PER_IMAGE_NORM * (y.norm() + radius) + 0.05;
        let r = 1.0 + c;
        GridSpec { resolution, bbox: CartBox { lo: [-r, -r, -c], hi: [r, r, c] }, lipschitz: 2.0 + 2.0 * c }
    }
}

/// Subdivision levels used to look for a preimage point inside a voxel whose
/// centre misses.
pub const REFINE_DEPTH: usize = 3;

/// Voxels meeting `{x : |f(x) - y| < radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub res: [usize; 3],
    pub bbox: CartBox,
    pub occupied: Vec<bool>,
}

fn local_lipschitz<M: SmoothMap + ?Sized>(map: &M, global: f64, x: CartPoint, radius: f64) -> f64 {
    map.lipschitz_near(x, radius).map_or(global, |l| l.min(global))
}

/// Whether the box `centre ± half` holds a point with `|f(x) - y| < radius`,
/// searching `depth` halvings and pruning with the Lipschitz bound.
fn meets<M: SmoothMap + ?Sized>(
    map: &M,
    y: CartPoint,
    radius: f64,
    lipschitz: f64,
    centre: CartPoint,
    half: [f64; 3],
    depth: usize,
) -> bool {
    let d = map.apply(centre).dist(y);
    if d < radius {
        return true;
    }
    let diag = (half[0] * half[0] + half[1] * half[1] + half[2] * half[2]).sqrt();
    let reach = local_lipschitz(map, lipschitz, centre, diag) * diag;
    if depth == 0 || d >= radius + reach {
        return false;
    }
    let h = half.map(|v| 0.5 * v);
    (0..8).any(|o| {
        let c = CartPoint::new(
            centre.x + if o & 1 == 0 { -h[0] } else { h[0] },
            centre.y + if o & 2 == 0 { -h[1] } else { h[1] },
            centre.z + if o & 4 == 0 { -h[2] } else { h[2] },
        );
        meets(map, y, radius, lipschitz, c, h, depth - 1)
    })
}

impl VoxelGrid {
    /// Occupancy by voxel centre only.
    pub fn build<M: SmoothMap + ?Sized>(map: &M, y: CartPoint, radius: f64, bbox: CartBox, res: [usize; 3]) -> Self {
        Self::build_refined(map, y, radius, bbox, res, 0.0, 0)
    }

    /// Occupancy by any point found within `depth` subdivisions.
    pub fn build_refined<M: SmoothMap + ?Sized>(
        map: &M,
        y: CartPoint,
        radius: f64,
        bbox: CartBox,
        res: [usize; 3],
        lipschitz: f64,
        depth: usize,
    ) -> Self {
        Self::build_with(bbox, res, |x, half| meets(map, y, radius, lipschitz, x, half, depth))
    }

    /// Occupancy from a predicate on voxel centre and half-widths.
    pub fn build_with<P: Fn(CartPoint, [f64; 3]) -> bool + Sync>(bbox: CartBox, res: [usize; 3], occupied: P) -> Self {
        let [nx, ny, nz] = res;
        let half: [f64; 3] = core::array::from_fn(|a| 0.5 * (bbox.hi[a] - bbox.lo[a]) / res[a] as f64);
        let slices = par_map(nz, |k| {
            let mut s = vec![false; nx * ny];
            for j in 0..ny {
                for i in 0..nx {
                    s[i + nx * j] = occupied(Self::center_of(&bbox, res, [i, j, k]), half);
                }
            }
            s
        });
        VoxelGrid { res, bbox, occupied: slices.concat() }
    }

    fn center_of(bbox: &CartBox, res: [usize; 3], idx: [usize; 3]) -> CartPoint {
        bbox.at(core::array::from_fn(|a| (idx[a] as f64 + 0.5) / res[a] as f64))
    }

    pub fn center(&self, idx: [usize; 3]) -> CartPoint {
        Self::center_of(&self.bbox, self.res, idx)
    }

    pub fn cell(&self) -> [f64; 3] {
        core::array::from_fn(|a| (self.bbox.hi[a] - self.bbox.lo[a]) / self.res[a] as f64)
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.res[0] * (j + self.res[1] * k)
    }

    fn unindex(&self, n: usize) -> [usize; 3] {
        let [nx, ny, _] = self.res;
        [n % nx, (n / nx) % ny, n / (nx * ny)]
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    pub fn touches_boundary(&self) -> bool {
        self.occupied.iter().enumerate().any(|(n, &b)| {
            b && {
                let idx = self.unindex(n);
                (0..3).any(|a| idx[a] == 0 || idx[a] + 1 == self.res[a])
            }
        })
    }

    /// Inclusive index bounds of the occupied voxels.
    pub fn occupied_bounds(&self) -> Option<([usize; 3], [usize; 3])> {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0; 3];
        let mut any = false;
        for (n, _) in self.occupied.iter().enumerate().filter(|(_, &b)| b) {
            any = true;
            let idx = self.unindex(n);
            for a in 0..3 {
                lo[a] = lo[a].min(idx[a]);
                hi[a] = hi[a].max(idx[a]);
            }
        }
        any.then_some((lo, hi))
    }

    /// Number of 6-connected components of occupied voxels.
    pub fn components(&self) -> usize {
        let [nx, ny, nz] = self.res;
        let mut seen = vec![false; self.occupied.len()];
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..self.occupied.len() {
            if !self.occupied[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(n) = stack.pop() {
                let [i, j, k] = self.unindex(n);
                let mut visit = |m: usize| {
                    if self.occupied[m] && !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                };
                if i > 0 {
                    visit(self.index(i - 1, j, k));
                }
                if i + 1 < nx {
                    visit(self.index(i + 1, j, k));
                }
                if j > 0 {
                    visit(self.index(i, j - 1, k));
                }
                if j + 1 < ny {
                    visit(self.index(i, j + 1, k));
                }
                if k > 0 {
                    visit(self.index(i, j, k - 1));
                }
                if k + 1 < nz {
                    visit(self.index(i, j, k + 1));
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub components: usize,
    pub occupied: usize,
    pub resolution: usize,
    /// Box of the fine grid.
    pub bbox: CartBox,
    pub retries: usize,
    /// Whether centre sampling split the preimage and subdivision was used.
    pub refined: bool,
}

/// Shrinking passes on the coarse grid; one more follows at full resolution.
const MAX_SHRINK: usize = 6;

/// Resolution of the first shrinking passes.
const COARSE_RES: usize = 32;

/// Connected components of `f⁻¹ B(y, radius)` on a voxel grid.
///
/// Passes with the ball inflated by `lipschitz × half cell diagonal` keep
/// every cell that can meet the preimage; each pass shrinks the box to those
/// cells (padded by one) until it stops shrinking. On the final grid a voxel
/// is occupied when its centre lies in the preimage. If that splits the
/// preimage, every voxel is searched again on up to [`REFINE_DEPTH`]
/// Lipschitz-pruned subdivisions, which only adds voxels that meet it. A
/// split that survives this is retried at a finer resolution while retries
/// remain.
pub fn preimage_components<M: SmoothMap + ?Sized>(map: &M, y: CartPoint, radius: f64, spec: &GridSpec) -> Result<ComponentReport> {
    if !(radius > 0.0) {
        return Err(Error::OutOfRange("radius must be positive"));
    }
    if spec.resolution < 8 {
        return Err(Error::OutOfRange("resolution must be at least 8"));
    }
    let mut res = spec.resolution;
    for retries in 0..=RETRIES {
        let coarse = shrink_box(map, y, radius, spec.bbox, spec.lipschitz, COARSE_RES.min(res), MAX_SHRINK);
        let Some(bbox) = coarse.and_then(|b| shrink_box(map, y, radius, b, spec.lipschitz, res, 1)) else {
            res = res * 3 / 2;
            continue;
        };
        let mut fine = VoxelGrid::build(map, y, radius, bbox, [res; 3]);
        let mut components = fine.components();
        let refined = components > 1;
        if refined {
            fine = VoxelGrid::build_refined(map, y, radius, bbox, [res; 3], spec.lipschitz, REFINE_DEPTH);
            components = fine.components();
        }
        let split_again = refined && components > 1 && retries < RETRIES;
        if fine.count() == 0 || fine.touches_boundary() || split_again {
            res = res * 3 / 2;
            continue;
        }
        return Ok(ComponentReport { components, occupied: fine.count(), resolution: res, bbox, retries, refined });
    }
    Err(Error::GridTooCoarse)
}

fn shrink_box<M: SmoothMap + ?Sized>(
    map: &M,
    y: CartPoint,
    radius: f64,
    start: CartBox,
    lipschitz: f64,
    res: usize,
    passes: usize,
) -> Option<CartBox> {
    let mut bbox = start;
    for _ in 0..passes {
        let cell: [f64; 3] = core::array::from_fn(|a| (bbox.hi[a] - bbox.lo[a]) / res as f64);
        let grid = VoxelGrid::build_with(bbox, [res; 3], |x, half| {
            let diag = (half[0] * half[0] + half[1] * half[1] + half[2] * half[2]).sqrt();
            map.apply(x).dist(y) < radius + local_lipschitz(map, lipschitz, x, diag) * diag
        });
        let (lo, hi) = grid.occupied_bounds()?;
        let next = CartBox {
            lo: core::array::from_fn(|a| bbox.lo[a] + (lo[a] as f64 - 1.0) * cell[a]),
            hi: core::array::from_fn(|a| bbox.lo[a] + (hi[a] as f64 + 2.0) * cell[a]),
        };
        let shrunk = (0..3).any(|a| next.hi[a] - next.lo[a] < 0.9 * (bbox.hi[a] - bbox.lo[a]));
        bbox = next;
        if !shrunk {
            break;
        }
    }
    Some(bbox)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bingmap::BingMap;
    use crate::SquareFirstCoordinate;

    #[test]
    fn control_map_has_two_components() {
        let spec = GridSpec { resolution: 48, bbox: CartBox::new([-2.0; 3], [2.0; 3]).unwrap(), lipschitz: 4.0 };
        let rep = preimage_components(&SquareFirstCoordinate, CartPoint::new(1.0, 0.0, 0.0), 0.1, &spec).unwrap();
        assert_eq!(rep.components, 2);
    }

    #[test]
    fn figure_eight_ball_is_connected() {
        let y = CartPoint::new(-0.5, 0.0, 0.0);
        let rep = preimage_components(&BingMap, y, 0.1, &GridSpec::bing(y, 0.1, 64)).unwrap();
        assert_eq!(rep.components, 1, "{rep:?}");
    }

    #[test]
    fn generic_ball_is_connected() {
        let y = CartPoint::new(-0.05, 0.05, 0.125);
        let rep = preimage_components(&BingMap, y, 0.05, &GridSpec::bing(y, 0.05, 64)).unwrap();
        assert_eq!(rep.components, 1, "{rep:?}");
    }

    #[test]
    fn split_grid_counts() {
        let mut g = VoxelGrid { res: [4, 1, 1], bbox: CartBox::new([0.0; 3], [1.0; 3]).unwrap(), occupied: vec![true, false, true, true] };
        assert_eq!(g.components(), 2);
        g.occupied[1] = true;
        assert_eq!(g.components(), 1);
    }
}
