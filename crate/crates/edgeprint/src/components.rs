//! 8-connectivity connected components over binary edge maps.
//!
//! Labeling is the classic two-pass scheme: a raster scan assigns
//! provisional labels while recording equivalences between neighboring
//! labels in a union-find forest, then a second pass rewrites every pixel to
//! a dense label in `1..=count` (0 stays background). Dense labels are
//! numbered by first appearance in row-major order.
//!
//! The edginess of a map is the number of components that survive a minimum
//! size filter; tiny specks are treated as noise rather than line texture.

use crate::edges::EdgeMap;

/// Labeled component map. `labels` is row-major; 0 is background and
/// components are `1..=component_count()`. `sizes[i]` is the pixel count of
/// component `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl LabeledMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        debug_assert!(x < self.width && y < self.height);
        self.labels[y * self.width + x]
    }
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new() -> Self {
        DisjointSets { parent: Vec::new() }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // Path halving keeps the forest shallow without recursion.
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Root at the smaller id so first-appearance order survives.
            if ra < rb {
                self.parent[rb as usize] = ra;
            } else {
                self.parent[ra as usize] = rb;
            }
        }
    }
}

/// Labels 8-connected components of the edge pixels. Two edge pixels belong
/// to the same component when one lies in the other's 3x3 neighborhood.
pub fn label8(edges: &EdgeMap) -> LabeledMap {
    let (w, h) = (edges.width(), edges.height());
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSets::new();

    // First pass: provisional labels from the already-scanned neighbors
    // (west, northwest, north, northeast).
    for y in 0..h {
        for x in 0..w {
            if !edges.get(x, y) {
                continue;
            }
            let mut neighbor_label: Option<u32> = None;
            let mut consider = |lbl: u32, sets: &mut DisjointSets| match neighbor_label {
                None => neighbor_label = Some(lbl),
                Some(first) => sets.union(first, lbl),
            };
            if x > 0 && edges.get(x - 1, y) {
                consider(provisional[y * w + x - 1], &mut sets);
            }
            if y > 0 {
                if x > 0 && edges.get(x - 1, y - 1) {
                    consider(provisional[(y - 1) * w + x - 1], &mut sets);
                }
                if edges.get(x, y - 1) {
                    consider(provisional[(y - 1) * w + x], &mut sets);
                }
                if x + 1 < w && edges.get(x + 1, y - 1) {
                    consider(provisional[(y - 1) * w + x + 1], &mut sets);
                }
            }
            provisional[y * w + x] = match neighbor_label {
                Some(lbl) => lbl,
                None => sets.make_set(),
            };
        }
    }

    // Second pass: resolve roots to dense labels in first-appearance order
    // and tally sizes.
    let mut dense_of_root = vec![0u32; sets.parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut sizes: Vec<usize> = Vec::new();
    for (i, &p) in provisional.iter().enumerate() {
        if !edges.bits()[i] {
            continue;
        }
        let root = sets.find(p) as usize;
        let mut dense = dense_of_root[root];
        if dense == 0 {
            sizes.push(0);
            dense = sizes.len() as u32;
            dense_of_root[root] = dense;
        }
        labels[i] = dense;
        sizes[(dense - 1) as usize] += 1;
    }

    LabeledMap {
        width: w,
        height: h,
        labels,
        sizes,
    }
}

/// Keeps only pixels whose component has at least `min_size` pixels.
pub fn filter_small(labeled: &LabeledMap, min_size: usize) -> EdgeMap {
    assert!(min_size >= 1, "min_size must be at least 1");
    let keep: Vec<bool> = labeled.sizes.iter().map(|&s| s >= min_size).collect();
    EdgeMap::from_bits(
        labeled.width,
        labeled.height,
        labeled
            .labels
            .iter()
            .map(|&l| l != 0 && keep[(l - 1) as usize])
            .collect(),
    )
}

/// Edginess: number of 8-connected components with at least `min_size`
/// pixels.
pub fn edginess(edges: &EdgeMap, min_size: usize) -> usize {
    assert!(min_size >= 1, "min_size must be at least 1");
    label8(edges)
        .sizes
        .iter()
        .filter(|&&s| s >= min_size)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map_from_str(rows: &[&str]) -> EdgeMap {
        let h = rows.len();
        let w = rows[0].len();
        EdgeMap::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn empty_map_has_no_components() {
        let map = EdgeMap::from_fn(4, 3, |_, _| false);
        let labeled = label8(&map);
        assert_eq!(labeled.component_count(), 0);
        assert_eq!(edginess(&map, 1), 0);
    }

    #[test]
    fn full_map_is_one_component() {
        let map = EdgeMap::from_fn(5, 4, |_, _| true);
        let labeled = label8(&map);
        assert_eq!(labeled.component_count(), 1);
        assert_eq!(labeled.sizes(), &[20]);
    }

    #[test]
    fn diagonal_pixels_connect() {
        let map = map_from_str(&[
            "#..",
            ".#.",
            "..#",
        ]);
        assert_eq!(label8(&map).component_count(), 1);
    }

    #[test]
    fn single_pixel_gap_separates() {
        let map = map_from_str(&[
            "##.##",
        ]);
        let labeled = label8(&map);
        assert_eq!(labeled.component_count(), 2);
        assert_eq!(labeled.sizes(), &[2, 2]);
    }

    #[test]
    fn u_shape_merges_into_one_component() {
        // The two arms get distinct provisional labels that the base row
        // must reconcile; a one-pass scan without equivalences gets this wrong.
        let map = map_from_str(&[
            "#.#",
            "#.#",
            "###",
        ]);
        let labeled = label8(&map);
        assert_eq!(labeled.component_count(), 1);
        assert_eq!(labeled.sizes(), &[7]);
    }

    #[test]
    fn labels_are_dense_and_scan_ordered() {
        let map = map_from_str(&[
            "#..#",
            "....",
            "#...",
        ]);
        let labeled = label8(&map);
        assert_eq!(labeled.component_count(), 3);
        assert_eq!(labeled.label(0, 0), 1);
        assert_eq!(labeled.label(3, 0), 2);
        assert_eq!(labeled.label(0, 2), 3);
    }

    #[test]
    fn filter_drops_small_components() {
        // Component sizes 3, 7, and 12; min_size 5 keeps 7 + 12 = 19 pixels.
        let map = map_from_str(&[
            "###..#######....",
            "................",
            "............####",
            "............####",
            "............####",
        ]);
        let labeled = label8(&map);
        let mut sizes = labeled.sizes().to_vec();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 7, 12]);
        let filtered = filter_small(&labeled, 5);
        assert_eq!(filtered.edge_count(), 19);
        assert_eq!(edginess(&map, 5), 2);
        // Count-after-filtering, not before.
        assert_eq!(edginess(&map, 1), 3);
        assert_eq!(edginess(&map, 13), 0);
    }

    #[test]
    fn filtered_map_relabels_densely() {
        let map = map_from_str(&[
            "#.###",
        ]);
        let labeled = label8(&map);
        assert_eq!(labeled.sizes(), &[1, 3]);
        let filtered = filter_small(&labeled, 2);
        let relabeled = label8(&filtered);
        assert_eq!(relabeled.component_count(), 1);
        assert_eq!(relabeled.label(2, 0), 1);
    }

    fn arb_map(max: usize) -> impl Strategy<Value = EdgeMap> {
        (1usize..max, 1usize..max, any::<u64>(), 1u64..9).prop_map(|(w, h, seed, density)| {
            let mut state = seed | 1;
            EdgeMap::from_fn(w, h, |_, _| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 60) < density
            })
        })
    }

    proptest! {
        // Scan order must not matter: transposing the map transposes labels
        // but preserves the component size multiset.
        #[test]
        fn transpose_preserves_component_sizes(map in arb_map(24)) {
            let t = EdgeMap::from_fn(map.height(), map.width(), |x, y| map.get(y, x));
            let mut a = label8(&map).sizes().to_vec();
            let mut b = label8(&t).sizes().to_vec();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }

        // Maps placed in disjoint halves with a blank separator column count
        // independently.
        #[test]
        fn edginess_adds_across_a_blank_gutter(a in arb_map(12), b in arb_map(12), min in 1usize..4) {
            let w = a.width() + 1 + b.width();
            let h = a.height().max(b.height());
            let joined = EdgeMap::from_fn(w, h, |x, y| {
                if x < a.width() {
                    y < a.height() && a.get(x, y)
                } else if x == a.width() {
                    false
                } else {
                    y < b.height() && b.get(x - a.width() - 1, y)
                }
            });
            prop_assert_eq!(edginess(&joined, min), edginess(&a, min) + edginess(&b, min));
        }

        // Raising min_size never increases the count.
        #[test]
        fn edginess_is_monotone_in_min_size(map in arb_map(20), m1 in 1usize..6, m2 in 1usize..6) {
            let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            prop_assert!(edginess(&map, lo) >= edginess(&map, hi));
        }

        // Sizes always total the edge pixel count.
        #[test]
        fn sizes_sum_to_edge_count(map in arb_map(20)) {
            let labeled = label8(&map);
            prop_assert_eq!(labeled.sizes().iter().sum::<usize>(), map.edge_count());
        }
    }
}
