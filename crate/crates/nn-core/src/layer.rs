use crate::NnError;

/// One affine layer `y = W x + b` with integer entries, stored in CSR form
/// (contiguous entry arrays plus row offsets): compiled layers are
/// near-identity, and evaluation walks millions of shared layer references,
/// so the row data must be flat and cache-friendly. Rows are normalized
/// (sorted by column, duplicates merged, zeros dropped) so structurally
/// equal layers compare and hash equal.
#[derive(Debug, Clone)]
pub struct Layer {
    in_width: u32,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    coeffs: Vec<i64>,
    bias: Vec<i64>,
    /// max over rows of sum of |weights|, saturating; with `growth_b` this
    /// bounds the output magnitude given an input magnitude bound, letting
    /// evaluation prove a whole layer overflow-free with one comparison.
    growth_a: i64,
    /// max |bias|.
    growth_b: i64,
}

impl PartialEq for Layer {
    fn eq(&self, other: &Self) -> bool {
        self.in_width == other.in_width
            && self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.coeffs == other.coeffs
            && self.bias == other.bias
    }
}

impl Eq for Layer {}

impl std::hash::Hash for Layer {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.in_width.hash(state);
        self.row_ptr.hash(state);
        self.cols.hash(state);
        self.coeffs.hash(state);
        self.bias.hash(state);
    }
}

impl Layer {
    pub fn new(
        in_width: usize,
        rows: Vec<Vec<(usize, i64)>>,
        bias: Vec<i64>,
    ) -> Result<Layer, NnError> {
        if bias.len() != rows.len() {
            return Err(NnError::BiasMismatch {
                rows: rows.len(),
                bias: bias.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut coeffs = Vec::new();
        row_ptr.push(0u32);
        for row in rows {
            let mut entries: Vec<(u32, i64)> = Vec::with_capacity(row.len());
            for (col, coeff) in row {
                if col >= in_width {
                    return Err(NnError::ColumnOutOfRange {
                        col,
                        width: in_width,
                    });
                }
                entries.push((col as u32, coeff));
            }
            entries.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(entries.len());
            for (c, w) in entries {
                match merged.last_mut() {
                    Some((lc, lw)) if *lc == c => *lw += w,
                    _ => merged.push((c, w)),
                }
            }
            for (c, w) in merged {
                if w != 0 {
                    cols.push(c);
                    coeffs.push(w);
                }
            }
            row_ptr.push(cols.len() as u32);
        }
        Ok(Layer {
            in_width: in_width as u32,
            row_ptr,
            cols,
            coeffs,
            bias,
        })
    }

    pub fn from_dense(weights: &[Vec<i64>], bias: Vec<i64>) -> Result<Layer, NnError> {
        let in_width = weights.first().map(|r| r.len()).unwrap_or(0);
        let rows = weights
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0)
                    .map(|(c, w)| (c, *w))
                    .collect()
            })
            .collect();
        Layer::new(in_width, rows, bias)
    }

    pub fn identity(width: usize) -> Layer {
        Layer::new(
            width,
            (0..width).map(|i| vec![(i, 1)]).collect(),
            vec![0; width],
        )
        .expect("identity layer is well formed")
    }

    pub fn in_width(&self) -> usize {
        self.in_width as usize
    }

    pub fn out_width(&self) -> usize {
        self.bias.len()
    }

    pub fn bias(&self) -> &[i64] {
        &self.bias
    }

    #[inline]
    pub(crate) fn raw(&self) -> (&[u32], &[u32], &[i64], &[i64]) {
        (&self.row_ptr, &self.cols, &self.coeffs, &self.bias)
    }

    /// Sparse entries of one row, in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let lo = self.row_ptr[r] as usize;
        let hi = self.row_ptr[r + 1] as usize;
        self.cols[lo..hi]
            .iter()
            .zip(&self.coeffs[lo..hi])
            .map(|(c, w)| (*c as usize, *w))
    }

    /// Dense weight entry at (row, col); zero where no pair is stored.
    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.row(row)
            .find(|(c, _)| *c == col)
            .map(|(_, w)| w)
            .unwrap_or(0)
    }

    /// Row-major dense iteration over all `out_width * in_width` entries.
    pub fn dense_entries(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.out_width()).flat_map(move |r| {
            let mut dense = vec![0i64; self.in_width as usize];
            for (c, w) in self.row(r) {
                dense[c] = w;
            }
            dense.into_iter()
        })
    }

    pub fn max_abs_entry(&self) -> i64 {
        let w = self.coeffs.iter().map(|w| w.abs()).max().unwrap_or(0);
        let b = self.bias.iter().map(|b| b.abs()).max().unwrap_or(0);
        w.max(b)
    }

    /// Dense parameter count: every weight entry plus every bias entry.
    pub fn param_count(&self) -> u128 {
        self.out_width() as u128 * self.in_width as u128 + self.bias.len() as u128
    }

    /// The source column when the row is a plain copy of one coordinate.
    pub fn passthrough_source(&self, row: usize) -> Option<usize> {
        if self.bias[row] != 0 {
            return None;
        }
        let lo = self.row_ptr[row] as usize;
        let hi = self.row_ptr[row + 1] as usize;
        if hi - lo == 1 && self.coeffs[lo] == 1 {
            Some(self.cols[lo] as usize)
        } else {
            None
        }
    }

    /// Widen by `extra` coordinates carried through unchanged: block form
    /// `[W 0; 0 I]` with the identity block of order `extra`.
    pub fn widened(&self, extra: usize) -> Layer {
        let n = self.in_width as usize;
        let mut rows: Vec<Vec<(usize, i64)>> = (0..self.out_width())
            .map(|r| self.row(r).collect())
            .collect();
        let mut bias = self.bias.clone();
        for q in 0..extra {
            rows.push(vec![(n + q, 1)]);
            bias.push(0);
        }
        Layer::new(n + extra, rows, bias).expect("widened layer is well formed")
    }
}
