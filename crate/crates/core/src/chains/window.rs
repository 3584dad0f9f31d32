use super::chain::SubgroupChain;
use super::coset::{coset_space, CosetSpace};
use crate::error::{invalid, Error, Result};

/// Largest stage index for which full distance tables are materialized.
pub const DEFAULT_TABLE_CAP: usize = 2048;

#[derive(Clone, Debug)]
pub struct Block {
    pub stage: usize,
    pub cosets: CosetSpace,
    pub table: Vec<Vec<u32>>,
    pub diameter: u32,
    /// C_n = n + Σ_{k ≤ n} diam(G/G_k) over the window.
    pub constant: u64,
}

/// A finite window of the box space: stages n0..=n1 with their quotient
/// metrics, blocks separated by C_n + C_m.
#[derive(Clone, Debug)]
pub struct BoxWindow {
    pub blocks: Vec<Block>,
}

pub fn box_window(chain: &SubgroupChain, n0: usize, n1: usize, table_cap: usize) -> Result<BoxWindow> {
    if n0 > n1 {
        return invalid(format!("empty window {n0}..{n1}"));
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut running = 0u64;
    for n in n0..=n1 {
        let cosets = coset_space(chain, n, table_cap)?;
        if cosets.index() > table_cap {
            return Err(Error::Cap { cap: table_cap });
        }
        let table: Vec<Vec<u32>> = (0..cosets.index())
            .map(|i| {
                cosets
                    .distances_from(i, None)
                    .into_iter()
                    .map(|d| d.expect("connected"))
                    .collect()
            })
            .collect();
        let diameter = table.iter().flatten().copied().max().unwrap_or(0);
        running += u64::from(diameter);
        blocks.push(Block {
            stage: n,
            cosets,
            table,
            diameter,
            constant: n as u64 + running,
        });
    }
    Ok(BoxWindow { blocks })
}

impl BoxWindow {
    fn block(&self, n: usize) -> Result<&Block> {
        self.blocks
            .iter()
            .find(|b| b.stage == n)
            .ok_or_else(|| Error::Invalid(format!("stage {n} not in window")))
    }

    /// Distance between coset `i` of stage `n` and coset `j` of stage `m`.
    pub fn distance(&self, n: usize, i: usize, m: usize, j: usize) -> Result<u64> {
        let bn = self.block(n)?;
        if n == m {
            return Ok(u64::from(bn.table[i][j]));
        }
        Ok(bn.constant + self.block(m)?.constant)
    }

    pub fn block_distance(&self, n: usize, m: usize) -> Result<u64> {
        Ok(self.block(n)?.constant + self.block(m)?.constant)
    }
}
