//! Payoff table persistence.
//!
//! JSON format:
//! `{"players": K, "strategy_counts": [..], "payoffs": [one nested array
//! per player, indexed s^1, ..., s^K], "m_max": float}`.
//!
//! CSV format (two-player games only): one file per player holding the
//! `|S^1| x |S^2|` grid, with a header row naming the opponent (player-2)
//! strategies and a leading column naming the player-1 strategies.
//!
//! Floats survive a save/load round trip bit-exactly.

use super::{GameShape, PayoffTensor};
use crate::{Error, Result};
use serde_json::{json, Value};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
}

pub fn save_table_json(game: &PayoffTensor, path: impl AsRef<Path>) -> Result<()> {
    let value = to_json(game);
    std::fs::write(path, serde_json::to_string_pretty(&value).unwrap() + "\n")?;
    Ok(())
}

pub fn load_table_json(path: impl AsRef<Path>) -> Result<PayoffTensor> {
    let text = std::fs::read_to_string(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("bad JSON: {e}")))?;
    from_json(&value)
}

pub fn to_json(game: &PayoffTensor) -> Value {
    let shape = game.shape();
    let payoffs: Vec<Value> = (0..shape.num_players())
        .map(|k| nest(game.player_tensor(k), shape.strategy_counts()))
        .collect();
    json!({
        "players": shape.num_players(),
        "strategy_counts": shape.strategy_counts(),
        "payoffs": payoffs,
        "m_max": game.m_max(),
    })
}

pub fn from_json(value: &Value) -> Result<PayoffTensor> {
    let players = value["players"]
        .as_u64()
        .ok_or_else(|| Error::Format("missing 'players'".into()))? as usize;
    let counts: Vec<usize> = value["strategy_counts"]
        .as_array()
        .ok_or_else(|| Error::Format("missing 'strategy_counts'".into()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::Format("bad strategy count".into()))
        })
        .collect::<Result<_>>()?;
    if counts.len() != players {
        return Err(Error::Format(format!(
            "'players' is {players} but {} strategy counts given",
            counts.len()
        )));
    }
    let shape = GameShape::new(counts)?;
    let m_max = value["m_max"]
        .as_f64()
        .ok_or_else(|| Error::Format("missing 'm_max'".into()))?;
    let arrays = value["payoffs"]
        .as_array()
        .ok_or_else(|| Error::Format("missing 'payoffs'".into()))?;
    if arrays.len() != players {
        return Err(Error::Format("one payoff tensor per player required".into()));
    }
    let payoffs = arrays
        .iter()
        .map(|a| {
            let mut flat = Vec::with_capacity(shape.num_profiles());
            flatten(a, shape.strategy_counts(), &mut flat)?;
            Ok(flat)
        })
        .collect::<Result<_>>()?;
    PayoffTensor::new(shape, payoffs, m_max)
}

fn nest(flat: &[f64], counts: &[usize]) -> Value {
    if counts.len() == 1 {
        return Value::Array(flat.iter().map(|&v| json!(v)).collect());
    }
    let chunk = flat.len() / counts[0];
    Value::Array(
        flat.chunks(chunk)
            .map(|c| nest(c, &counts[1..]))
            .collect(),
    )
}

fn flatten(value: &Value, counts: &[usize], out: &mut Vec<f64>) -> Result<()> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::Format("payoffs must be nested arrays".into()))?;
    if arr.len() != counts[0] {
        return Err(Error::Format(format!(
            "payoff axis has {} entries, expected {}",
            arr.len(),
            counts[0]
        )));
    }
    if counts.len() == 1 {
        for v in arr {
            out.push(
                v.as_f64()
                    .ok_or_else(|| Error::Format("non-numeric payoff".into()))?,
            );
        }
    } else {
        for v in arr {
            flatten(v, &counts[1..], out)?;
        }
    }
    Ok(())
}

/// Save a two-player game as one CSV grid per player.
pub fn save_table_csv(
    game: &PayoffTensor,
    path_p1: impl AsRef<Path>,
    path_p2: impl AsRef<Path>,
) -> Result<()> {
    let shape = game.shape();
    if shape.num_players() != 2 {
        return Err(Error::input("CSV format is limited to two-player games"));
    }
    let (rows, cols) = (shape.strategy_counts()[0], shape.strategy_counts()[1]);
    for (k, path) in [path_p1.as_ref(), path_p2.as_ref()].into_iter().enumerate() {
        let mut text = String::new();
        text.push_str("strategy");
        for j in 0..cols {
            text.push_str(&format!(",s{j}"));
        }
        text.push('\n');
        for i in 0..rows {
            text.push_str(&format!("s{i}"));
            for j in 0..cols {
                // shortest representation that round-trips the f64 exactly
                text.push_str(&format!(",{:?}", game.get_flat(k, i * cols + j)));
            }
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    Ok(())
}

/// Load a two-player game from one CSV grid per player.
pub fn load_table_csv(
    path_p1: impl AsRef<Path>,
    path_p2: impl AsRef<Path>,
    m_max: f64,
) -> Result<PayoffTensor> {
    let mut matrices = Vec::new();
    for path in [path_p1.as_ref(), path_p2.as_ref()] {
        let text = std::fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if idx == 0 || line.trim().is_empty() {
                continue; // header
            }
            let cells: Vec<&str> = line.split(',').collect();
            let row: Vec<f64> = cells[1..]
                .iter()
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Format(format!("bad payoff '{c}': {e}")))
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        matrices.push(rows);
    }
    let m2 = matrices.pop().unwrap();
    let m1 = matrices.pop().unwrap();
    PayoffTensor::from_matrices(m1, m2, m_max)
}
