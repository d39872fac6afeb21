//! Trained-model files: MLP checkpoints, Q-tables and training history.

use std::io::{Read, Write};
use std::path::Path;

use dqtrade_core::neural_net::{Layer, Mlp};
use dqtrade_core::rl_agents::{EpisodeStats, QTable, StateKey};

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DQTN";
const VERSION: u32 = 1;

/// Binary checkpoint: magic, version, layer-size count and sizes (all u32
/// LE), then each layer's weights row-major followed by its biases, as f64 LE.
pub fn write_checkpoint<W: Write>(net: &Mlp, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let sizes = net.layer_sizes();
    w.write_all(&(sizes.len() as u32).to_le_bytes())?;
    for &s in sizes {
        w.write_all(&(s as u32).to_le_bytes())?;
    }
    for layer in net.layers() {
        for v in layer.weights().iter().chain(layer.biases()) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Mlp> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io("<checkpoint>", e))?;
    let bad = |msg: &str| Error::Checkpoint(msg.to_string());
    let mut pos = 0;
    let mut take = |n: usize| -> Result<&[u8]> {
        let chunk = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated"))?;
        pos += n;
        Ok(chunk)
    };
    if take(4)? != MAGIC {
        return Err(bad("not a network checkpoint"));
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());
    let version = u32_at(take(4)?);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let count = u32_at(take(4)?) as usize;
    if count < 2 {
        return Err(bad("need at least two layer sizes"));
    }
    let mut sizes = Vec::with_capacity(count);
    for _ in 0..count {
        sizes.push(u32_at(take(4)?) as usize);
    }
    let mut layers = Vec::with_capacity(count - 1);
    for pair in sizes.windows(2) {
        let mut layer = Layer::zeros(pair[0], pair[1]);
        for v in layer.weights_mut().iter_mut() {
            *v = f64::from_le_bytes(take(8)?.try_into().unwrap());
        }
        for v in layer.biases_mut().iter_mut() {
            *v = f64::from_le_bytes(take(8)?.try_into().unwrap());
        }
        layers.push(layer);
    }
    if pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok(Mlp::from_layers(layers)?)
}

pub fn save_checkpoint(net: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(net, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Mlp> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(file)
}

/// Rows of `state_key,q_hold,q_buy,q_sell`, in key order.
pub fn write_qtable<W: Write>(table: &QTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["state_key", "q_hold", "q_buy", "q_sell"])?;
    for (key, q) in table.iter() {
        out.write_record([key.to_string(), q[0].to_string(), q[1].to_string(), q[2].to_string()])?;
    }
    out.flush().map_err(|e| Error::io("<qtable>", e))?;
    Ok(())
}

pub fn read_qtable<R: Read>(r: R) -> Result<QTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut table = QTable::new();
    for record in rdr.records() {
        let record = record?;
        let bad = || Error::Checkpoint(format!("bad q-table row {:?}", record));
        if record.len() != 4 {
            return Err(bad());
        }
        let key: StateKey = record[0].parse().map_err(|_| bad())?;
        let mut q = [0.0; 3];
        for (slot, field) in q.iter_mut().zip(record.iter().skip(1)) {
            *slot = field.parse().map_err(|_| bad())?;
        }
        table.set(key, q);
    }
    Ok(table)
}

/// Rows of `episode,epsilon,mean_loss,roi`; an empty `mean_loss` means no
/// update happened that episode.
pub fn write_history<W: Write>(history: &[EpisodeStats], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["episode", "epsilon", "mean_loss", "roi"])?;
    for h in history {
        out.write_record([
            h.episode.to_string(),
            h.epsilon.to_string(),
            h.mean_loss.map(|l| l.to_string()).unwrap_or_default(),
            h.roi.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<history>", e))?;
    Ok(())
}

pub fn read_history<R: Read>(r: R) -> Result<Vec<EpisodeStats>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let bad = || Error::Checkpoint(format!("bad history row {:?}", record));
        if record.len() != 4 {
            return Err(bad());
        }
        rows.push(EpisodeStats {
            episode: record[0].parse().map_err(|_| bad())?,
            epsilon: record[1].parse().map_err(|_| bad())?,
            mean_loss: match &record[2] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad())?),
            },
            roi: record[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let net = Mlp::new(&[10, 32, 32, 3], 42).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 4 * 4 + 8 * net.parameter_count());
        let back = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back, net);
        for (a, b) in back.layers().iter().zip(net.layers()) {
            for (x, y) in a.weights().iter().zip(b.weights()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn checkpoint_rejects_damage() {
        let net = Mlp::new(&[2, 3], 1).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        assert!(read_checkpoint(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_checkpoint(extra.as_slice()).is_err());
        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(read_checkpoint(wrong.as_slice()).is_err());
        wrong = buf;
        wrong[4] = 9;
        assert!(read_checkpoint(wrong.as_slice()).is_err());
    }

    #[test]
    fn qtable_round_trip() {
        let mut t = QTable::new();
        t.set(StateKey(vec![0, 2, 1]), [0.1, -1e-300, 0.30000000000000004]);
        t.set(StateKey(vec![1, 1, 1]), [0.0, 5.0, -2.5]);
        let mut buf = Vec::new();
        write_qtable(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("state_key,q_hold,q_buy,q_sell\n0-2-1,0.1,"));
        assert_eq!(read_qtable(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn history_round_trip() {
        let h = vec![
            EpisodeStats { episode: 1, epsilon: 1.0, mean_loss: None, roi: 0.0 },
            EpisodeStats { episode: 2, epsilon: 0.5, mean_loss: Some(0.125), roi: -0.03 },
        ];
        let mut buf = Vec::new();
        write_history(&h, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().contains("\n1,1,,0\n"));
        assert_eq!(read_history(buf.as_slice()).unwrap(), h);
    }
}
