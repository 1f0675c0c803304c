//! CSV field snapshots with a JSON metadata sidecar.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ClebschError, ClebschFieldState, VelocityField};
use crate::thermo::BarotropicEos;

/// Grid and physics metadata written next to each snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub dim: usize,
    pub eos: BarotropicEos,
    pub k: f64,
    pub c: f64,
}

impl SnapshotMeta {
    pub fn from_state(s: &ClebschFieldState) -> Self {
        Self {
            n: s.grid.n,
            length: s.grid.length,
            dim: s.grid.dim,
            eos: s.params.eos,
            k: s.params.k,
            c: s.params.c,
        }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<(), ClebschError> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// Writes `t,i[,j],x[,y],rho,alpha,beta,nu,vx[,vy],lambda,P0` and an
/// optional trailing column.
pub fn write_snapshot_csv<W: Write>(
    w: W,
    state: &ClebschFieldState,
    vel: &VelocityField,
    extra: Option<(&str, &[f64])>,
) -> Result<(), ClebschError> {
    let g = &state.grid;
    let two_d = g.dim == 2;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t", "i"];
    if two_d {
        header.push("j");
    }
    header.push("x");
    if two_d {
        header.push("y");
    }
    header.extend(["rho", "alpha", "beta", "nu", "vx"]);
    if two_d {
        header.push("vy");
    }
    header.extend(["lambda", "P0"]);
    if let Some((name, col)) = extra {
        if col.len() != g.len() {
            return Err(ClebschError::FieldLength {
                name: "extra column",
                expected: g.len(),
                got: col.len(),
            });
        }
        header.push(name);
    }
    out.write_record(&header)?;

    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        let p = g.position(idx);
        let p0 = state
            .params
            .eos
            .eval(vel.rho0[idx])
            .map_err(|source| ClebschError::Eos { cell: idx, source })?
            .p0;
        row.clear();
        row.push(state.t.to_string());
        row.push(i.to_string());
        if two_d {
            row.push(j.to_string());
        }
        row.push(p.x.to_string());
        if two_d {
            row.push(p.y.to_string());
        }
        for v in [state.rho[idx], state.alpha[idx], state.beta[idx], state.nu[idx], vel.v[idx].x] {
            row.push(v.to_string());
        }
        if two_d {
            row.push(vel.v[idx].y.to_string());
        }
        row.push(vel.lambda[idx].to_string());
        row.push(p0.to_string());
        if let Some((_, col)) = extra {
            row.push(col[idx].to_string());
        }
        out.write_record(&row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clebsch::{reconstruct_velocity, FluidParams, Grid};

    #[test]
    fn header_and_rows() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let n = g.len();
        let s = ClebschFieldState::new(g, 0.5, vec![1.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], FluidParams::default())
            .unwrap();
        let vel = reconstruct_velocity(&s).unwrap();
        let mut buf = Vec::new();
        let extra = vec![0.0; n];
        write_snapshot_csv(&mut buf, &s, &vel, Some(("lagrangian_density", &extra))).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,i,j,x,y,rho,alpha,beta,nu,vx,vy,lambda,P0,lagrangian_density"
        );
        assert_eq!(lines.count(), 64);

        let meta = SnapshotMeta::from_state(&s);
        let mut json = Vec::new();
        meta.write_json(&mut json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["L"], 1.0);
        assert_eq!(v["eos"]["kind"], "dust");
    }
}
