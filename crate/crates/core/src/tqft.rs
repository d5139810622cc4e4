//! The partition function `Z(M) = w_top(Pf|_M)` on the bordism decomposition
//! of a torus induced by a pairing of its fixed points, and `ν(M) = (-1)^{Z(M)}`.

use serde::{Deserialize, Serialize};

use crate::cobordism::restrict_bundle;
use crate::invariants::{InvariantError, PfaffianBundle, Sign};
use crate::momentum::{fixed_points, MomentumSpace, TrimPairing};

/// A point, circle, 2-torus or 3-torus, identified by the fixed points it contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BordismObject {
    pub dimension: usize,
    /// Ascending fixed-point indices.
    pub carrier: Vec<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BordismDecomposition {
    pub ambient: MomentumSpace,
    pub objects: Vec<BordismObject>,
    /// `levels[d]` lists the indices of the `d`-dimensional objects.
    pub levels: Vec<Vec<usize>>,
    /// Each object of positive dimension with its two boundary components.
    pub boundary: Vec<(usize, [usize; 2])>,
}

impl BordismDecomposition {
    pub fn top(&self) -> usize {
        self.levels.last().expect("non-empty decomposition")[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub object: BordismObject,
    pub z_value: u8,
}

impl PartitionValue {
    pub fn nu_value(&self) -> Sign {
        Sign::from_bit(self.z_value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidalReport {
    pub passed: bool,
    pub checks: usize,
    pub counterexample: Option<String>,
}

/// Decomposes `Tᵈ` into the north/south sub-tori of `pairing`, down to fixed points.
pub fn decompose(space: MomentumSpace, pairing: &TrimPairing) -> Result<BordismDecomposition, InvariantError> {
    let d = match space {
        MomentumSpace::Torus(d) => d,
        MomentumSpace::Sphere(_) => return Err(InvariantError::PairingMismatch("decomposition needs a torus".into())),
    };
    if pairing.space != space || !pairing.is_valid() {
        return Err(InvariantError::PairingMismatch(format!("pairing {} does not cover {space}", pairing.label())));
    }
    let mut objects = Vec::new();
    let mut levels = vec![Vec::new(); d + 1];
    let mut push = |objects: &mut Vec<BordismObject>, obj: BordismObject| {
        levels[obj.dimension].push(objects.len());
        objects.push(obj);
        objects.len() - 1
    };
    let pts = fixed_points(space);
    let point_ids: Vec<usize> = pts
        .iter()
        .map(|p| push(&mut objects, BordismObject { dimension: 0, carrier: vec![p.index], label: format!("pt{p}") }))
        .collect();
    let mut boundary = Vec::new();
    let circles: Vec<usize> = pairing
        .pairs
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mut carrier = vec![a.index, b.index];
            carrier.sort_unstable();
            let label = if d == 1 { "T^1".to_string() } else { pairing.pair_label(i) };
            let id = push(&mut objects, BordismObject { dimension: 1, carrier, label });
            boundary.push((id, [point_ids[a.index], point_ids[b.index]]));
            id
        })
        .collect();
    let union = |objects: &[BordismObject], ids: &[usize]| -> Vec<usize> {
        let mut c: Vec<usize> = ids.iter().flat_map(|&i| objects[i].carrier.iter().copied()).collect();
        c.sort_unstable();
        c
    };
    match d {
        1 => {}
        2 => {
            let carrier = union(&objects, &circles);
            let id = push(&mut objects, BordismObject { dimension: 2, carrier, label: "T^2".into() });
            boundary.push((id, [circles[0], circles[1]]));
        }
        3 => {
            let g = pairing
                .grouping
                .as_ref()
                .ok_or_else(|| InvariantError::PairingMismatch("3-torus pairing needs a grouping".into()))?;
            let mut halves = [0usize; 2];
            for (slot, (name, set)) in [("T2_N", &g.north), ("T2_S", &g.south)].into_iter().enumerate() {
                let ids: Vec<usize> = set.iter().map(|&i| circles[i]).collect();
                let carrier = union(&objects, &ids);
                let id = push(&mut objects, BordismObject { dimension: 2, carrier, label: name.into() });
                boundary.push((id, [ids[0], ids[1]]));
                halves[slot] = id;
            }
            let carrier = union(&objects, &halves);
            let id = push(&mut objects, BordismObject { dimension: 3, carrier, label: "T^3".into() });
            boundary.push((id, halves));
        }
        _ => unreachable!("torus dimension is 1..=3"),
    }
    Ok(BordismDecomposition { ambient: space, objects, levels, boundary })
}

/// Top Stiefel–Whitney class of the bundle restricted to `obj`.
fn top_class(bundle: &PfaffianBundle, obj: &BordismObject) -> u8 {
    match (obj.dimension, obj.carrier.as_slice()) {
        (1, &[a, b]) => {
            let pts = bundle.fixed_points();
            restrict_bundle(bundle, (pts[a], pts[b]))
                .map(|l| l.w1())
                .unwrap_or_else(|_| bundle.parity(&obj.carrier))
        }
        _ => bundle.parity(&obj.carrier),
    }
}

/// Partition values of every object of the decomposition, in object order.
pub fn partition(bundle: &PfaffianBundle, decomp: &BordismDecomposition) -> Result<Vec<PartitionValue>, InvariantError> {
    if bundle.space != decomp.ambient {
        return Err(InvariantError::PairingMismatch(format!(
            "bundle on {} but decomposition of {}",
            bundle.space, decomp.ambient
        )));
    }
    Ok(decomp
        .objects
        .iter()
        .map(|o| PartitionValue { object: o.clone(), z_value: top_class(bundle, o) })
        .collect())
}

/// Verifies disjoint-union additivity, multiplicativity of ν, the boundary
/// congruences, and that ν of the ambient space is the product of `h` over
/// its fixed points.
pub fn check_monoidal(bundle: &PfaffianBundle, decomp: &BordismDecomposition) -> Result<MonoidalReport, InvariantError> {
    let values = partition(bundle, decomp)?;
    let mut checks = 0;
    let mut counterexample = None;
    let mut check = |ok: bool, what: &dyn Fn() -> String| {
        checks += 1;
        if !ok && counterexample.is_none() {
            counterexample = Some(what());
        }
    };
    for level in &decomp.levels {
        for (i, &a) in level.iter().enumerate() {
            for &b in &level[i + 1..] {
                let (ma, mb) = (&values[a], &values[b]);
                let mut carrier: Vec<usize> = ma.object.carrier.iter().chain(&mb.object.carrier).copied().collect();
                carrier.sort_unstable();
                let disjoint = BordismObject {
                    dimension: ma.object.dimension,
                    carrier,
                    label: format!("{} + {}", ma.object.label, mb.object.label),
                };
                let z = top_class(bundle, &disjoint);
                check(z == ma.z_value ^ mb.z_value, &|| format!("Z({}) != Z({}) + Z({})", disjoint.label, ma.object.label, mb.object.label));
                check(Sign::from_bit(z) == ma.nu_value() * mb.nu_value(), &|| format!("nu not multiplicative on {}", disjoint.label));
            }
        }
    }
    for (m, [x, y]) in &decomp.boundary {
        let ok = values[*m].z_value == values[*x].z_value ^ values[*y].z_value;
        check(ok, &|| format!("Z({}) is not the sum over its boundary", values[*m].object.label));
    }
    let top = &values[decomp.top()];
    let product: Sign = decomp.levels[0].iter().map(|&i| values[i].nu_value()).product();
    check(top.nu_value() == product && top.nu_value() == bundle.nu(), &|| {
        format!("nu({}) differs from the product over fixed points", top.object.label)
    });
    Ok(MonoidalReport { passed: counterexample.is_none(), checks, counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_example() {
        let t1 = MomentumSpace::Torus(1);
        let pairing = TrimPairing::along_axis(t1, 0, None).unwrap();
        let decomp = decompose(t1, &pairing).unwrap();
        assert_eq!(decomp.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1]);
        let b = PfaffianBundle::parse_signs(t1, "-,+").unwrap();
        let z: Vec<u8> = partition(&b, &decomp).unwrap().iter().map(|v| v.z_value).collect();
        assert_eq!(z, vec![1, 0, 1]);
    }

    #[test]
    fn three_torus_shape() {
        let t3 = MomentumSpace::Torus(3);
        let pairing = TrimPairing::along_axis(t3, 1, Some(2)).unwrap();
        let decomp = decompose(t3, &pairing).unwrap();
        assert_eq!(decomp.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![8, 4, 2, 1]);
        let b = PfaffianBundle::from_mask(t3, 0);
        let values = partition(&b, &decomp).unwrap();
        assert!(values.iter().all(|v| v.z_value == 0));
        assert!(check_monoidal(&b, &decomp).unwrap().passed);
    }
}
