#![allow(dead_code)]

use accessor_core::ControlModel;

/// N=2, M=1 with `g_xy = g_yx = 1` and excitation `d1`.
pub fn qubit_pair(d1: i64) -> ControlModel {
    ControlModel::new(2, 1, vec![1, -1], vec![1], vec![], vec![d1])
        .unwrap()
        .with_coupling(1, 2, "X", 1)
        .unwrap()
        .with_coupling(1, 1, "Y", 1)
        .unwrap()
}

/// N=2, M=1 with only `g_xx` nonzero.
pub fn simple_coupling(d1: i64) -> ControlModel {
    ControlModel::new(2, 1, vec![1, -1], vec![1], vec![], vec![d1])
        .unwrap()
        .with_coupling(1, 1, "X", 1)
        .unwrap()
}

/// N=3, M=3 with the four unit couplings on YYY, YYX, YXY, XYY.
pub fn three_by_three() -> ControlModel {
    ControlModel::new(3, 3, vec![-1, 0, 1], vec![1, 1, 1], vec![1, 1], vec![1, 2])
        .unwrap()
        .with_coupling(1, 1, "YYY", 1)
        .unwrap()
        .with_coupling(2, 1, "YYX", 1)
        .unwrap()
        .with_coupling(1, 2, "YXY", 1)
        .unwrap()
        .with_coupling(2, 2, "XYY", 1)
        .unwrap()
}

/// N=3, M=2 with a drivable `σ_x^1σ_x^2` and unequal gaps.
pub fn three_by_two() -> ControlModel {
    ControlModel::new(3, 2, vec![-1, 0, 2], vec![1, 1], vec![1], vec![1, 1])
        .unwrap()
        .with_coupling(1, 1, "XX", 1)
        .unwrap()
        .with_coupling(1, 2, "XY", 1)
        .unwrap()
        .with_coupling(2, 1, "YX", 1)
        .unwrap()
        .with_coupling(2, 2, "YY", 1)
        .unwrap()
        .with_extra_control("XX")
        .unwrap()
}

/// N=2 chain of length `m` with unit chain couplings and couplings chosen so
/// that the coupling matrix has full rank.
pub fn qubit_chain(m: usize) -> ControlModel {
    let a = "X".repeat(m);
    let b = "Y".repeat(m);
    ControlModel::new(2, m, vec![1, -1], vec![1; m], vec![1; m - 1], vec![1])
        .unwrap()
        .with_coupling(1, 1, &a, 1)
        .unwrap()
        .with_coupling(1, 2, &b, 1)
        .unwrap()
}
