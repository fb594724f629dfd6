#![allow(dead_code)]

pub mod oracle;
pub mod table_one;

use schedtune::{SchedParams, SimConfig, WorkloadSpec};

use oracle::{OracleParams, OracleResult, OracleWorkload};

/// Runs the reference simulator on the same inputs as the engine.
pub fn oracle_run(params: &SchedParams, spec: &WorkloadSpec, sim: &SimConfig) -> OracleResult {
    oracle::simulate(
        OracleParams {
            latency_ns: params.latency_ns,
            min_gran_ns: params.min_gran_ns,
            wakeup_gran_ns: params.wakeup_gran_ns,
        },
        OracleWorkload {
            groups: spec.groups as usize,
            fanout: spec.fanout as usize,
            msgs: spec.msgs as usize,
            send_ns: spec.msg_cost_send_ns,
            recv_ns: spec.msg_cost_recv_ns,
            capacity: spec.channel_capacity as usize,
        },
        sim.num_cpus as usize,
        sim.switch_cost_ns,
        sim.cap_ns(),
    )
}

/// Small workloads: at most 4 tasks and at most 4 messages in total.
pub fn small_workloads() -> Vec<WorkloadSpec> {
    let mut out = Vec::new();
    let shapes = [
        (1u32, 1u32, 1u32),
        (1, 1, 2),
        (1, 1, 3),
        (1, 1, 4),
        (2, 1, 1),
        (2, 1, 2),
        (1, 2, 1),
        (1, 1, 0),
    ];
    for (groups, fanout, msgs) in shapes {
        for capacity in [1u32, 64] {
            for (send, recv) in [(750_000u64, 750_000u64), (300_000, 500_000), (2_000, 1_000)] {
                out.push(WorkloadSpec {
                    groups,
                    fanout,
                    msgs,
                    msg_cost_send_ns: send,
                    msg_cost_recv_ns: recv,
                    channel_capacity: capacity,
                });
            }
        }
    }
    out
}

/// Three settings: sub-operation slices, mid slices, long slices with a
/// wakeup allowance.
pub fn oracle_param_settings() -> [SchedParams; 3] {
    [
        SchedParams::unchecked(400_000, 100_000, 0),
        SchedParams::unchecked(20_000_000, 4_000_000, 0),
        SchedParams::unchecked(1_000_000, 500_000, 1_250_000),
    ]
}
