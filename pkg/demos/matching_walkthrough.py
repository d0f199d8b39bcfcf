"""Follow one tiny round through the full optimal pipeline.

Five devices, three tasks.  The script prints the matching graph that
the round reduces to (replicas, idle dummies, decision edges, mirror
edges), solves it, checks the solver's own optimality certificate,
decodes the matching back into an assignment, and cross-checks the
result against exhaustive search.
"""

from d2dmatch import (
    PURE_CELLULAR,
    PURE_CPU,
    ConnectivityGraph,
    DeviceProfile,
    Round,
    Task,
    WeightedGraph,
    brute_force_assignment,
    decode,
    min_weight_perfect_matching,
    verify_certificate,
)
from d2dmatch.matchgraph import build


def device(dev_id, load, cellular_rate=5e6):
    return DeviceProfile(
        id=dev_id, cpu_capacity=2e9, load=load, compute_power=0.9,
        cellular_tx_power=0.6, cellular_rate=cellular_rate,
        d2d_tx_power=0.2, d2d_rx_power=0.2, position=(0.0, 0.0),
    )


def main():
    # 0: busy owner, 1: idle helper, 2 and 3: owners with complementary
    # strengths (2 has an idle CPU but a slow uplink, 3 the reverse),
    # 4: idle but out of everyone's D2D range
    devices = (
        device(0, load=0.6),
        device(1, load=0.0),
        device(2, load=0.0, cellular_rate=1e6),
        device(3, load=0.8, cellular_rate=1e7),
        device(4, load=0.0),
    )
    size = 1000 * 8192.0
    tasks = (
        Task(owner=0, input_size=size, cpu_cycles=3000 * size,
             output_size=0.2 * size, cellular_traffic=0.0, kind=PURE_CPU),
        Task(owner=2, input_size=size, cpu_cycles=0.0,
             output_size=0.2 * size, cellular_traffic=size, kind=PURE_CELLULAR),
        Task(owner=3, input_size=size, cpu_cycles=1000 * size,
             output_size=0.2 * size, cellular_traffic=0.0, kind=PURE_CPU),
    )
    conn = ConnectivityGraph(
        device_ids=(0, 1, 2, 3, 4),
        rates={(0, 1): 3e7, (1, 2): 3e7, (2, 3): 3e7},
    )
    rnd = Round(devices=devices, tasks=tasks, connectivity=conn)

    g = build(rnd.connectivity, rnd.tasks, rnd.devices)
    print(f"round: {len(devices)} devices, {len(tasks)} tasks, "
          f"{len(conn.rates)} D2D links")
    print(f"matching graph: {len(g.nodes)} nodes, {len(g.edges)} edges "
          "(device 4 has no link, so it is pruned)\n")

    print("nodes:")
    for k, node in enumerate(g.nodes):
        print(f"  [{k}] {node.kind} of device {node.device}")

    print("\nedges (joules):")
    for (u, v, w), case in zip(g.edges, g.cases):
        print(f"  {case:<9} [{u}]--[{v}]  {w:8.3f}")

    matching = min_weight_perfect_matching(
        WeightedGraph(len(g.nodes), g.edges)
    )
    verify_certificate(WeightedGraph(len(g.nodes), g.edges), matching)
    print(f"\nminimum perfect matching, weight {matching.weight:.3f} J "
          "(dual certificate verified):")
    case_by_pair = {}
    for (u, v, _w), case in zip(g.edges, g.cases):
        case_by_pair[(u, v)] = case_by_pair[(v, u)] = case
    for u, v in matching.pairs:
        print(f"  [{u}]--[{v}]  {case_by_pair[(u, v)]}")

    a = decode(g, matching.pairs)
    print("\ndecoded assignment:")
    for i in sorted(a.executors):
        j = a.executors[i]
        how = "locally" if i == j else f"on device {j}"
        print(f"  device {i}'s task runs {how} ({a.energies[i]:.3f} J)")
    print(f"  total {a.total_energy:.3f} J")

    oracle = brute_force_assignment(rnd)
    print(f"\nexhaustive search over all feasible assignments agrees: "
          f"{oracle.total_energy:.3f} J")


if __name__ == "__main__":
    main()
