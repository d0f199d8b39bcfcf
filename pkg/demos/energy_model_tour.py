"""Walk through the energy model on hand-sized numbers.

Two devices, one task.  The owner is busy (70% background load), the
neighbor is idle.  The tour prices the task locally, then offloaded over
a fast D2D link, then shows how the saving melts away as the link slows
down, which is exactly the trade the matching schemes optimize.
"""

from d2dmatch import PURE_CPU, DeviceProfile, Task, local_energy, offload_energy


def device(dev_id, load, position):
    return DeviceProfile(
        id=dev_id, cpu_capacity=2e9, load=load, compute_power=0.9,
        cellular_tx_power=0.6, cellular_rate=5e6,
        d2d_tx_power=0.2, d2d_rx_power=0.2, position=position,
    )


def show(label, b):
    print(f"  {label:<28} compute {b.compute:7.3f} J   cellular {b.cellular:6.3f} J"
          f"   d2d {b.d2d_transfer:6.3f} J   total {b.total:7.3f} J")


def main():
    owner = device(0, load=0.7, position=(0.0, 0.0))
    neighbor = device(1, load=0.0, position=(60.0, 0.0))

    # 1000 KB of input, 3000 cycles per bit, 20% of the input comes back
    size = 1000 * 8192.0
    task = Task(owner=0, input_size=size, cpu_cycles=3000.0 * size,
                output_size=0.2 * size, cellular_traffic=0.0, kind=PURE_CPU)

    print(f"task: {size / 8192:.0f} KB in, {task.cpu_cycles:.3g} cycles, "
          f"{task.output_size / 8192:.0f} KB out")
    print(f"owner runs at {owner.available_capacity:.2g} cycle/s after load, "
          f"neighbor at {neighbor.available_capacity:.2g} cycle/s\n")

    local = local_energy(owner, task)
    show("local on the busy owner", local)

    rate = 4e7  # a healthy short-range link
    remote = offload_energy(owner, neighbor, task, rate_ij=rate, rate_ji=rate)
    show(f"offloaded at {rate:.0g} b/s", remote)
    print(f"\n  offloading saves {local.total - remote.total:.3f} J "
          f"({1 - remote.total / local.total:.1%}): the idle CPU finishes "
          "the same cycles in under a third of the time\n")

    print("the same offload over ever slower links:")
    for rate in (4e7, 1e7, 1e6, 2e5, 1e5):
        remote = offload_energy(owner, neighbor, task, rate_ij=rate, rate_ji=rate)
        verdict = "worth it" if remote.total < local.total else "keep it local"
        print(f"  rate {rate:>9.0f} b/s  total {remote.total:7.3f} J  ({verdict})")
    print(f"\n  local reference stays {local.total:.3f} J; below roughly "
          "150 kb/s the transfer burns more than the busy CPU would")


if __name__ == "__main__":
    main()
