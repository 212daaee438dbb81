"""
Gradient all-reduce cost on a two-level cluster
===============================================

Every data-parallel step ends with an all-reduce of the full gradient.
Inside a node the ring runs over fast links; once a job spans nodes a
second ring runs over the interconnect, and its latency term grows with
the node count.
"""

import numpy as np

from ddpscale import ClusterSpec, allreduce_time, ring_allreduce_time

# A DimeNet-sized gradient: 2.1M fp32 parameters
message = 2_100_000 * 4

# A flat ring: bandwidth term saturates at 2M/B, latency grows linearly
for p in (2, 4, 16, 64, 256):
    t = ring_allreduce_time(message, p, bandwidth=1.25e10, latency=1e-4)
    print(f"ring over {p:4d} GPUs: {t * 1e3:8.3f} ms")

# Two GPUs per node: the intra-node ring is paid once, the inter-node ring
# is paid over ceil(n / 2) nodes
cluster = ClusterSpec(gpus_per_node=2, inter_latency=1e-4)
grid = np.array([1, 2, 4, 8, 16, 32, 64, 128, 256, 364, 416])
times = [allreduce_time(cluster, message, int(n)) for n in grid]
for n, t in zip(grid, times):
    print(f"hierarchical, n={n:4d}: {t * 1e3:8.3f} ms")

# Without inter-node latency the cost approaches a ceiling
flat = ClusterSpec(gpus_per_node=2, inter_latency=0.0)
ceiling = ring_allreduce_time(message, 2, flat.intra_bandwidth, flat.intra_latency) + 2 * message / flat.inter_bandwidth
print(f"n=10^6 without inter latency: {allreduce_time(flat, message, 10**6) * 1e3:.3f} ms "
      f"(ceiling {ceiling * 1e3:.3f} ms)")
