"""The soft rate generalizes the hard rate: one-hot annotations collapse it.

If descriptors do nothing but name the equivalence groups (each proposal
gets exactly one flag, shared by exactly its group), pairwise Jaccard is 1
within a group and 0 across groups, and the soft rate reproduces the hard
rate to machine precision.

Run:  python3 demos/02_hard_soft_equivalence.py
"""

import numpy as np

from consensus_kit import (
    EquivalenceGrouping,
    agreement_rate,
    one_hot_embed,
    soft_agreement_rate,
)


def random_case(rng, max_n=20):
    n = int(rng.integers(2, max_n + 1))
    n_cuts = int(rng.integers(0, n - 1))
    cuts = sorted(rng.choice(np.arange(1, n), size=n_cuts, replace=False).tolist())
    sizes = tuple(b - a for a, b in zip([0] + cuts, cuts + [n]))
    grouping = EquivalenceGrouping(group_sizes=sizes, n_total=n)
    assignment = [g for g, size in enumerate(sizes) for _ in range(size)]
    rng.shuffle(assignment)
    return grouping, assignment


def main() -> None:
    grouping = EquivalenceGrouping(group_sizes=(3, 2, 1), n_total=6)
    assignment = [0, 1, 0, 2, 1, 0]  # which group each proposal landed in
    vectors = one_hot_embed(grouping, assignment)

    print("grouping: sizes", grouping.group_sizes, "over N =", grouping.n_total)
    print("one-hot annotation of each proposal:")
    for i, v in enumerate(vectors):
        print(f"  proposal {i}: {list(v.bits)}   (group {assignment[i]})")

    hard = agreement_rate(grouping).value
    soft = soft_agreement_rate(vectors).value
    print(f"\nhard rate = {hard!r}")
    print(f"soft rate = {soft!r}")
    print(f"difference = {abs(hard - soft):.2e}")

    print("\nSame check over 2000 random partitions (N up to 20):")
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(2000):
        g, a = random_case(rng)
        worst = max(worst, abs(agreement_rate(g).value - soft_agreement_rate(one_hot_embed(g, a)).value))
    print(f"worst |soft - hard| = {worst:.2e}")


if __name__ == "__main__":
    main()
