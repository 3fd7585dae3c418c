"""Pairwise similarity and the two agreement rates, on hand-checkable numbers.

Run:  python3 demos/01_similarity_and_rates.py
"""

from consensus_kit import (
    EquivalenceGrouping,
    agreement_rate,
    cosine_similarity,
    jaccard_similarity,
    percent_agreeing,
    soft_agreement_rate,
)


def main() -> None:
    print("== pairwise similarity ==")
    a = [1, 1, 0, 0, 1]
    b = [1, 0, 1, 0, 1]
    print(f"a = {a}")
    print(f"b = {b}")
    print(f"jaccard(a, b) = {jaccard_similarity(a, b):.4f}   (2 shared / 4 in union)")
    print(f"cosine(a, b)  = {cosine_similarity(a, b):.4f}")
    # all-zero vectors share nothing by convention, not by division
    print(f"jaccard(0, 0) = {jaccard_similarity([0, 0], [0, 0]):.4f}")
    print()

    print("== hard agreement rate ==")
    print("Ten participants propose a gesture for 'next track'. Four proposals")
    print("are judged identical, the other six are all different:")
    grouping = EquivalenceGrouping(group_sizes=(4, 1, 1, 1, 1, 1, 1), n_total=10)
    hard = agreement_rate(grouping)
    print(f"  group sizes {grouping.group_sizes} over N={grouping.n_total}")
    print(f"  hard rate = {hard.value:.6f}  (= 2/15)")
    print(f"  percent agreeing = {percent_agreeing(hard):.2f}%")
    print()
    print("A 6-strong majority with four loners scores much higher:")
    majority = agreement_rate(EquivalenceGrouping(group_sizes=(6, 1, 1, 1, 1), n_total=10))
    print(f"  hard rate = {majority.value:.6f}  (= 1/3)")
    print(f"  percent agreeing = {percent_agreeing(majority):.2f}%")
    print()

    print("== soft agreement rate ==")
    print("The same four-plus-singletons split, but now each proposal carries")
    print("descriptor flags and the 'different' proposals still overlap a bit:")
    vectors = [
        [1, 1, 0, 0],  # the identical four
        [1, 1, 0, 0],
        [1, 1, 0, 0],
        [1, 1, 0, 0],
        [1, 0, 1, 0],  # shares one flag with the majority
        [0, 1, 0, 1],
        [0, 0, 1, 1],
    ]
    soft = soft_agreement_rate(vectors)
    print(f"  soft rate (jaccard) = {soft.value:.6f}")
    print(f"  soft rate (cosine)  = {soft_agreement_rate(vectors, sim='cosine').value:.6f}")
    print()
    print("Partial overlap that the hard rate scores as zero now counts, so the")
    print("soft rate sits above the hard rate whenever near-misses exist.")


if __name__ == "__main__":
    main()
