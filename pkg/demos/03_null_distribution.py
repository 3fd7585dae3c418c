"""What does the soft agreement rate look like when nobody actually agrees?

Draw random annotations (each descriptor present independently with
probability p), compute the soft rate of each draw, and look at the
distribution.  An observed study rate is only interesting if it clears
this chance baseline.

Run:  python3 demos/03_null_distribution.py
"""

from consensus_kit import NullModelParams, cdf, simulate


def ascii_histogram(dist, width=60, lo=0.0, hi=1.0):
    lines = []
    peak = max(dist.bin_counts) or 1
    for i, count in enumerate(dist.bin_counts):
        bin_lo = i / dist.params.bins
        bin_hi = (i + 1) / dist.params.bins
        if bin_hi < lo or bin_lo > hi:
            continue
        bar = "#" * round(width * count / peak)
        lines.append(f"  [{bin_lo:4.2f}, {bin_hi:4.2f})  {bar}")
    return "\n".join(lines)


def main() -> None:
    # nine subjects, the bundled 54-descriptor vocabulary, sparse annotations
    params = NullModelParams(subjects=9, dims=54, p_one=0.07, iterations=200_000, seed=0)
    print(f"simulating {params.iterations:,} draws: S={params.subjects}, "
          f"d={params.dims}, p={params.p_one} ...")
    dist = simulate(params)

    print("\nnull distribution of the soft rate (bins up to 0.20):")
    print(ascii_histogram(dist, hi=0.20))

    mode_lo = dist.mode_bin / params.bins
    mode_hi = (dist.mode_bin + 1) / params.bins
    print(f"\nmode bin: [{mode_lo}, {mode_hi})")
    for t in (0.04, 0.07, 0.10):
        print(f"P(rate <= {t:.2f}) ~= {cdf(dist, t):.4f}")

    print()
    print("Reading: with sparse random annotations the soft rate almost never")
    print("reaches 0.10, so a study that measures, say, 0.25 is far outside")
    print("what descriptor overlap by chance can explain.")
    print()
    print("Dense random annotations (p = 0.5) push the baseline much higher:")
    dense = simulate(NullModelParams(subjects=9, dims=54, p_one=0.5,
                                     iterations=200_000, seed=0))
    print(f"mode bin: [{dense.mode_bin / 100}, {(dense.mode_bin + 1) / 100}), "
          f"P(rate <= 0.35) ~= {cdf(dense, 0.35):.4f}")
    print("The same observed rate can be trivial or remarkable depending on")
    print("how many descriptors a random proposal tends to light up.")


if __name__ == "__main__":
    main()
