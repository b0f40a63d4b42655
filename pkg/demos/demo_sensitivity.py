"""How aggressively may small kernel values be truncated?

The squared-exponential kernel admits a Laurent-style expansion in the
inverse scaled distance 1/s.  Truncating that expansion at a given order is
accurate only while s stays above a cutoff s_cut; below it the tail terms
matter.  Translated back to kernel values, k_cut = g(s_cut) is the kernel
magnitude below which a truncated representation of the given order cannot
be trusted — and, dually, the scale of what a sparsification threshold
throws away.

The script prints the cutoff table over expansion orders and tolerances and
evaluates how fast the tail decays for a nearly coincident point pair.
"""

from acvo.sensitivity import cutoff_table, g


def main() -> None:
    orders = [2, 4, 6, 8]
    tolerances = [1e-1, 1e-2, 1e-3, 1e-4]
    print("order  tolerance   s_cut     k_cut")
    for entry in cutoff_table(orders, tolerances):
        print(f"{entry.order:5d}  {entry.tolerance:9.0e}  "
              f"{entry.s_cut:8.4f}  {entry.k_cut:.4f}")

    s = 0.05
    print(f"\nnear coincidence (s = {s}): g(s) = {g(s):.3e}")
    print("every term s^-2m g(s) of the expansion vanishes as s -> 0, so")
    print("the truncated representation is exact in the coincident limit.")


if __name__ == "__main__":
    main()
