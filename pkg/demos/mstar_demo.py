"""How much of the network can be hostile before trust stops helping?

Prints the critical malicious proportion m* as a function of trust
quality, comparing the exact binomial computation against the normal
approximation.  Better trust separation (legitimate robots more likely
to look trustworthy, malicious less) buys tolerance of larger hostile
majorities.
"""

import trustfusion as tf

N = 50
PRIORS = (0.5, 0.5)


def main() -> None:
    print(f"n={N} robots, symmetric trust pmfs p_m = 1 - p_l")
    print(f"{'p_trust_legit':>14}{'m* exact':>12}{'m* approx':>12}{'diff':>8}")
    for i in range(1, 10):
        p_l = round(0.1 * i, 10)
        exact = tf.m_star_noiseless_exact(p_l, 1.0 - p_l, N, PRIORS)
        approx = tf.m_star_normal_approx(p_l, 1.0 - p_l, N, PRIORS)
        print(f"{p_l:>14.1f}{exact:>12.2f}{approx:>12.2f}"
              f"{abs(exact - approx):>8.3f}")
    print("\nAt p_l = 0.5 trust carries no information and m* collapses to "
          "the classical 1/2 majority threshold.")


if __name__ == "__main__":
    main()
