"""Exact worst-case two-stage error versus its analytic upper bound.

The closed-form bound is loose at small network sizes but shares the
exact error's exponential decay, so it certifies asymptotic resilience
without enumerating the double-binomial sum.
"""

import trustfusion as tf

SENSOR = tf.SensorModel(0.15, 0.15, 0.5, 0.5)
TRUST = tf.TrustModel((0.0, 1.0), (0.2, 0.8), (0.8, 0.2))
M_BAR = 0.2


def main() -> None:
    th = tf.TwoStageThresholds(gamma_t=1.0, p_t=0.5)
    ptl, ptm = tf.trust_probabilities(th, TRUST)
    region = tf.BoundRegion(ptl / 2, (ptm + 1) / 2)

    print(f"m_bar={M_BAR}, neutral thresholds gamma_t={th.gamma_t}, "
          f"p_t={th.p_t}")
    print(f"{'n':>5}{'exact error':>16}{'upper bound':>16}")
    for n in (10, 20, 40, 80, 160):
        cfg = tf.WorstCaseConfig(M_BAR, n)
        exact = tf.worst_case_error(th.gamma_t, th.p_t, cfg, SENSOR, TRUST)
        try:
            bound = tf.error_upper_bound(th, cfg, region, SENSOR, TRUST)
            print(f"{n:>5}{exact:>16.3e}{bound:>16.3e}")
        except tf.ValidityError as exc:
            print(f"{n:>5}{exact:>16.3e}{'(no valid bound: ' + str(exc) + ')':>16}")


if __name__ == "__main__":
    main()
