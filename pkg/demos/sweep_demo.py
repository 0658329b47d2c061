"""Sweep the malicious proportion and watch the defenses degrade.

Reproduces the headline comparison: reputation-style baselines fall over
once the malicious robots reach a majority, while the trust-aware rules
keep working until the critical proportion m* (about 0.8 for this trust
quality) and then plateau at the prior-guess error instead of being
driven to certainty-of-error.
"""

import trustfusion as tf

SENSOR = tf.SensorModel(0.15, 0.15, 0.5, 0.5)
TRUST = tf.TrustModel((0.0, 1.0), (0.2, 0.8), (0.8, 0.2))
ATTACK = tf.AttackModel(0.99, 0.0, 0.0)

METHODS = ["two_stage", "aglrt_constrained", "reputation_t5", "oracle"]


def main(trials: int = 4000) -> None:
    cfg = tf.ScenarioConfig(n=10, malicious_count=0, sensor=SENSOR,
                            trust=TRUST, attack=ATTACK, seed=20260818)
    proportions = [0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0]
    rows = tf.sweep_malicious_proportion(cfg, proportions, trials, METHODS,
                                         threads=4)

    m_star = tf.m_star_exact(cfg.n, SENSOR, TRUST)
    print(f"n={cfg.n}, {trials} trials per point, critical proportion "
          f"m*={m_star:.2f}")
    header = "m    " + "".join(f"{m:>18}" for m in METHODS)
    print(header)
    for prop, report in rows:
        cells = "".join(f"{report.result_for(m).error_rate:>18.4f}"
                        for m in METHODS)
        print(f"{prop:<5.2f}{cells}")
    print("\nPast m* the two-stage error settles at min(prior) = "
          f"{min(SENSOR.prior_h0, SENSOR.prior_h1):.2f}: the fusion center "
          "trusts nobody and guesses the more likely hypothesis.")


if __name__ == "__main__":
    main()
