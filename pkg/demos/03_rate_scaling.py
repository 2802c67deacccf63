"""Rate-scaling sweeps at desk scale.

Two regimes:

* squared theta error against the interaction Frobenius mass on block
  matrices (confounded intercept design; expected log-log slope near -1),
* squared theta error against the sample size on the Curie-Weiss matrix
  with Gaussian features, where estimation succeeds at the 1/n rate even
  though ||A||_F = 1.

Writes CSV and SVG under demos_out/.  Trial counts are reduced here for
speed; the acceptance suite runs the full 20-trial versions.
"""

from isingreg import emit, rate_experiment

OUT = "demos_out/rate_scaling"


def main():
    frob = rate_experiment("frobenius_sweep", [4, 16, 64, 256], 8, seed=11)
    slope_f = [v for _, v in frob.values("slope_theta_sq_err")][0]
    print(f"frobenius sweep: slope of E||theta_hat - theta*||^2 vs "
          f"||A||_F^2 = {slope_f:.3f} (expect ~ -1)")
    emit(frob, OUT, stem="frobenius_sweep")

    nsweep = rate_experiment("n_sweep_random_features", [500, 2000, 8000], 8,
                             seed=0)
    slope_n = [v for _, v in nsweep.values("slope_theta_sq_err")][0]
    print(f"n sweep (||A||_F = 1): slope vs n = {slope_n:.3f} (expect ~ -1)")
    emit(nsweep, OUT, stem="n_sweep")
    print(f"tables and charts in {OUT}/")


if __name__ == "__main__":
    main()
